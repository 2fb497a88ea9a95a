#pragma once

#include "modframe/operator.hpp"

namespace modframe {

/// An algebra-valued sesquilinear form on a module space, tabulated over
/// the coordinate basis: gram is the (D n) x (D n) block matrix with
/// block (i, j) = Q(b_i, b_j), so Q(f, g) = sum_ij f_i conj(g_j) block(i, j).
struct SesquilinearForm {
  SesquilinearForm(ModuleSpace s, CMat g);
  ModuleSpace space;
  CMat gram;

  CMat block(int i, int j) const;
  /// Q(f, g) as an n x n matrix.
  CMat evaluate(const CVec& f, const CVec& g) const;
};

/// Q(f, g) = <f, g>.
SesquilinearForm inner_form(const ModuleSpace& space);
/// Q(f, g) = <K* f, K* g>; K must be adjointable.
SesquilinearForm k_relative_form(const ModuleOperator& k,
                                 const ToleranceConfig& cfg = ToleranceConfig{});
SesquilinearForm scale_form(const SesquilinearForm& q, double factor);

/// Certification of Q1(f, f) <= Q2(f, f) for every module element f.
///
/// Stage 1: exact-equality shortcut. Stage 2: positivity of the block
/// Gram difference, a sufficient certificate for the quantified claim.
/// Stage 3 (falsification): scans coordinate basis directions, seeded
/// random elements, and eigenvector-derived candidates, each normalized
/// to unit module norm, and reports the worst violation if it crosses
/// tol_falsify. Between the certificate and a genuine witness the verdict
/// stays Undetermined: block positivity is sufficient but not necessary.
Verdict form_compare(const SesquilinearForm& q1, const SesquilinearForm& q2,
                     const ToleranceConfig& cfg, std::uint64_t seed = 0x5eedULL,
                     int samples = 64);

}  // namespace modframe
