#pragma once

#include <optional>

#include "modframe/forms.hpp"
#include "modframe/measure.hpp"

namespace modframe {

/// A measurable family of operators H -> R, one per measure node.
struct OperatorFamily {
  enum class Kind { Table, ScalarProfile };
  Kind kind = Kind::Table;

  /// Table: one operator per node, in node order.
  std::vector<ModuleOperator> table;

  /// ScalarProfile: node omega gets poly(omega) * base, with
  /// poly(w) = coeffs[0] + coeffs[1] w + ...
  std::optional<ModuleOperator> base;
  std::vector<double> coeffs;

  static OperatorFamily from_table(std::vector<ModuleOperator> ops);
  static OperatorFamily scalar_profile(ModuleOperator base, std::vector<double> coeffs);

  const ModuleSpace& op_domain() const;
  const ModuleSpace& op_codomain() const;
  /// One operator per node. Table families must match the node count.
  std::vector<ModuleOperator> materialize(const MeasureDiscretization& measure) const;
};

/// A controlled frame candidate: space H, operator family over a
/// discretized measure, controllers C, C' and optionally the target
/// operator K of the lower inequality (absent K means K = identity).
struct FrameInstance {
  ModuleSpace space;
  MeasureDiscretization measure;
  OperatorFamily family;
  ModuleOperator c;
  ModuleOperator c_prime;
  std::optional<ModuleOperator> k;
  ToleranceConfig tol;

  ModuleOperator effective_k() const;
  bool has_nontrivial_k() const;
};

/// Structural validation: controller positivity and invertibility
/// (Hermitian within tol_h, lambda_min > tol_psd * scale, finite condition
/// number), module-linearity of every materialized family operator, C, C'
/// and K, and adjointability of the family and K. Throws
/// std::invalid_argument / std::domain_error / NotAdjointableError.
void validate_instance(const FrameInstance& inst);

struct AssembledFrame {
  ModuleOperator controlled;  ///< S_cc = sum_k w_k C' Lambda_k* Lambda_k C
  ModuleOperator plain;       ///< S = sum_k w_k Lambda_k* Lambda_k
  /// Relative commutator norms: [C, C'] and the worst of
  /// [C, Lambda*Lambda], [C', Lambda*Lambda] over the nodes.
  double comm_controllers_rel = 0.0;
  double comm_family_rel = 0.0;
  double max_commutator_rel = 0.0;
  bool commuting = false;  ///< max_commutator_rel <= 1e-8
  double herm_deviation_rel = 0.0;  ///< of the controlled operator
  /// Positivity of the controlled operator (flatten test on free modules,
  /// coordinate PSD on patterns); diagnostic, not enforced.
  Verdict positivity;
};

/// Quadrature assembly of the controlled and plain frame operators, with
/// a fixed node summation order. Self-adjointness and positivity are
/// reported, never assumed.
AssembledFrame assemble_frame_operator(const FrameInstance& inst);

/// The A-valued form f, g -> sum_k w_k <Lambda_k C f, Lambda_k C' g>.
SesquilinearForm integral_form(const FrameInstance& inst);

/// An element of the discretized section space: one range vector per node.
struct L2Section {
  std::vector<ModuleVector> blocks;
};

/// sum_k w_k <y_k, z_k>.
CMat l2_inner(const FrameInstance& inst, const L2Section& y, const L2Section& z);

/// Synthesis T y = sum_k w_k (C C')^{1/2} Lambda_k* y_k. Requires
/// commuting controllers (the square root must exist); std::domain_error
/// otherwise.
ModuleVector synthesis_apply(const FrameInstance& inst, const L2Section& y);

/// Analysis x -> { Lambda_k (C' C)^{1/2} x }, the adjoint of synthesis
/// with respect to the weighted section inner product.
L2Section analysis_apply(const FrameInstance& inst, const ModuleVector& x);

struct SynthesisNorm {
  double norm = 0.0;   ///< module operator norm of synthesis
  L2Section achiever;  ///< unit-norm section with ||T y|| ~ norm
};

/// Exact synthesis norm on free modules, as the largest singular value of
/// the flattened synthesis matrix over weight-orthonormalized sections.
SynthesisNorm synthesis_norm(const FrameInstance& inst);

/// The reference worked example: H = 2 x 4 matrices supported on
/// {(1,1), (1,2), (2,2), (2,4)} (1-based), Lambda_omega = omega * E,
/// K = E with E the diagonal 0,1,1,0 mask, C = alpha I, C' = beta I,
/// Lebesgue measure on [0, 1]. Its optimal two-sided constant is
/// alpha * beta * integral of omega^2, i.e. alpha * beta / 3 exactly.
FrameInstance worked_example_instance(double alpha, double beta,
                                      QuadratureRule rule = QuadratureRule::GaussLegendre,
                                      int n = 2);

}  // namespace modframe
