#pragma once

#include <stdexcept>

#include "modframe/space.hpp"

namespace modframe {

/// A C-linear map between module spaces, stored as its matrix on the
/// coordinate vectors. Module-linearity (commuting with the left algebra
/// action) is a property to be verified, not assumed by the type.
class ModuleOperator {
 public:
  ModuleOperator(ModuleSpace domain, ModuleSpace codomain, CMat mat);

  static ModuleOperator identity(const ModuleSpace& space);
  static ModuleOperator zero(const ModuleSpace& domain, const ModuleSpace& codomain);

  const ModuleSpace& domain() const { return domain_; }
  const ModuleSpace& codomain() const { return codomain_; }
  const CMat& matrix() const { return mat_; }

  ModuleVector apply(const ModuleVector& x) const;
  /// this after rhs (domains must chain).
  ModuleOperator compose(const ModuleOperator& rhs) const;
  ModuleOperator scaled(Complex factor) const;
  ModuleOperator operator+(const ModuleOperator& rhs) const;
  ModuleOperator operator-(const ModuleOperator& rhs) const;

  /// Coordinate operator norm. For module-linear maps on free modules this
  /// equals the module operator norm sup ||Tx|| / ||x||.
  double norm() const { return opnorm(mat_); }

 private:
  ModuleSpace domain_;
  ModuleSpace codomain_;
  CMat mat_;
};

struct NotAdjointableError : std::runtime_error {
  NotAdjointableError(std::string msg, CVec x, CVec y, double deviation);
  CVec witness_x;
  CVec witness_y;
  double deviation;
};

/// Coordinate adjoint, verified to satisfy <Tx, y> = <x, T*y> in the
/// algebra-valued inner product on `trials` deterministic random pairs
/// (relative tolerance 1e-10). Throws NotAdjointableError with the worst
/// pair when the identity fails: on pattern spaces not every operator is
/// adjointable.
ModuleOperator adjoint(const ModuleOperator& t,
                       const ToleranceConfig& cfg = ToleranceConfig{},
                       int trials = 50);
/// The coordinate adjoint with no verification (valid on free modules for
/// module-linear maps, where the trace pairing matches the module one).
ModuleOperator adjoint_unchecked(const ModuleOperator& t);

/// Checks T(a x) = a T(x) over `trials` random pattern-preserving algebra
/// elements and module vectors, at relative tolerance 1e-10.
Verdict verify_a_linear(const ModuleOperator& t,
                        const ToleranceConfig& cfg = ToleranceConfig{},
                        int trials = 50);

/// Matrix of a module-linear map on a free module over the module basis:
/// G(i, j)-block = block j of T(e_i), an (n d_dom) x (n d_cod) matrix.
/// G is a *-anti-homomorphism: flatten(T compose S) = flatten(S) * flatten(T)
/// and flatten(adjoint T) = flatten(T)*. T is positive as a module map
/// exactly when flatten(T) is PSD, and ||T|| = sigma_max(flatten(T)).
CMat flatten(const ModuleOperator& t);

/// Inverse of flatten: the unique module-linear operator with the given
/// module-basis matrix.
ModuleOperator from_flattened(const ModuleSpace& domain, const ModuleSpace& codomain,
                              const CMat& g);

/// Positivity of an operator on a free module via its flattened matrix.
/// Falsified verdicts carry module coordinates of a unit-norm witness x
/// with <Tx, x> not PSD, plus the evaluated violation.
Verdict flatten_positive_test(const ModuleOperator& t, const ToleranceConfig& cfg);

}  // namespace modframe
