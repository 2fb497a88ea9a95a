#pragma once

#include <Eigen/Dense>

#include "modframe/tolerances.hpp"
#include "modframe/verdict.hpp"

namespace modframe {

/// Hermitian part (X + X*)/2.
template <typename Derived>
auto herm(const Eigen::MatrixBase<Derived>& x) {
  return ((x + x.adjoint()) / 2.0).eval();
}

/// Largest absolute entry; zero for empty matrices.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

/// Operator (spectral) norm: largest singular value.
double opnorm(const CMat& x);

/// max(1, opnorm(x)); every relative tolerance in the library uses this.
double scale_of(const CMat& x);

/// Largest absolute entry of X - X*.
double hermitian_deviation(const CMat& x);

bool is_hermitian(const CMat& x, double tol_h_rel);

/// Positivity test in the Loewner order. Certified requires X Hermitian
/// within tol_h and lambda_min(herm X) >= -tol_psd * scale; Falsified
/// requires lambda_min < -tol_falsify * scale and carries the offending
/// unit eigenvector (valid as a witness even for non-Hermitian X, since
/// Re v*Xv = v*(herm X)v).
Verdict is_psd(const CMat& x, const ToleranceConfig& cfg);

/// Certification of X <= Y. Inputs must be Hermitian within tol_h
/// (throws std::invalid_argument otherwise); delegates to is_psd(Y - X).
Verdict loewner_leq(const CMat& x, const CMat& y, const ToleranceConfig& cfg);

/// Hermitian square root with negative eigenvalues clamped to zero.
/// Requires is_psd(x) Certified; throws std::domain_error otherwise.
CMat sqrt_psd(const CMat& x, const ToleranceConfig& cfg = ToleranceConfig{});

struct SpectralEdge {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  CVec vec_min;
  CVec vec_max;
};

/// Extremal eigenpairs of a Hermitian matrix (throws std::invalid_argument
/// if x is not Hermitian within tol_h).
SpectralEdge extremal_eigs(const CMat& x, const ToleranceConfig& cfg = ToleranceConfig{});

/// Checked inverse: requires sigma_min(x) > tol_psd * scale and verifies
/// ||x * inv - I|| <= tol_residual; throws std::domain_error otherwise.
CMat inverse_checked(const CMat& x, const ToleranceConfig& cfg = ToleranceConfig{});

/// Moore-Penrose pseudoinverse of a Hermitian PSD matrix via its
/// eigendecomposition; eigenvalues below rel_rank_tol * lambda_max are
/// treated as zero.
CMat pinv_psd(const CMat& x, double rel_rank_tol = 1e-12);

/// Pseudoinverse square root of a Hermitian PSD matrix (same rank rule).
CMat pinv_sqrt_psd(const CMat& x, double rel_rank_tol = 1e-12);

/// Orthogonal projector onto the kernel of a Hermitian PSD matrix.
CMat kernel_projector_psd(const CMat& x, double rel_rank_tol = 1e-12);

}  // namespace modframe
