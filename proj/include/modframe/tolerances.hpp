#pragma once

namespace modframe {

/// Certification tolerances. All thresholds are applied relative to
/// max(1, operator norm) of the object under test, so the defaults are
/// meaningful for desk-scale spectra around 1. MODFRAME_TOL_SCALE in the
/// environment multiplies every member of defaults().
struct ToleranceConfig {
  double tol_h = 1e-10;        ///< Hermitian deviation allowed before certifying
  double tol_psd = 1e-9;       ///< eigenvalue slack below zero still certified
  double tol_falsify = 1e-6;   ///< violation required before falsifying
  double tol_residual = 1e-8;  ///< linear-solve residual accepted as exact

  static ToleranceConfig defaults();
  ToleranceConfig scaled(double factor) const;
  void validate() const;  // throws std::invalid_argument on nonsense
};

}  // namespace modframe
