#pragma once

#include "modframe/frame.hpp"

namespace modframe {

enum class FrameClass { ControlledKgFrame, ControlledGFrame, BesselOnly, NotBessel };

const char* to_string(FrameClass c);

struct BoundsReport {
  double b_opt = 0.0;                ///< least certified Bessel constant
  std::optional<double> a_opt;       ///< greatest certified K-relative lower constant
  std::optional<double> b_opt_k;     ///< least upper constant against <K*f, K*f>
  bool tight = false;                ///< a_opt present and |a_opt - b_opt| <= 1e-8 max(1, b_opt)
  FrameClass frame_class = FrameClass::BesselOnly;
  bool exact_path = false;           ///< free-module spectral path (vs pattern feasible path)
  std::vector<std::string> notes;
};

/// Certify sum_k w_k <Lambda_k C f, Lambda_k C' f> <= B <f, f> for all f.
Verdict certify_upper(const FrameInstance& inst, double b, const ToleranceConfig& cfg);

/// Certify A <K* f, K* f> <= the integral form, against the given target
/// operator (defaults to the instance's K, identity if absent).
Verdict certify_lower_k(const FrameInstance& inst, double a, const ToleranceConfig& cfg);
Verdict certify_lower_k(const FrameInstance& inst, double a, const ModuleOperator& target_k,
                        const ToleranceConfig& cfg);

/// Optimal constants. Free modules take the exact spectral path on the
/// flattened frame operator (the lower constant gated by a Douglas range
/// check); pattern spaces take the block-certified feasible path with any
/// uncertified gaps recorded in notes.
BoundsReport optimal_bounds(const FrameInstance& inst, const ToleranceConfig& cfg);

struct DouglasResult {
  bool in_range = false;  ///< residual <= tol_residual * ||T'||
  double residual = 0.0;  ///< ||T X - T'|| of the least-squares solution
  std::optional<ModuleOperator> solution;  ///< X with T X = T' when in range
  /// Least lambda with T' T'* <= lambda T T*, certified by bisection over
  /// loewner_leq; present when in_range.
  std::optional<double> lambda_min;
};

/// The finite-dimensional Douglas equivalences for maps into a common
/// codomain: range inclusion R(T') subset R(T), majorization
/// T' T'* <= lambda T T*, and solvability of T X = T'.
DouglasResult douglas_check(const ModuleOperator& t, const ModuleOperator& t_prime,
                            const ToleranceConfig& cfg);

struct ControllerSpectralData {
  double m = 0.0;  ///< lambda_min
  double m_upper = 0.0;  ///< lambda_max
};

/// Spectral interval [m, M] of a positive invertible controller; throws
/// std::domain_error if the operator is not Hermitian positive definite.
ControllerSpectralData controller_spectral_data(const ModuleOperator& c,
                                                const ToleranceConfig& cfg);

}  // namespace modframe
