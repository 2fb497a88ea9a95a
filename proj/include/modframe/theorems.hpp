#pragma once

#include <map>

#include "modframe/certify.hpp"

namespace modframe {

enum class TheoremStatus { Certified, Falsified, Undetermined, HypothesesNotMet };

const char* to_string(TheoremStatus s);

struct HypothesisResult {
  std::string name;
  bool ok = false;
  double value = 0.0;      ///< measured quantity (commutator norm, lambda_min, ...)
  double threshold = 0.0;  ///< what it was compared against
};

/// Outcome of checking one theorem's hypotheses and conclusion on a
/// concrete instance. The conclusion verdict is only meaningful when the
/// hypotheses hold; overall() folds that in.
struct TheoremReport {
  std::string theorem_id;
  std::vector<HypothesisResult> hypotheses;
  std::map<std::string, double> constants;  ///< claimed constants, by name
  Verdict conclusion;
  std::optional<BoundsReport> bounds;  ///< optimal bounds alongside the claim
  std::string notes;
  /// Set when two supposedly equivalent internal routes disagree; a bug
  /// indicator, reported as such and never as a theorem verdict.
  std::optional<std::string> internal_error;

  bool hypotheses_ok() const;
  TheoremStatus overall() const;
};

/// Every verifier follows the same contract: check hypotheses numerically
/// (commutation and orthogonality at 1e-8 relative, positivity via the
/// certify module), then certify the claimed constants with certify_upper
/// / certify_lower_k rather than trusting the formulas.

/// A certified plain controlled g-frame is a controlled K-g-frame for any
/// adjointable K, with constants (A ||K||^-2, B).
TheoremReport verify_gframe_implies_kgframe(const FrameInstance& inst,
                                            const ModuleOperator& k,
                                            const ToleranceConfig& cfg);

/// If the family is Bessel with bound B and K commutes with both
/// controllers, the composed family {Lambda_omega K} is Bessel with bound
/// ||K||^2 B. The commutation hypothesis is essential and checked.
TheoremReport verify_bessel_compose(const FrameInstance& inst, const ModuleOperator& k,
                                    const ToleranceConfig& cfg);

/// The lower frame inequality at constant A holds iff A K K* <= S_cc in
/// the Loewner order; both routes are evaluated and must agree.
TheoremReport verify_lower_iff_inequality(const FrameInstance& inst,
                                          const ModuleOperator& k, double a,
                                          const ToleranceConfig& cfg);

/// For a certified controlled g-frame and K* commuting with the
/// controllers, {Lambda_omega K*} is a controlled K-g-frame with
/// constants (A, B ||K||^2).
TheoremReport verify_compose_k_adjoint(const FrameInstance& inst, const ModuleOperator& k,
                                       const ToleranceConfig& cfg);

/// S_cc = C' S C always (identity checked to 1e-12); when C' C commutes
/// with the family the instance reduces to the single controller (C'C, I)
/// with the same integral form and transferred constants.
TheoremReport verify_single_controller_reduction(const FrameInstance& inst,
                                                 const ToleranceConfig& cfg);

/// Same reduction with controllers ((C'C)^{1/2}, (C'C)^{1/2}).
TheoremReport verify_sqrt_reduction(const FrameInstance& inst, const ToleranceConfig& cfg);

/// Controlled and plain bounds transfer both ways: forward constants
/// (m m' A, M M' B) from the plain bounds, reverse constants
/// (A_c ||(CC')^{1/2}||^-2, B_c ||(CC')^{-1/2}||^2) from the controlled
/// ones. Needs the standing commutation hypotheses plus [K, C] = [K, C'] = 0.
TheoremReport verify_controlled_iff_plain(const FrameInstance& inst,
                                          const ModuleOperator& k,
                                          const ToleranceConfig& cfg);

/// If the instance is a controlled K-g-frame and R(T) subset R(K) with
/// majorization constant m (Douglas), it is a controlled T-g-frame with
/// constants (A / m, B).
TheoremReport verify_range_inclusion_transfer(const FrameInstance& inst,
                                              const ModuleOperator& k,
                                              const ModuleOperator& t,
                                              const ToleranceConfig& cfg);

/// For K1, K2 with mutually orthogonal ranges (both K2* K1 = 0 and
/// K1 K2* = 0 are checked), alpha K1 + beta K2 keeps the frame property
/// with lower constant A1 A2 / (2 (|alpha|^2 A2 + |beta|^2 A1)) and upper
/// (B1 + B2) / 2, and K1 K2 keeps it with (A1 ||K2*||^-2, B1).
TheoremReport verify_combine_orthogonal(const FrameInstance& inst,
                                        const ModuleOperator& k1,
                                        const ModuleOperator& k2, Complex alpha,
                                        Complex beta, const ToleranceConfig& cfg);

/// Any constant-term-free polynomial Theta = p(K) has R(Theta) subset
/// R(K), so the frame property transfers to Theta with the Douglas
/// constant; poly holds coefficients c_1..c_m of K^1..K^m.
TheoremReport verify_subalgebra_corollary(const FrameInstance& inst,
                                          const ModuleOperator& k,
                                          const std::vector<double>& poly,
                                          const ToleranceConfig& cfg);

/// Tags accepted by the CLI, in canonical order.
std::vector<std::string> theorem_tags();

/// Dispatch by tag; auxiliary operators a tag needs beyond the instance
/// (K when absent, T, K2, polynomial coefficients, the probe constant A)
/// are derived deterministically from the seed. Unknown tags are a
/// std::invalid_argument.
TheoremReport run_theorem_by_tag(const std::string& tag, const FrameInstance& inst,
                                 std::uint64_t seed, const ToleranceConfig& cfg);

}  // namespace modframe
