#include "modframe/certify.hpp"

#include <cmath>
#include <string>

namespace modframe {

const char* to_string(FrameClass c) {
  switch (c) {
    case FrameClass::ControlledKgFrame: return "ControlledKgFrame";
    case FrameClass::ControlledGFrame: return "ControlledGFrame";
    case FrameClass::BesselOnly: return "BesselOnly";
    case FrameClass::NotBessel: return "NotBessel";
  }
  return "BesselOnly";
}

namespace {

constexpr std::uint64_t kFormSeed = 0x5eedf0a1'2b3c4d5eULL;

// Flattened K K* for a module-linear endomorphism; flatten is a
// *-anti-homomorphism, so this is flatten(K)* flatten(K).
CMat flat_kk_star(const ModuleOperator& k) {
  const CMat g = flatten(k);
  return g.adjoint() * g;
}

Verdict free_certify_upper(const FrameInstance& inst, double b, const ToleranceConfig& cfg) {
  const AssembledFrame asmb = assemble_frame_operator(inst);
  const ModuleOperator gap =
      ModuleOperator::identity(inst.space).scaled(b) - asmb.controlled;
  return flatten_positive_test(gap, cfg);
}

Verdict pattern_certify_upper(const FrameInstance& inst, double b,
                              const ToleranceConfig& cfg) {
  return form_compare(integral_form(inst), scale_form(inner_form(inst.space), b), cfg,
                      kFormSeed);
}

Verdict free_certify_lower(const FrameInstance& inst, double a, const ModuleOperator& k,
                           const ToleranceConfig& cfg) {
  const AssembledFrame asmb = assemble_frame_operator(inst);
  const CMat gs = flatten(asmb.controlled);
  const CMat gap = gs - a * flat_kk_star(k);
  const Verdict flat = is_psd(gap, cfg);
  if (!flat.falsified()) return flat;
  // Same rank-one unflattening as flatten_positive_test.
  const int n = inst.space.algebra_dim();
  const int d = inst.space.rank();
  ModuleVector x = zero_vector(inst.space);
  for (int i = 0; i < d; ++i) {
    CMat block = CMat::Zero(n, n);
    for (int r = 0; r < n; ++r) block(0, r) = std::conj((*flat.witness)(i * n + r));
    set_free_block(x, i, block);
  }
  Verdict out = falsified_verdict(flat.margin, x.coords,
                                  "module witness violating the lower inequality");
  const ModuleOperator k_adj = adjoint_unchecked(k);
  out.violation =
      herm(inner_product(asmb.controlled.apply(x), x) -
           a * inner_product(k_adj.apply(x), k_adj.apply(x)));
  return out;
}

Verdict pattern_certify_lower(const FrameInstance& inst, double a, const ModuleOperator& k,
                              const ToleranceConfig& cfg) {
  return form_compare(scale_form(k_relative_form(k, cfg), a), integral_form(inst), cfg,
                      kFormSeed);
}

}  // namespace

Verdict certify_upper(const FrameInstance& inst, double b, const ToleranceConfig& cfg) {
  if (!(b >= 0.0) || !std::isfinite(b))
    throw std::invalid_argument("certify_upper: B must be finite and >= 0");
  return inst.space.is_free() ? free_certify_upper(inst, b, cfg)
                              : pattern_certify_upper(inst, b, cfg);
}

Verdict certify_lower_k(const FrameInstance& inst, double a, const ToleranceConfig& cfg) {
  return certify_lower_k(inst, a, inst.effective_k(), cfg);
}

Verdict certify_lower_k(const FrameInstance& inst, double a, const ModuleOperator& target_k,
                        const ToleranceConfig& cfg) {
  if (!(a >= 0.0) || !std::isfinite(a))
    throw std::invalid_argument("certify_lower_k: A must be finite and >= 0");
  if (target_k.domain() != inst.space || target_k.codomain() != inst.space)
    throw std::invalid_argument("certify_lower_k: K must be an endomorphism of the space");
  return inst.space.is_free() ? free_certify_lower(inst, a, target_k, cfg)
                              : pattern_certify_lower(inst, a, target_k, cfg);
}

namespace {

// Matrix-level Douglas data; the solution matrix is left in `solution`.
struct DouglasCore {
  bool in_range = false;
  double residual = 0.0;
  CMat solution;
  std::optional<double> lambda_min;
};

DouglasCore douglas_core(const CMat& tm, const CMat& pm, const ToleranceConfig& cfg) {
  DouglasCore out;
  // Minimum-norm least squares solve of T X = T'.
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(tm);
  out.solution = cod.solve(pm);
  out.residual = opnorm(tm * out.solution - pm);
  const double ref = opnorm(pm);
  out.in_range = out.residual <= cfg.tol_residual * ref + 1e-300;
  if (!out.in_range) return out;

  // Least lambda with T' T'* <= lambda T T*, by bisection over the
  // Loewner certifier. The solution norm bounds it from above.
  const CMat tt = herm(tm * tm.adjoint());
  const CMat pp = herm(pm * pm.adjoint());
  const double upper_guess = opnorm(out.solution);
  double hi = std::max(upper_guess * upper_guess * 1.25 + 1.0, 1.0);
  bool ok = false;
  for (int grow = 0; grow < 60; ++grow) {
    if (loewner_leq(pp, hi * tt, cfg).certified()) {
      ok = true;
      break;
    }
    hi *= 2.0;
  }
  if (!ok) return out;  // in range but no certified majorization: leave absent
  if (loewner_leq(pp, CMat::Zero(tt.rows(), tt.cols()), cfg).certified()) {
    out.lambda_min = 0.0;
    return out;
  }
  double lo = 0.0;
  for (int step = 0; step < 60; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (loewner_leq(pp, mid * tt, cfg).certified())
      hi = mid;
    else
      lo = mid;
  }
  out.lambda_min = hi;
  return out;
}

}  // namespace

DouglasResult douglas_check(const ModuleOperator& t, const ModuleOperator& t_prime,
                            const ToleranceConfig& cfg) {
  if (t.codomain() != t_prime.codomain())
    throw std::invalid_argument("douglas_check: operators must share the codomain");
  DouglasCore core = douglas_core(t.matrix(), t_prime.matrix(), cfg);
  DouglasResult out;
  out.in_range = core.in_range;
  out.residual = core.residual;
  out.lambda_min = core.lambda_min;
  if (core.in_range)
    out.solution = ModuleOperator(t_prime.domain(), t.domain(), core.solution);
  return out;
}

ControllerSpectralData controller_spectral_data(const ModuleOperator& c,
                                                const ToleranceConfig& cfg) {
  if (c.domain() != c.codomain())
    throw std::invalid_argument("controller_spectral_data: endomorphism required");
  const CMat m = c.domain().is_free() ? flatten(c) : c.matrix();
  if (!is_hermitian(m, cfg.tol_h))
    throw std::domain_error("controller_spectral_data: controller is not Hermitian");
  SpectralEdge edge = extremal_eigs(m, cfg);
  if (!(edge.lambda_min > cfg.tol_psd * std::max(1.0, edge.lambda_max)))
    throw std::domain_error("controller_spectral_data: controller is not positive definite");
  return ControllerSpectralData{edge.lambda_min, edge.lambda_max};
}

namespace {

// Range-inclusion test for PSD matrices: R(target) subset R(reference)
// iff target annihilates ker(reference).
bool psd_range_included(const CMat& target, const CMat& reference, const ToleranceConfig& cfg) {
  const CMat pker = kernel_projector_psd(reference);
  return opnorm(target * pker) <= cfg.tol_residual * scale_of(target);
}

void free_bounds(const FrameInstance& inst, const ToleranceConfig& cfg, BoundsReport& rep) {
  const AssembledFrame asmb = assemble_frame_operator(inst);
  rep.exact_path = true;
  if (asmb.herm_deviation_rel > cfg.tol_h)
    rep.notes.push_back(
        "frame operator is not self-adjoint; bounds refer to its Hermitian part");
  const CMat gs = herm(flatten(asmb.controlled));
  Eigen::SelfAdjointEigenSolver<CMat> es(gs);
  rep.b_opt = std::max(es.eigenvalues()(es.eigenvalues().size() - 1), 0.0);

  const ModuleOperator k = inst.effective_k();
  const CMat gk = flatten(k);
  const CMat gkk = gk.adjoint() * gk;
  if (opnorm(gk) <= 1e-14) {
    rep.notes.push_back("K is zero; the lower inequality is vacuous and A_opt is undefined");
    rep.frame_class = FrameClass::ControlledKgFrame;
    return;
  }

  // A positive lower constant needs the Hermitian part itself to be PSD.
  const Verdict s_psd = is_psd(gs, cfg);
  if (!s_psd.certified()) {
    rep.notes.push_back("frame operator is not positive; no lower constant exists");
    rep.frame_class = FrameClass::BesselOnly;
    return;
  }

  // Douglas gate: a positive lower constant exists iff R(K) is inside
  // R(S^{1/2}) (in flattened coordinates).
  Eigen::SelfAdjointEigenSolver<CMat> es_half(gs);
  const CMat gs_half = es_half.eigenvectors() *
                       es_half.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                       es_half.eigenvectors().adjoint();
  const DouglasCore dg = douglas_core(gs_half, gk.adjoint(), cfg);
  if (!dg.in_range) {
    rep.notes.push_back("range check failed: R(K) is not inside R(S^{1/2}); no positive "
                        "lower constant exists");
    rep.frame_class = FrameClass::BesselOnly;
  } else {
    const CMat m = herm(gk * pinv_psd(gs) * gk.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> esm(m);
    const double top = esm.eigenvalues()(esm.eigenvalues().size() - 1);
    if (top > 1e-300) rep.a_opt = 1.0 / top;
    rep.frame_class = inst.has_nontrivial_k() ? FrameClass::ControlledKgFrame
                                              : FrameClass::ControlledGFrame;
  }

  if (inst.has_nontrivial_k()) {
    if (psd_range_included(gs, gkk, cfg)) {
      const CMat w = pinv_sqrt_psd(gkk);
      Eigen::SelfAdjointEigenSolver<CMat> esk(herm(w * gs * w));
      rep.b_opt_k = std::max(esk.eigenvalues()(esk.eigenvalues().size() - 1), 0.0);
    } else {
      rep.notes.push_back("no finite K-relative upper constant: R(S) exceeds R(K K*)");
    }
  } else {
    rep.b_opt_k = rep.b_opt;
  }
}

void pattern_bounds(const FrameInstance& inst, const ToleranceConfig& cfg,
                    BoundsReport& rep) {
  rep.exact_path = false;
  const CMat r_inner = herm(inner_form(inst.space).gram);
  const SesquilinearForm q_int = integral_form(inst);
  const double dev = hermitian_deviation(q_int.gram) / scale_of(q_int.gram);
  if (dev > cfg.tol_h)
    rep.notes.push_back("integral form is not Hermitian; bounds refer to its Hermitian part");
  const CMat t_int = herm(q_int.gram);

  if (psd_range_included(t_int, r_inner, cfg)) {
    const CMat w = pinv_sqrt_psd(r_inner);
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(w * t_int * w));
    rep.b_opt = std::max(es.eigenvalues()(es.eigenvalues().size() - 1), 0.0);
  } else {
    // Cannot happen for a genuine inner-product Gram (the integral form
    // vanishes wherever the inner form does), but stay honest if the
    // tables disagree numerically.
    Eigen::SelfAdjointEigenSolver<CMat> es(t_int);
    rep.b_opt = std::max(es.eigenvalues()(es.eigenvalues().size() - 1), 0.0);
    rep.notes.push_back("block upper bound not certified: integral form has mass outside "
                        "the inner form's range");
  }

  const ModuleOperator k = inst.effective_k();
  CMat r_k;
  try {
    r_k = herm(k_relative_form(k, cfg).gram);
  } catch (const NotAdjointableError&) {
    rep.notes.push_back("K is not adjointable on the pattern; lower bound not evaluated");
    rep.frame_class = FrameClass::BesselOnly;
    return;
  }
  if (opnorm(r_k) <= 1e-14) {
    rep.notes.push_back("K is zero; the lower inequality is vacuous and A_opt is undefined");
    rep.frame_class = FrameClass::ControlledKgFrame;
    return;
  }
  if (psd_range_included(r_k, t_int, cfg)) {
    const CMat w = pinv_sqrt_psd(t_int);
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(w * r_k * w));
    const double top = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (top > 1e-300) rep.a_opt = 1.0 / top;
    rep.frame_class = inst.has_nontrivial_k() ? FrameClass::ControlledKgFrame
                                              : FrameClass::ControlledGFrame;
  } else {
    rep.notes.push_back("range check failed: the K-relative form has mass outside the "
                        "integral form's range; no positive lower constant exists");
    rep.frame_class = FrameClass::BesselOnly;
  }

  if (psd_range_included(t_int, r_k, cfg)) {
    const CMat w = pinv_sqrt_psd(r_k);
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(w * t_int * w));
    rep.b_opt_k = std::max(es.eigenvalues()(es.eigenvalues().size() - 1), 0.0);
  }
}

}  // namespace

BoundsReport optimal_bounds(const FrameInstance& inst, const ToleranceConfig& cfg) {
  BoundsReport rep;
  if (inst.space.is_free())
    free_bounds(inst, cfg, rep);
  else
    pattern_bounds(inst, cfg, rep);

  if (rep.a_opt && !(rep.a_opt.value() > cfg.tol_psd)) {
    rep.notes.push_back("optimal lower constant is numerically zero");
    rep.a_opt.reset();
    rep.frame_class = FrameClass::BesselOnly;
  }
  rep.tight =
      rep.a_opt && std::abs(*rep.a_opt - rep.b_opt) <= 1e-8 * std::max(1.0, rep.b_opt);

  // Consistency: the reported constants must certify with a 1e-3 slack.
  if (rep.b_opt > 0 || rep.a_opt) {
    const Verdict up = certify_upper(inst, rep.b_opt * (1.0 + 1e-3), cfg);
    if (!up.certified())
      rep.notes.push_back(std::string("consistency: upper certification at B_opt*(1+1e-3) "
                                      "returned ") +
                          to_string(up.status));
    if (rep.a_opt) {
      const Verdict low = certify_lower_k(inst, *rep.a_opt * (1.0 - 1e-3), cfg);
      if (!low.certified())
        rep.notes.push_back(std::string("consistency: lower certification at A_opt*(1-1e-3) "
                                        "returned ") +
                            to_string(low.status));
    }
  }
  return rep;
}

}  // namespace modframe
