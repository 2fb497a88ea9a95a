#include "modframe/algebra.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace modframe {

ToleranceConfig ToleranceConfig::defaults() {
  ToleranceConfig cfg;
  if (const char* env = std::getenv("MODFRAME_TOL_SCALE")) {
    char* end = nullptr;
    double factor = std::strtod(env, &end);
    if (end == env || !std::isfinite(factor) || factor <= 0.0)
      throw std::invalid_argument("MODFRAME_TOL_SCALE: not a positive number: " +
                                  std::string(env));
    cfg = cfg.scaled(factor);
  }
  cfg.validate();
  return cfg;
}

ToleranceConfig ToleranceConfig::scaled(double factor) const {
  ToleranceConfig out = *this;
  out.tol_h *= factor;
  out.tol_psd *= factor;
  out.tol_falsify *= factor;
  out.tol_residual *= factor;
  return out;
}

void ToleranceConfig::validate() const {
  auto bad = [](double t) { return !std::isfinite(t) || t < 0.0; };
  if (bad(tol_h) || bad(tol_psd) || bad(tol_falsify) || bad(tol_residual))
    throw std::invalid_argument("ToleranceConfig: tolerances must be finite and >= 0");
  if (tol_falsify <= tol_psd)
    throw std::invalid_argument(
        "ToleranceConfig: tol_falsify must exceed tol_psd or every verdict "
        "band collapses");
}

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Certified: return "Certified";
    case CertStatus::Falsified: return "Falsified";
    case CertStatus::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

Verdict certified_verdict(double margin, std::string detail) {
  Verdict v;
  v.status = CertStatus::Certified;
  v.margin = margin;
  v.detail = std::move(detail);
  return v;
}

Verdict falsified_verdict(double margin, CVec witness, std::string detail) {
  Verdict v;
  v.status = CertStatus::Falsified;
  v.margin = margin;
  v.witness = std::move(witness);
  v.detail = std::move(detail);
  return v;
}

Verdict undetermined_verdict(double margin, std::string detail) {
  Verdict v;
  v.status = CertStatus::Undetermined;
  v.margin = margin;
  v.detail = std::move(detail);
  return v;
}

Verdict combine_verdicts(const Verdict& a, const Verdict& b) {
  const Verdict& worse = (a.margin <= b.margin) ? a : b;
  if (a.falsified() || b.falsified()) {
    const Verdict& f = a.falsified() && (!b.falsified() || a.margin <= b.margin) ? a : b;
    return f;
  }
  if (a.certified() && b.certified()) {
    Verdict v = certified_verdict(std::min(a.margin, b.margin));
    v.detail = worse.detail;
    return v;
  }
  Verdict v = undetermined_verdict(std::min(a.margin, b.margin));
  v.detail = a.undetermined() ? a.detail : b.detail;
  return v;
}

double opnorm(const CMat& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(x);
  return svd.singularValues()(0);
}

double scale_of(const CMat& x) { return std::max(1.0, opnorm(x)); }

double hermitian_deviation(const CMat& x) { return max_abs(x - x.adjoint()); }

bool is_hermitian(const CMat& x, double tol_h_rel) {
  if (x.rows() != x.cols()) return false;
  return hermitian_deviation(x) <= tol_h_rel * scale_of(x);
}

Verdict is_psd(const CMat& x, const ToleranceConfig& cfg) {
  if (x.rows() != x.cols())
    throw std::invalid_argument("is_psd: matrix must be square");
  const double scale = scale_of(x);
  const double dev = hermitian_deviation(x);
  const CMat h = herm(x);
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success)
    throw std::domain_error("is_psd: eigensolver failed to converge");
  const double lmin = es.eigenvalues()(0);

  if (lmin < -cfg.tol_falsify * scale) {
    Verdict v = falsified_verdict(lmin, es.eigenvectors().col(0),
                                  "negative direction of the Hermitian part");
    CMat viol(1, 1);
    viol(0, 0) = lmin;
    v.violation = viol;
    return v;
  }
  if (dev <= cfg.tol_h * scale && lmin >= -cfg.tol_psd * scale)
    return certified_verdict(lmin);
  if (dev > cfg.tol_h * scale)
    return undetermined_verdict(lmin, "Hermitian deviation " + std::to_string(dev) +
                                          " exceeds tol_h * scale");
  return undetermined_verdict(lmin, "lambda_min in the undecided band");
}

Verdict loewner_leq(const CMat& x, const CMat& y, const ToleranceConfig& cfg) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw std::invalid_argument("loewner_leq: matrices must be square of equal size");
  if (!is_hermitian(x, cfg.tol_h))
    throw std::invalid_argument("loewner_leq: left operand is not Hermitian");
  if (!is_hermitian(y, cfg.tol_h))
    throw std::invalid_argument("loewner_leq: right operand is not Hermitian");
  return is_psd(y - x, cfg);
}

CMat sqrt_psd(const CMat& x, const ToleranceConfig& cfg) {
  Verdict v = is_psd(x, cfg);
  if (!v.certified())
    throw std::domain_error(std::string("sqrt_psd: input not certified PSD (") +
                            to_string(v.status) + ", margin " +
                            std::to_string(v.margin) + ")");
  Eigen::SelfAdjointEigenSolver<CMat> es(herm(x));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

SpectralEdge extremal_eigs(const CMat& x, const ToleranceConfig& cfg) {
  if (x.rows() != x.cols())
    throw std::invalid_argument("extremal_eigs: matrix must be square");
  if (!is_hermitian(x, cfg.tol_h))
    throw std::invalid_argument("extremal_eigs: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(herm(x));
  SpectralEdge edge;
  const auto last = x.rows() - 1;
  edge.lambda_min = es.eigenvalues()(0);
  edge.lambda_max = es.eigenvalues()(last);
  edge.vec_min = es.eigenvectors().col(0);
  edge.vec_max = es.eigenvectors().col(last);
  return edge;
}

CMat inverse_checked(const CMat& x, const ToleranceConfig& cfg) {
  if (x.rows() != x.cols())
    throw std::invalid_argument("inverse_checked: matrix must be square");
  Eigen::JacobiSVD<CMat> svd(x);
  const double smin = svd.singularValues()(x.rows() - 1);
  if (!(smin > cfg.tol_psd * scale_of(x)))
    throw std::domain_error("inverse_checked: smallest singular value " +
                            std::to_string(smin) + " is below tolerance");
  CMat inv = x.fullPivLu().inverse();
  const double residual = opnorm(x * inv - CMat::Identity(x.rows(), x.cols()));
  if (!(residual <= cfg.tol_residual))
    throw std::domain_error("inverse_checked: residual " + std::to_string(residual) +
                            " exceeds tol_residual");
  return inv;
}

namespace {

CMat psd_spectral_apply(const CMat& x, double rel_rank_tol,
                        double (*fn)(double, double)) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm(x));
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd d(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d(i) = fn(es.eigenvalues()(i), rel_rank_tol * std::max(lmax, 1e-300));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMat pinv_psd(const CMat& x, double rel_rank_tol) {
  return psd_spectral_apply(x, rel_rank_tol,
                            [](double l, double cut) { return l > cut ? 1.0 / l : 0.0; });
}

CMat pinv_sqrt_psd(const CMat& x, double rel_rank_tol) {
  return psd_spectral_apply(x, rel_rank_tol, [](double l, double cut) {
    return l > cut ? 1.0 / std::sqrt(l) : 0.0;
  });
}

CMat kernel_projector_psd(const CMat& x, double rel_rank_tol) {
  return psd_spectral_apply(x, rel_rank_tol,
                            [](double l, double cut) { return l > cut ? 0.0 : 1.0; });
}

}  // namespace modframe
