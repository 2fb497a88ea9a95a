#include "modframe/forms.hpp"

#include <string>

namespace modframe {

SesquilinearForm::SesquilinearForm(ModuleSpace s, CMat g) : space(std::move(s)), gram(std::move(g)) {
  const Eigen::Index expect =
      static_cast<Eigen::Index>(space.ambient_dim()) * space.algebra_dim();
  if (gram.rows() != expect || gram.cols() != expect)
    throw std::invalid_argument("SesquilinearForm: gram must be " + std::to_string(expect) +
                                " square");
}

CMat SesquilinearForm::block(int i, int j) const {
  const int n = space.algebra_dim();
  return gram.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n);
}

CMat SesquilinearForm::evaluate(const CVec& f, const CVec& g) const {
  if (f.size() != space.ambient_dim() || g.size() != space.ambient_dim())
    throw std::invalid_argument("SesquilinearForm::evaluate: coordinate length mismatch");
  const int n = space.algebra_dim();
  CMat acc = CMat::Zero(n, n);
  for (int i = 0; i < space.ambient_dim(); ++i) {
    if (f(i) == Complex(0.0)) continue;
    for (int j = 0; j < space.ambient_dim(); ++j)
      acc += f(i) * std::conj(g(j)) * block(i, j);
  }
  return acc;
}

namespace {

SesquilinearForm tabulate(const ModuleSpace& space,
                          const std::vector<ModuleVector>& images_left,
                          const std::vector<ModuleVector>& images_right) {
  const int n = space.algebra_dim();
  const int dim = space.ambient_dim();
  CMat gram(static_cast<Eigen::Index>(dim) * n, static_cast<Eigen::Index>(dim) * n);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      gram.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n) =
          inner_product(images_left[i], images_right[j]);
  return SesquilinearForm(space, gram);
}

}  // namespace

SesquilinearForm inner_form(const ModuleSpace& space) {
  std::vector<ModuleVector> basis;
  basis.reserve(space.ambient_dim());
  for (int i = 0; i < space.ambient_dim(); ++i) basis.push_back(coordinate_basis(space, i));
  return tabulate(space, basis, basis);
}

SesquilinearForm k_relative_form(const ModuleOperator& k, const ToleranceConfig& cfg) {
  if (k.domain() != k.codomain())
    throw std::invalid_argument("k_relative_form: K must be an endomorphism");
  const ModuleOperator k_adj = adjoint(k, cfg);
  const ModuleSpace& space = k.domain();
  std::vector<ModuleVector> images;
  images.reserve(space.ambient_dim());
  for (int i = 0; i < space.ambient_dim(); ++i)
    images.push_back(k_adj.apply(coordinate_basis(space, i)));
  return tabulate(space, images, images);
}

SesquilinearForm scale_form(const SesquilinearForm& q, double factor) {
  return SesquilinearForm(q.space, factor * q.gram);
}

namespace {

struct Candidate {
  CVec coords;
  const char* origin;
};

}  // namespace

Verdict form_compare(const SesquilinearForm& q1, const SesquilinearForm& q2,
                     const ToleranceConfig& cfg, std::uint64_t seed, int samples) {
  if (q1.space != q2.space)
    throw std::invalid_argument("form_compare: forms live on different spaces");
  const ModuleSpace& space = q1.space;
  const int dim = space.ambient_dim();
  const CMat delta = q2.gram - q1.gram;
  const double scale = std::max({1.0, opnorm(q1.gram), opnorm(q2.gram)});

  // Stage 1: exact equality.
  if (max_abs(delta) <= 1e-15 * scale)
    return certified_verdict(0.0, "forms coincide");

  // Stage 2: block positivity certifies the quantified inequality.
  const Verdict block = is_psd(delta, cfg);
  if (block.certified()) return certified_verdict(block.margin, "block Gram certificate");

  // Stage 3: hunt for a module element violating the algebra-valued
  // inequality. Block non-positivity alone is not a witness.
  std::vector<Candidate> candidates;
  for (int i = 0; i < dim; ++i)
    candidates.push_back({coordinate_basis(space, i).coords, "coordinate basis"});
  Rng rng(seed);
  for (int s = 0; s < samples; ++s)
    candidates.push_back({random_module_vector(space, rng).coords, "random"});
  if (block.witness) {
    // Fold the most negative block direction into a module element: the
    // flat vector has one n-block per coordinate; its dominant left factor
    // is a reasonable scalar profile over the coordinates.
    const CVec& v = *block.witness;
    const int n = space.algebra_dim();
    CMat shaped(dim, n);
    for (int i = 0; i < dim; ++i)
      for (int r = 0; r < n; ++r) shaped(i, r) = v(static_cast<Eigen::Index>(i) * n + r);
    Eigen::JacobiSVD<CMat> svd(shaped, Eigen::ComputeThinU);
    candidates.push_back({svd.matrixU().col(0), "block eigenvector"});
    candidates.push_back({svd.matrixU().col(0).conjugate(), "block eigenvector conj"});
  }

  double best = 0.0;
  std::optional<CVec> best_coords;
  CMat best_violation;
  for (const auto& cand : candidates) {
    ModuleVector f(space, cand.coords);
    const double nrm = module_norm(f);
    if (nrm <= 1e-12) continue;
    const CVec unit = cand.coords / nrm;
    const CMat value = herm(q2.evaluate(unit, unit) - q1.evaluate(unit, unit));
    Eigen::SelfAdjointEigenSolver<CMat> es(value);
    const double lmin = es.eigenvalues()(0);
    if (lmin < best) {
      best = lmin;
      best_coords = unit;
      best_violation = value;
    }
  }

  if (best_coords && best <= -cfg.tol_falsify * scale) {
    Verdict v = falsified_verdict(best, *best_coords, "module element violating the inequality");
    v.violation = best_violation;
    return v;
  }
  return undetermined_verdict(block.margin,
                              "no block certificate and no witness above tol_falsify");
}

}  // namespace modframe
