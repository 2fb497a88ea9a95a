#include "modframe/generate.hpp"

#include <stdexcept>

namespace modframe {

const char* to_string(Profile p) {
  switch (p) {
    case Profile::FreeCommuting: return "free_commuting";
    case Profile::PatternExampleLike: return "pattern_example_like";
    case Profile::OrthogonalRanges: return "orthogonal_ranges";
    case Profile::RangeIncluded: return "range_included";
    case Profile::NoncommutingAdversarial: return "noncommuting_adversarial";
  }
  return "free_commuting";
}

Profile profile_from_string(const std::string& s) {
  if (s == "free_commuting") return Profile::FreeCommuting;
  if (s == "pattern_example_like") return Profile::PatternExampleLike;
  if (s == "orthogonal_ranges") return Profile::OrthogonalRanges;
  if (s == "range_included") return Profile::RangeIncluded;
  if (s == "noncommuting_adversarial") return Profile::NoncommutingAdversarial;
  throw std::invalid_argument("unknown profile '" + s + "'");
}

namespace {

enum class KStyle { PolyPd, PolyTruncated, Generic };

// Everything is drawn in flattened coordinates around one PSD seed P:
// controllers and family moduli are polynomials in P, so every
// commutation hypothesis holds by construction, and the family keeps a
// free unitary factor q(P) U that the moduli |Lambda|^2 = q(P)^2 cannot
// see. The draw order below is part of the format: changing it changes
// every seeded instance.
FrameInstance build_free(std::uint64_t seed, const char* salt, int algebra_dim, int rank,
                         KStyle k_style, bool degenerate_family) {
  if (algebra_dim < 1 || rank < 1)
    throw std::invalid_argument("generate: algebra_dim and rank must be >= 1");
  Rng rng(seed ^ fnv1a64(salt));
  const ModuleSpace space = ModuleSpace::free_module(rank, algebra_dim);
  const Eigen::Index m = static_cast<Eigen::Index>(algebra_dim) * rank;
  const CMat p = rng.psd_matrix(m, 0.1);
  const CMat ident = CMat::Identity(m, m);

  const CMat c_flat = rng.uniform(0.4, 1.2) * ident + rng.uniform(0.4, 1.2) * p;
  const CMat cp_flat = rng.uniform(0.4, 1.2) * ident + rng.uniform(0.4, 1.2) * p;

  // Spectral projector onto the lower half of the seed's spectrum; it
  // commutes with every polynomial in P.
  Eigen::SelfAdjointEigenSolver<CMat> es(p);
  const Eigen::Index half = std::max<Eigen::Index>(1, std::min<Eigen::Index>(m - 1, m / 2));
  const CMat lower_proj = es.eigenvectors().leftCols(half) *
                          es.eigenvectors().leftCols(half).adjoint();

  const MeasureDiscretization measure =
      discretize_interval(0.0, 1.0, QuadratureRule::GaussLegendre, 4);
  std::vector<ModuleOperator> ops;
  ops.reserve(measure.nodes.size());
  for (std::size_t node = 0; node < measure.nodes.size(); ++node) {
    CMat q = rng.uniform(0.3, 1.0) * ident + rng.uniform(0.3, 1.0) * p;
    if (degenerate_family) q = q * lower_proj;
    const CMat u = rng.unitary_matrix(m);
    ops.push_back(from_flattened(space, space, q * u));
  }

  CMat k_flat;
  switch (k_style) {
    case KStyle::PolyPd:
      k_flat = rng.uniform(0.3, 1.0) * ident + rng.uniform(0.3, 1.0) * p;
      break;
    case KStyle::PolyTruncated:
      k_flat = (rng.uniform(0.3, 1.0) * ident + rng.uniform(0.3, 1.0) * p) * lower_proj;
      break;
    case KStyle::Generic: {
      k_flat = rng.gaussian_matrix(m, m);
      const double nrm = opnorm(k_flat);
      if (nrm > 0) k_flat /= nrm;
      break;
    }
  }

  return FrameInstance{space,
                       measure,
                       OperatorFamily::from_table(std::move(ops)),
                       from_flattened(space, space, c_flat),
                       from_flattened(space, space, cp_flat),
                       from_flattened(space, space, k_flat),
                       ToleranceConfig::defaults()};
}

FrameInstance build_noncommuting(std::uint64_t seed) {
  Rng rng(seed ^ fnv1a64("noncommuting_adversarial"));
  const ModuleSpace space = ModuleSpace::free_module(2, 2);
  const Eigen::Index m = 4;
  const CMat c_flat = rng.psd_matrix(m, 0.3);
  const CMat cp_flat = rng.psd_matrix(m, 0.3);
  const MeasureDiscretization measure =
      discretize_interval(0.0, 1.0, QuadratureRule::GaussLegendre, 4);
  std::vector<ModuleOperator> ops;
  ops.reserve(measure.nodes.size());
  for (std::size_t node = 0; node < measure.nodes.size(); ++node) {
    CMat g = rng.gaussian_matrix(m, m);
    const double nrm = opnorm(g);
    if (nrm > 0) g *= (0.5 + rng.uniform()) / nrm;
    ops.push_back(from_flattened(space, space, g));
  }
  CMat k_flat = rng.gaussian_matrix(m, m);
  const double nrm = opnorm(k_flat);
  if (nrm > 0) k_flat /= nrm;
  return FrameInstance{space,
                       measure,
                       OperatorFamily::from_table(std::move(ops)),
                       from_flattened(space, space, c_flat),
                       from_flattened(space, space, cp_flat),
                       from_flattened(space, space, k_flat),
                       ToleranceConfig::defaults()};
}

}  // namespace

FrameInstance generate_free_commuting(std::uint64_t seed, const FreeCommutingOptions& opts) {
  return build_free(seed, "free_commuting", opts.algebra_dim, opts.rank,
                    opts.commuting_k ? KStyle::PolyPd : KStyle::Generic,
                    opts.degenerate_family);
}

FrameInstance generate_instance(std::uint64_t seed, Profile profile) {
  switch (profile) {
    case Profile::FreeCommuting:
      return generate_free_commuting(seed);
    case Profile::PatternExampleLike: {
      Rng rng(seed ^ fnv1a64("pattern_example_like"));
      const double alpha = rng.uniform(0.5, 2.0);
      const double beta = rng.uniform(0.5, 2.0);
      return worked_example_instance(alpha, beta);
    }
    case Profile::OrthogonalRanges:
      return build_free(seed, "orthogonal_ranges", 2, 2, KStyle::PolyTruncated, false);
    case Profile::RangeIncluded:
      return build_free(seed, "range_included", 2, 2, KStyle::PolyTruncated, false);
    case Profile::NoncommutingAdversarial:
      return build_noncommuting(seed);
  }
  throw std::invalid_argument("generate_instance: unknown profile");
}

ModuleOperator derive_orthogonal_partner(const ModuleOperator& k1, std::uint64_t seed) {
  if (k1.domain() != k1.codomain())
    throw std::invalid_argument("derive_orthogonal_partner: endomorphism required");
  const bool free = k1.domain().is_free();
  const CMat g = free ? flatten(k1) : k1.matrix();
  Eigen::JacobiSVD<CMat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > 1e-12 * std::max(smax, 1.0)) ++r;
  const Eigen::Index m = g.rows();
  if (r >= m) return ModuleOperator::zero(k1.domain(), k1.domain());

  Rng rng(seed ^ fnv1a64("orthogonal_partner"));
  CMat core = rng.gaussian_matrix(m - r, m - r);
  const double nrm = opnorm(core);
  if (nrm > 0) core *= 0.5 * std::max(smax, 1.0) / nrm;
  const CMat g2 = svd.matrixU().rightCols(m - r) * core *
                  svd.matrixV().rightCols(m - r).adjoint();
  if (free) return from_flattened(k1.domain(), k1.domain(), g2);

  // On a pattern the left singular complement need not stay inside the
  // module maps; keep the result honest by checking.
  const ModuleOperator k2(k1.domain(), k1.domain(), g2);
  if (!verify_a_linear(k2).certified())
    throw std::domain_error(
        "derive_orthogonal_partner: the complement is not module-linear on this pattern");
  return k2;
}

}  // namespace modframe
