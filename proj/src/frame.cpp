#include "modframe/frame.hpp"

#include <cmath>
#include <string>

namespace modframe {

OperatorFamily OperatorFamily::from_table(std::vector<ModuleOperator> ops) {
  if (ops.empty())
    throw std::invalid_argument("OperatorFamily: table must have at least one operator");
  for (const auto& op : ops)
    if (op.domain() != ops.front().domain() || op.codomain() != ops.front().codomain())
      throw std::invalid_argument("OperatorFamily: table operators must share spaces");
  OperatorFamily f;
  f.kind = Kind::Table;
  f.table = std::move(ops);
  return f;
}

OperatorFamily OperatorFamily::scalar_profile(ModuleOperator base_op,
                                              std::vector<double> coeffs) {
  if (coeffs.empty())
    throw std::invalid_argument("OperatorFamily: profile needs at least one coefficient");
  OperatorFamily f;
  f.kind = Kind::ScalarProfile;
  f.base = std::move(base_op);
  f.coeffs = std::move(coeffs);
  return f;
}

const ModuleSpace& OperatorFamily::op_domain() const {
  return kind == Kind::Table ? table.front().domain() : base->domain();
}

const ModuleSpace& OperatorFamily::op_codomain() const {
  return kind == Kind::Table ? table.front().codomain() : base->codomain();
}

std::vector<ModuleOperator> OperatorFamily::materialize(
    const MeasureDiscretization& measure) const {
  if (kind == Kind::Table) {
    if (table.size() != measure.nodes.size())
      throw std::invalid_argument("OperatorFamily: table has " +
                                  std::to_string(table.size()) + " operators for " +
                                  std::to_string(measure.nodes.size()) + " nodes");
    return table;
  }
  std::vector<ModuleOperator> ops;
  ops.reserve(measure.nodes.size());
  for (const auto& node : measure.nodes) {
    double value = 0.0;
    for (size_t p = coeffs.size(); p-- > 0;) value = value * node.point + coeffs[p];
    ops.push_back(base->scaled(value));
  }
  return ops;
}

ModuleOperator FrameInstance::effective_k() const {
  return k ? *k : ModuleOperator::identity(space);
}

bool FrameInstance::has_nontrivial_k() const {
  if (!k) return false;
  const CMat& m = k->matrix();
  return max_abs(m - CMat::Identity(m.rows(), m.cols())) > 1e-14 * scale_of(m);
}

namespace {

void require_gl_plus(const ModuleOperator& c, const char* name, const ToleranceConfig& cfg) {
  if (c.domain() != c.codomain())
    throw std::invalid_argument(std::string(name) + ": controller must be an endomorphism");
  const CMat& m = c.matrix();
  if (!is_hermitian(m, cfg.tol_h))
    throw std::domain_error(std::string(name) + ": controller is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(herm(m));
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (!(lmin > cfg.tol_psd * std::max(1.0, lmax)))
    throw std::domain_error(std::string(name) +
                            ": controller is not positive definite (lambda_min " +
                            std::to_string(lmin) + ")");
  if (!(lmax / lmin < 1e14))
    throw std::domain_error(std::string(name) + ": controller condition number too large");
}

void require_a_linear(const ModuleOperator& op, const char* name,
                      const ToleranceConfig& cfg) {
  const Verdict v = verify_a_linear(op, cfg);
  if (!v.certified())
    throw std::domain_error(std::string(name) + ": operator is not module-linear (" +
                            to_string(v.status) + ")");
}

}  // namespace

void validate_instance(const FrameInstance& inst) {
  inst.tol.validate();
  if (inst.family.op_domain() != inst.space)
    throw std::invalid_argument("FrameInstance: family domain differs from the space");
  if (inst.c.domain() != inst.space || inst.c_prime.domain() != inst.space)
    throw std::invalid_argument("FrameInstance: controllers must act on the space");
  require_gl_plus(inst.c, "C", inst.tol);
  require_gl_plus(inst.c_prime, "C'", inst.tol);
  require_a_linear(inst.c, "C", inst.tol);
  require_a_linear(inst.c_prime, "C'", inst.tol);
  if (inst.k) {
    if (inst.k->domain() != inst.space || inst.k->codomain() != inst.space)
      throw std::invalid_argument("FrameInstance: K must be an endomorphism of the space");
    require_a_linear(*inst.k, "K", inst.tol);
    adjoint(*inst.k, inst.tol);  // throws NotAdjointableError if not
  }
  const auto ops = inst.family.materialize(inst.measure);
  for (size_t i = 0; i < ops.size(); ++i) {
    const std::string name = "Lambda[" + std::to_string(i) + "]";
    require_a_linear(ops[i], name.c_str(), inst.tol);
    adjoint(ops[i], inst.tol);
  }
}

namespace {

double commutator_rel(const CMat& x, const CMat& y) {
  const double ref = std::max(1.0, opnorm(x) * opnorm(y));
  return opnorm(x * y - y * x) / ref;
}

}  // namespace

AssembledFrame assemble_frame_operator(const FrameInstance& inst) {
  const auto ops = inst.family.materialize(inst.measure);
  const int dim = inst.space.ambient_dim();
  const CMat& c = inst.c.matrix();
  const CMat& cp = inst.c_prime.matrix();

  CMat plain = CMat::Zero(dim, dim);
  CMat controlled = CMat::Zero(dim, dim);
  const double comm_ctrl = commutator_rel(c, cp);
  double comm_family = 0.0;
  // Node order is fixed; assembly is deterministic by summation order.
  for (size_t k = 0; k < ops.size(); ++k) {
    const double w = inst.measure.nodes[k].weight;
    const CMat gram = ops[k].matrix().adjoint() * ops[k].matrix();
    plain += w * gram;
    controlled += w * (cp * gram * c);
    comm_family = std::max({comm_family, commutator_rel(c, gram), commutator_rel(cp, gram)});
  }
  const double worst_comm = std::max(comm_ctrl, comm_family);

  AssembledFrame out{
      ModuleOperator(inst.space, inst.space, controlled),
      ModuleOperator(inst.space, inst.space, plain),
      comm_ctrl,
      comm_family,
      worst_comm,
      worst_comm <= 1e-8,
      hermitian_deviation(controlled) / scale_of(controlled),
      {}};
  if (out.commuting) {
    out.positivity = inst.space.is_free()
                         ? flatten_positive_test(out.controlled, inst.tol)
                         : is_psd(herm(controlled), inst.tol);
  } else {
    out.positivity = undetermined_verdict(
        0.0, "controllers do not commute with the family; positivity not claimed");
  }
  return out;
}

SesquilinearForm integral_form(const FrameInstance& inst) {
  const auto ops = inst.family.materialize(inst.measure);
  const int dim = inst.space.ambient_dim();
  const int n = inst.space.algebra_dim();
  std::vector<ModuleVector> left, right;
  left.reserve(dim);
  right.reserve(dim);
  CMat gram = CMat::Zero(static_cast<Eigen::Index>(dim) * n,
                         static_cast<Eigen::Index>(dim) * n);
  for (size_t k = 0; k < ops.size(); ++k) {
    const double w = inst.measure.nodes[k].weight;
    left.clear();
    right.clear();
    for (int i = 0; i < dim; ++i) {
      const ModuleVector b = coordinate_basis(inst.space, i);
      left.push_back(ops[k].apply(inst.c.apply(b)));
      right.push_back(ops[k].apply(inst.c_prime.apply(b)));
    }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        gram.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n,
                   n) += w * inner_product(left[i], right[j]);
  }
  return SesquilinearForm(inst.space, gram);
}

CMat l2_inner(const FrameInstance& inst, const L2Section& y, const L2Section& z) {
  if (y.blocks.size() != inst.measure.nodes.size() ||
      z.blocks.size() != inst.measure.nodes.size())
    throw std::invalid_argument("l2_inner: section length differs from the node count");
  const int n = inst.space.algebra_dim();
  CMat acc = CMat::Zero(n, n);
  for (size_t k = 0; k < y.blocks.size(); ++k)
    acc += inst.measure.nodes[k].weight * inner_product(y.blocks[k], z.blocks[k]);
  return acc;
}

namespace {

// (C C')^{1/2}; requires commuting controllers so the product is PSD.
CMat controller_product_sqrt(const FrameInstance& inst) {
  const CMat prod = inst.c.matrix() * inst.c_prime.matrix();
  if (hermitian_deviation(prod) > inst.tol.tol_h * scale_of(prod) * 10)
    throw std::domain_error(
        "synthesis: C C' is not Hermitian (controllers do not commute), "
        "(C C')^{1/2} is undefined");
  return sqrt_psd(herm(prod), inst.tol);
}

}  // namespace

ModuleVector synthesis_apply(const FrameInstance& inst, const L2Section& y) {
  if (y.blocks.size() != inst.measure.nodes.size())
    throw std::invalid_argument("synthesis_apply: section length differs from node count");
  const auto ops = inst.family.materialize(inst.measure);
  const CMat r = controller_product_sqrt(inst);
  CVec acc = CVec::Zero(inst.space.ambient_dim());
  for (size_t k = 0; k < ops.size(); ++k) {
    if (y.blocks[k].space != ops[k].codomain())
      throw std::invalid_argument("synthesis_apply: section block in the wrong space");
    acc += inst.measure.nodes[k].weight *
           (r * (ops[k].matrix().adjoint() * y.blocks[k].coords));
  }
  return ModuleVector(inst.space, acc);
}

L2Section analysis_apply(const FrameInstance& inst, const ModuleVector& x) {
  if (x.space != inst.space)
    throw std::invalid_argument("analysis_apply: vector not in the space");
  const auto ops = inst.family.materialize(inst.measure);
  const CMat prod = inst.c_prime.matrix() * inst.c.matrix();
  if (hermitian_deviation(prod) > inst.tol.tol_h * scale_of(prod) * 10)
    throw std::domain_error("analysis: (C' C)^{1/2} is undefined for non-commuting controllers");
  const CMat r = sqrt_psd(herm(prod), inst.tol);
  L2Section out;
  out.blocks.reserve(ops.size());
  for (const auto& op : ops)
    out.blocks.push_back(ModuleVector(op.codomain(), op.matrix() * (r * x.coords)));
  return out;
}

SynthesisNorm synthesis_norm(const FrameInstance& inst) {
  if (!inst.space.is_free())
    throw std::invalid_argument("synthesis_norm: exact path needs a free module");
  const auto ops = inst.family.materialize(inst.measure);
  const ModuleSpace& range = inst.family.op_codomain();
  if (!range.is_free())
    throw std::invalid_argument("synthesis_norm: range must be a free module");
  const CMat r = controller_product_sqrt(inst);
  const ModuleOperator r_op(inst.space, inst.space, r);

  const int n = inst.space.algebra_dim();
  const int rows_per_node = n * range.rank();
  const int cols = n * inst.space.rank();
  std::vector<size_t> active;
  for (size_t k = 0; k < ops.size(); ++k)
    if (inst.measure.nodes[k].weight > 0.0) active.push_back(k);
  if (active.empty()) {
    SynthesisNorm out;
    out.norm = 0.0;
    out.achiever.blocks.assign(ops.size(), zero_vector(range));
    return out;
  }

  // Flatten the synthesis map over the weight-orthonormalized section
  // basis e_{k,i} / sqrt(w_k); its largest singular value is the module
  // operator norm.
  CMat f(static_cast<Eigen::Index>(active.size()) * rows_per_node, cols);
  for (size_t a = 0; a < active.size(); ++a) {
    const size_t k = active[a];
    const double sw = std::sqrt(inst.measure.nodes[k].weight);
    const CMat block = flatten(r_op.compose(adjoint_unchecked(ops[k])));
    f.block(static_cast<Eigen::Index>(a) * rows_per_node, 0, rows_per_node, cols) =
        sw * block;
  }
  Eigen::JacobiSVD<CMat> svd(f, Eigen::ComputeThinU);
  SynthesisNorm out;
  out.norm = svd.singularValues()(0);

  // Left singular vector -> rank-one section achieving the norm, undoing
  // the sqrt(w) normalization per node.
  const CVec u = svd.matrixU().col(0);
  out.achiever.blocks.assign(ops.size(), zero_vector(range));
  for (size_t a = 0; a < active.size(); ++a) {
    const size_t k = active[a];
    const double sw = std::sqrt(inst.measure.nodes[k].weight);
    ModuleVector block = zero_vector(range);
    for (int i = 0; i < range.rank(); ++i) {
      CMat piece = CMat::Zero(n, n);
      for (int row = 0; row < n; ++row)
        piece(0, row) =
            std::conj(u(static_cast<Eigen::Index>(a) * rows_per_node + i * n + row)) / sw;
      set_free_block(block, i, piece);
    }
    out.achiever.blocks[k] = block;
  }
  return out;
}

FrameInstance worked_example_instance(double alpha, double beta, QuadratureRule rule, int n) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("worked_example_instance: alpha, beta must be positive");
  const ModuleSpace space =
      ModuleSpace::pattern_module(2, 4, {{0, 0}, {0, 1}, {1, 1}, {1, 3}});
  // The mask keeps the two middle pattern coordinates (the shared column).
  CMat mask = CMat::Zero(4, 4);
  mask(1, 1) = 1.0;
  mask(2, 2) = 1.0;

  return FrameInstance{
      space,
      discretize_interval(0.0, 1.0, rule, n),
      OperatorFamily::scalar_profile(ModuleOperator(space, space, mask), {0.0, 1.0}),
      ModuleOperator(space, space, alpha * CMat::Identity(4, 4)),
      ModuleOperator(space, space, beta * CMat::Identity(4, 4)),
      ModuleOperator(space, space, mask),
      ToleranceConfig::defaults()};
}

}  // namespace modframe
