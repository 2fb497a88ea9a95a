#include <cmath>
#include <cstddef>

#include "doctest.h"
#include "modframe/certify.hpp"
#include "modframe/forms.hpp"
#include "modframe/frame.hpp"
#include "modframe/generate.hpp"

using namespace modframe;

namespace {

double rel_gap(const CMat& a, const CMat& b) {
  const double scale = std::max(1.0, max_abs(a));
  return max_abs((a - b).eval()) / scale;
}

// Reference assembly: same integrand, opposite node order, explicit
// matrix products instead of operator composition.
CMat brute_force_controlled(const FrameInstance& inst) {
  const auto ops = inst.family.materialize(inst.measure);
  const int dim = inst.space.ambient_dim();
  CMat acc = CMat::Zero(dim, dim);
  for (int k = static_cast<int>(ops.size()) - 1; k >= 0; --k) {
    const auto& op = ops[static_cast<std::size_t>(k)];
    const CMat lam_adj = adjoint(op, inst.tol).matrix();
    acc += inst.measure.nodes[static_cast<std::size_t>(k)].weight *
           (inst.c_prime.matrix() * lam_adj * op.matrix() * inst.c.matrix());
  }
  return acc;
}

L2Section random_section(const FrameInstance& inst, Rng& rng) {
  L2Section y;
  for (std::size_t k = 0; k < inst.measure.nodes.size(); ++k) {
    y.blocks.push_back(random_module_vector(inst.family.op_codomain(), rng));
  }
  return y;
}

}  // namespace

TEST_CASE("assembly matches a brute-force reverse-order oracle") {
  const FrameInstance instances[] = {
      worked_example_instance(1.25, 0.75),
      generate_free_commuting(11),
      generate_instance(5, Profile::NoncommutingAdversarial),
  };
  for (const auto& inst : instances) {
    const AssembledFrame asmb = assemble_frame_operator(inst);
    CHECK(rel_gap(asmb.controlled.matrix(), brute_force_controlled(inst)) < 1e-12);

    FrameInstance plain = inst;
    plain.c = ModuleOperator::identity(inst.space);
    plain.c_prime = ModuleOperator::identity(inst.space);
    CHECK(rel_gap(asmb.plain.matrix(), brute_force_controlled(plain)) < 1e-12);
  }
}

TEST_CASE("controlled operator factors as C' S C") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const FrameInstance inst = generate_instance(seed, Profile::NoncommutingAdversarial);
    const AssembledFrame asmb = assemble_frame_operator(inst);
    const CMat factored =
        inst.c_prime.matrix() * asmb.plain.matrix() * inst.c.matrix();
    CHECK(rel_gap(asmb.controlled.matrix(), factored) < 1e-12);
  }
}

TEST_CASE("worked example form is a scalar multiple of the K-relative form") {
  for (auto [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.75}}) {
    const FrameInstance inst = worked_example_instance(alpha, beta);
    double moment = 0.0;
    for (const auto& node : inst.measure.nodes) {
      moment += node.weight * node.point * node.point;
    }
    const double factor = alpha * beta * moment;

    const SesquilinearForm q = integral_form(inst);
    const SesquilinearForm qk = k_relative_form(inst.effective_k(), inst.tol);
    CHECK(max_abs((q.gram - factor * qk.gram).eval()) < 1e-14);
    // Two-point Gauss-Legendre integrates omega^2 exactly.
    CHECK(std::abs(moment - 1.0 / 3.0) < 1e-15);
  }
}

TEST_CASE("synthesis and analysis are adjoint across the section pairing") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const FrameInstance inst = generate_free_commuting(seed);
    Rng rng(seed ^ 0x7a1ceULL);
    const L2Section y = random_section(inst, rng);
    const ModuleVector x = random_module_vector(inst.space, rng);

    const CMat lhs = inner_product(synthesis_apply(inst, y), x);
    const CMat rhs = l2_inner(inst, y, analysis_apply(inst, x));
    CHECK(rel_gap(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("synthesis after analysis reproduces the controlled operator") {
  FrameInstance cases[] = {generate_free_commuting(1), generate_free_commuting(4),
                           worked_example_instance(1.5, 0.5)};
  for (const auto& inst : cases) {
    const AssembledFrame asmb = assemble_frame_operator(inst);
    Rng rng(0xabcdULL);
    for (int trial = 0; trial < 5; ++trial) {
      const ModuleVector x = random_module_vector(inst.space, rng);
      const ModuleVector via_ops = synthesis_apply(inst, analysis_apply(inst, x));
      const ModuleVector direct = asmb.controlled.apply(x);
      const double scale = std::max(1.0, module_norm(direct));
      CHECK((via_ops.coords - direct.coords).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
  }
}

TEST_CASE("synthesis rejects non-commuting controllers") {
  const FrameInstance inst = generate_instance(4, Profile::NoncommutingAdversarial);
  L2Section y;
  for (std::size_t k = 0; k < inst.measure.nodes.size(); ++k) {
    y.blocks.push_back(zero_vector(inst.family.op_codomain()));
  }
  CHECK_THROWS_AS(synthesis_apply(inst, y), std::domain_error);
  CHECK_THROWS_AS(analysis_apply(inst, zero_vector(inst.space)), std::domain_error);
}

TEST_CASE("section pairing validates block count") {
  const FrameInstance inst = generate_free_commuting(6);
  L2Section y;
  y.blocks.push_back(zero_vector(inst.family.op_codomain()));
  CHECK_THROWS_AS(l2_inner(inst, y, y), std::invalid_argument);
  CHECK_THROWS_AS(synthesis_apply(inst, y), std::invalid_argument);
}

TEST_CASE("synthesis norm is achieved and bounds every section") {
  const FrameInstance inst = generate_free_commuting(9);
  const SynthesisNorm sn = synthesis_norm(inst);
  REQUIRE(sn.norm > 0.0);

  const double achiever_l2 =
      std::sqrt(opnorm(l2_inner(inst, sn.achiever, sn.achiever)));
  CHECK(std::abs(achiever_l2 - 1.0) < 1e-8);

  const double achieved = module_norm(synthesis_apply(inst, sn.achiever));
  CHECK(std::abs(achieved - sn.norm) < 1e-8 * std::max(1.0, sn.norm));

  Rng rng(0x515eULL);
  for (int trial = 0; trial < 20; ++trial) {
    const L2Section y = random_section(inst, rng);
    const double y_l2 = std::sqrt(opnorm(l2_inner(inst, y, y)));
    const double ty = module_norm(synthesis_apply(inst, y));
    CHECK(ty <= sn.norm * y_l2 * (1.0 + 1e-8) + 1e-12);
  }

  // With commuting controllers T T* is the controlled frame operator, so
  // ||T||^2 is the optimal Bessel constant.
  const BoundsReport bounds = optimal_bounds(inst, inst.tol);
  CHECK(std::abs(sn.norm * sn.norm - bounds.b_opt) <
        1e-6 * std::max(1.0, bounds.b_opt));

  CHECK_THROWS_AS(synthesis_norm(worked_example_instance(1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("scalar profile materializes to the node table") {
  const FrameInstance inst =
      worked_example_instance(1.0, 1.0, QuadratureRule::GaussLegendre, 4);
  REQUIRE(inst.family.kind == OperatorFamily::Kind::ScalarProfile);
  const CMat base = inst.family.base->matrix();

  const auto ops = inst.family.materialize(inst.measure);
  REQUIRE(ops.size() == inst.measure.nodes.size());
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const CMat expected = inst.measure.nodes[k].point * base;
    CHECK(max_abs((ops[k].matrix() - expected).eval()) < 1e-15);
  }

  // A table family built from the materialized operators reproduces them.
  const OperatorFamily table = OperatorFamily::from_table(ops);
  const auto again = table.materialize(inst.measure);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    CHECK(max_abs((again[k].matrix() - ops[k].matrix()).eval()) == 0.0);
  }

  auto short_table = ops;
  short_table.pop_back();
  CHECK_THROWS_AS(OperatorFamily::from_table(short_table).materialize(inst.measure),
                  std::invalid_argument);
  CHECK_THROWS_AS(OperatorFamily::from_table({}), std::invalid_argument);
  CHECK_THROWS_AS(OperatorFamily::scalar_profile(*inst.family.base, {}),
                  std::invalid_argument);
}

TEST_CASE("validate_instance accepts the reference example and rejects mutations") {
  const FrameInstance good = worked_example_instance(1.0, 2.0);
  CHECK_NOTHROW(validate_instance(good));

  SUBCASE("non-Hermitian controller") {
    FrameInstance bad = good;
    CMat m = CMat::Identity(4, 4);
    m(0, 1) = 0.5;
    bad.c = ModuleOperator(bad.space, bad.space, m);
    CHECK_THROWS_AS(validate_instance(bad), std::domain_error);
  }

  SUBCASE("singular controller") {
    FrameInstance bad = good;
    bad.c = ModuleOperator(bad.space, bad.space, good.effective_k().matrix());
    CHECK_THROWS_AS(validate_instance(bad), std::domain_error);
  }

  SUBCASE("controller that is not module-linear") {
    FrameInstance bad = good;
    CMat swap = CMat::Identity(4, 4);
    swap(1, 1) = 0.0;
    swap(2, 2) = 0.0;
    swap(1, 2) = 1.0;
    swap(2, 1) = 1.0;
    // Positive definite, so only the module-linearity check can object.
    bad.c_prime = ModuleOperator(bad.space, bad.space,
                                 CMat(CMat::Identity(4, 4) + 0.5 * swap));
    CHECK_THROWS_AS(validate_instance(bad), std::domain_error);
  }

  SUBCASE("family living on a different space") {
    FrameInstance bad = good;
    const ModuleSpace other = ModuleSpace::free_module(2, 2);
    bad.family = OperatorFamily::scalar_profile(ModuleOperator::identity(other),
                                                {0.0, 1.0});
    CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  }

  SUBCASE("K that fails adjointability on the pattern") {
    FrameInstance bad = good;
    CMat m = CMat::Identity(4, 4);
    m(1, 0) = 1.0;  // module-linear on this pattern, but not adjointable
    bad.k = ModuleOperator(bad.space, bad.space, m);
    CHECK_THROWS_AS(validate_instance(bad), NotAdjointableError);
  }

  SUBCASE("K with mismatched codomain") {
    FrameInstance bad = good;
    bad.k = ModuleOperator::zero(bad.space, ModuleSpace::free_module(1, 2));
    CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  }
}

TEST_CASE("assembly diagnostics separate commuting and adversarial data") {
  const FrameInstance example = worked_example_instance(1.0, 1.0);
  const AssembledFrame a1 = assemble_frame_operator(example);
  CHECK(a1.commuting);
  CHECK(a1.comm_controllers_rel < 1e-12);
  CHECK(a1.max_commutator_rel <= 1e-8);
  CHECK(a1.herm_deviation_rel < 1e-12);
  CHECK(a1.positivity.certified());

  const AssembledFrame a2 = assemble_frame_operator(generate_free_commuting(3));
  CHECK(a2.commuting);
  CHECK(a2.positivity.certified());

  const AssembledFrame a3 =
      assemble_frame_operator(generate_instance(2, Profile::NoncommutingAdversarial));
  CHECK_FALSE(a3.commuting);
  CHECK(a3.max_commutator_rel > 1e-8);
}

TEST_CASE("effective_k defaults to the identity") {
  FrameInstance inst = worked_example_instance(1.0, 1.0);
  CHECK(inst.has_nontrivial_k());
  inst.k.reset();
  CHECK_FALSE(inst.has_nontrivial_k());
  const ModuleOperator k = inst.effective_k();
  CHECK(max_abs((k.matrix() - CMat::Identity(4, 4)).eval()) == 0.0);
}
