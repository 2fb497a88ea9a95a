#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "modframe/certify.hpp"
#include "modframe/generate.hpp"
#include "oracles.hpp"

using namespace modframe;

namespace {

const ToleranceConfig kTol = ToleranceConfig::defaults();

// One node of weight 2 at omega = 1 with the identity family over
// A = M_1(C): the controlled frame operator is exactly 2 I.
FrameInstance scalar_times_two() {
  const ModuleSpace space = ModuleSpace::free_module(1, 1);
  const ModuleOperator id = ModuleOperator::identity(space);
  const MeasureDiscretization measure = discrete_measure({QuadratureNode{1.0, 2.0}});
  return FrameInstance{space,           measure, OperatorFamily::from_table({id}),
                       id,              id,      std::nullopt,
                       kTol};
}

// Mismatched controllers around a non-normal family operator make the
// assembled frame operator non-self-adjoint.
FrameInstance skew_instance() {
  const ModuleSpace space = ModuleSpace::free_module(2, 1);
  CMat lam(2, 2), c(2, 2), cp(2, 2);
  lam << 1, 1, 0, 1;
  c << 1, 0, 0, 2;
  cp << 2, 1, 1, 2;
  const MeasureDiscretization measure = discrete_measure({QuadratureNode{1.0, 1.0}});
  return FrameInstance{space,
                       measure,
                       OperatorFamily::from_table({ModuleOperator(space, space, lam)}),
                       ModuleOperator(space, space, c),
                       ModuleOperator(space, space, cp),
                       std::nullopt,
                       kTol};
}

bool has_note(const BoundsReport& rep, const std::string& needle) {
  for (const auto& note : rep.notes) {
    if (note.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("certification bands around a frozen spectrum") {
  const FrameInstance inst = scalar_times_two();

  CHECK(certify_upper(inst, 2.0, kTol).certified());
  CHECK(certify_upper(inst, 2.0 - 1e-10, kTol).certified());
  CHECK(certify_upper(inst, 2.0 - 1e-8, kTol).undetermined());
  CHECK(certify_upper(inst, 2.0 - 1e-3, kTol).falsified());
  CHECK(certify_upper(inst, 5.0, kTol).certified());

  CHECK(certify_lower_k(inst, 2.0, kTol).certified());
  CHECK(certify_lower_k(inst, 2.0 + 1e-10, kTol).certified());
  CHECK(certify_lower_k(inst, 2.0 + 1e-8, kTol).undetermined());
  CHECK(certify_lower_k(inst, 2.0 + 1e-3, kTol).falsified());
  CHECK(certify_lower_k(inst, 0.5, kTol).certified());

  CHECK_THROWS_AS(certify_upper(inst, -1.0, kTol), std::invalid_argument);
  CHECK_THROWS_AS(certify_lower_k(inst, -1.0, kTol), std::invalid_argument);

  const BoundsReport rep = optimal_bounds(inst, kTol);
  CHECK(std::abs(rep.b_opt - 2.0) < 1e-12);
  REQUIRE(rep.a_opt.has_value());
  CHECK(std::abs(*rep.a_opt - 2.0) < 1e-12);
  REQUIRE(rep.b_opt_k.has_value());
  CHECK(std::abs(*rep.b_opt_k - 2.0) < 1e-12);
  CHECK(rep.tight);
  CHECK(rep.exact_path);
  CHECK(rep.frame_class == FrameClass::ControlledGFrame);
  CHECK(rep.notes.empty());
}

TEST_CASE("reference example bounds hit alpha beta / 3") {
  const FrameInstance inst = worked_example_instance(1.0, 1.0);
  const BoundsReport rep = optimal_bounds(inst, kTol);
  const double third = 1.0 / 3.0;
  CHECK(std::abs(rep.b_opt - third) < 1e-12);
  REQUIRE(rep.a_opt.has_value());
  CHECK(std::abs(*rep.a_opt - third) < 1e-12);
  REQUIRE(rep.b_opt_k.has_value());
  CHECK(std::abs(*rep.b_opt_k - third) < 1e-12);
  CHECK(rep.tight);
  CHECK_FALSE(rep.exact_path);
  CHECK(rep.frame_class == FrameClass::ControlledKgFrame);

  // alpha beta = 3 rescales the optimal constants to exactly 1.
  const BoundsReport unit = optimal_bounds(worked_example_instance(3.0, 1.0), kTol);
  CHECK(std::abs(unit.b_opt - 1.0) < 1e-12);
  REQUIRE(unit.a_opt.has_value());
  CHECK(std::abs(*unit.a_opt - 1.0) < 1e-12);
  CHECK(unit.tight);
}

TEST_CASE("dropping K falsifies every positive lower constant") {
  FrameInstance inst = worked_example_instance(1.0, 1.0);
  inst.k.reset();
  for (double a : {1e-3, 1e-2, 0.1, 1.0}) {
    CHECK(certify_lower_k(inst, a, kTol).falsified());
  }

  const Verdict v = certify_lower_k(inst, 0.5, kTol);
  REQUIRE(v.falsified());
  REQUIRE(v.witness.has_value());
  const CVec& w = *v.witness;
  REQUIRE(w.size() == 4);
  // The first basis direction with b = c = 0 is found before the last.
  CHECK(std::abs(w(0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(w(1) == Complex(0.0, 0.0));
  CHECK(w(2) == Complex(0.0, 0.0));
  CHECK(std::abs(w(3)) < 1e-12);
  REQUIRE(v.violation.has_value());
  CHECK(std::abs(max_abs(*v.violation) - 0.5) < 1e-12);
}

TEST_CASE("zero K makes the lower inequality vacuous") {
  FrameInstance inst = worked_example_instance(1.0, 1.0);
  inst.k = ModuleOperator::zero(inst.space, inst.space);
  const BoundsReport rep = optimal_bounds(inst, kTol);
  CHECK(std::abs(rep.b_opt - 1.0 / 3.0) < 1e-12);
  CHECK_FALSE(rep.a_opt.has_value());
  CHECK_FALSE(rep.b_opt_k.has_value());
  CHECK(has_note(rep, "vacuous"));
  CHECK(rep.frame_class == FrameClass::ControlledKgFrame);
}

TEST_CASE("non-self-adjoint frame operators are reported, not hidden") {
  const FrameInstance inst = skew_instance();
  const AssembledFrame asmb = assemble_frame_operator(inst);
  CHECK(asmb.herm_deviation_rel > 1e-3);

  const BoundsReport rep = optimal_bounds(inst, kTol);
  CHECK(has_note(rep, "not self-adjoint"));
  CHECK(has_note(rep, "not positive"));
  CHECK(rep.frame_class == FrameClass::BesselOnly);
  CHECK_FALSE(rep.a_opt.has_value());

  // b_opt equals the top eigenvalue of the Hermitian part, cross-checked
  // with the closed-form 2x2 eigenvalues.
  const CMat hs = herm(asmb.controlled.matrix());
  CHECK(std::abs(rep.b_opt - oracles::herm2_eigs(hs).second) < 1e-12);
}

TEST_CASE("douglas_check recovers a planted factorization") {
  const ModuleSpace space = ModuleSpace::free_module(2, 1);
  CMat tm(2, 2), xm(2, 2);
  tm << 3, 1, 1, 2;
  xm << 0.5, 0.2, -0.3, 1.1;
  const ModuleOperator t(space, space, tm);
  const ModuleOperator x0(space, space, xm);
  const ModuleOperator t_prime = t.compose(x0);

  const DouglasResult r = douglas_check(t, t_prime, kTol);
  CHECK(r.in_range);
  CHECK(r.residual <= 1e-10 * std::max(1.0, opnorm(t_prime.matrix())));
  REQUIRE(r.solution.has_value());
  CHECK(max_abs((t.compose(*r.solution).matrix() - t_prime.matrix()).eval()) < 1e-10);
  // T is invertible, so the solution is unique and lambda_min = ||X0||^2.
  CHECK(max_abs((r.solution->matrix() - xm).eval()) < 1e-10);
  REQUIRE(r.lambda_min.has_value());
  const double expected = opnorm(xm) * opnorm(xm);
  CHECK(std::abs(*r.lambda_min - expected) < 1e-6 * std::max(1.0, expected));

  // Minimality: the certified majorization fails just below lambda_min.
  const CMat pp = herm((t_prime.matrix() * t_prime.matrix().adjoint()).eval());
  const CMat tt = herm((t.matrix() * t.matrix().adjoint()).eval());
  CHECK(loewner_leq(pp, CMat(*r.lambda_min * tt), kTol).certified());
  CHECK_FALSE(loewner_leq(pp, CMat(*r.lambda_min * (1.0 - 1e-3) * tt), kTol).certified());
}

TEST_CASE("douglas_check refuses ranges that stick out") {
  const ModuleSpace space = ModuleSpace::free_module(2, 1);
  CMat proj(2, 2);
  proj << 1, 0, 0, 0;
  const ModuleOperator p(space, space, proj);
  const ModuleOperator id = ModuleOperator::identity(space);

  const DouglasResult outward = douglas_check(p, id, kTol);
  CHECK_FALSE(outward.in_range);
  CHECK(outward.residual > 0.1);
  CHECK_FALSE(outward.solution.has_value());
  CHECK_FALSE(outward.lambda_min.has_value());

  const DouglasResult inward = douglas_check(id, p, kTol);
  CHECK(inward.in_range);
  REQUIRE(inward.lambda_min.has_value());
  CHECK(std::abs(*inward.lambda_min - 1.0) < 1e-6);

  const ModuleSpace other = ModuleSpace::free_module(3, 1);
  CHECK_THROWS_AS(douglas_check(id, ModuleOperator::identity(other), kTol),
                  std::invalid_argument);
}

TEST_CASE("optimal constants sit on the certification boundary") {
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    const FrameInstance inst = generate_free_commuting(seed);
    const BoundsReport rep = optimal_bounds(inst, kTol);
    REQUIRE(rep.a_opt.has_value());

    CHECK(certify_upper(inst, rep.b_opt * (1.0 + 1e-3), kTol).certified());
    CHECK(certify_upper(inst, rep.b_opt * (1.0 - 1e-3), kTol).falsified());
    CHECK(certify_lower_k(inst, *rep.a_opt * (1.0 - 1e-3), kTol).certified());
    CHECK(certify_lower_k(inst, *rep.a_opt * (1.0 + 1e-3), kTol).falsified());
  }
}

TEST_CASE("bisection over the certifiers agrees with the spectral path") {
  std::vector<FrameInstance> cases;
  cases.push_back(worked_example_instance(1.0, 1.0));
  cases.push_back(generate_free_commuting(1));
  cases.push_back(generate_free_commuting(2));
  for (const auto& inst : cases) {
    const BoundsReport rep = optimal_bounds(inst, kTol);
    REQUIRE(rep.a_opt.has_value());
    const double b_bis = oracles::bisect_upper(inst, kTol);
    const double a_bis = oracles::bisect_lower(inst, kTol);
    CHECK(std::abs(b_bis - rep.b_opt) < 1e-6 * std::max(1.0, rep.b_opt));
    CHECK(std::abs(a_bis - *rep.a_opt) < 1e-6 * std::max(1.0, *rep.a_opt));
  }
}

TEST_CASE("controller_spectral_data reads off the spectral interval") {
  const FrameInstance inst = worked_example_instance(2.5, 1.0);
  const ControllerSpectralData data = controller_spectral_data(inst.c, kTol);
  CHECK(data.m == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(data.m_upper == doctest::Approx(2.5).epsilon(1e-12));

  // Singular (the mask projector) and non-Hermitian operators are refused.
  CHECK_THROWS_AS(controller_spectral_data(inst.effective_k(), kTol),
                  std::domain_error);
  const ModuleSpace space = ModuleSpace::free_module(2, 1);
  CMat upper(2, 2);
  upper << 1, 1, 0, 1;
  CHECK_THROWS_AS(controller_spectral_data(ModuleOperator(space, space, upper), kTol),
                  std::domain_error);
  CHECK_THROWS_AS(
      controller_spectral_data(ModuleOperator::zero(space, ModuleSpace::free_module(1, 1)),
                               kTol),
      std::invalid_argument);
}
