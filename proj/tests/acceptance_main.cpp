// Acceptance gate: nine end-to-end criteria, one [PASS]/[FAIL] line each.
// Exit code 0 only when every criterion holds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modframe/cli.hpp"
#include "modframe/generate.hpp"
#include "modframe/instance_io.hpp"
#include "modframe/report.hpp"
#include "modframe/theorems.hpp"
#include "oracles.hpp"

using namespace modframe;
using nlohmann::json;

namespace {

const ToleranceConfig kTol = ToleranceConfig::defaults();

struct CliRun {
  int code = 0;
  std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun run;
  run.code = run_cli(args, out, err);
  run.out = out.str();
  return run;
}

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / (stem + ".json")).string();
}

Profile enforcing_profile(const std::string& tag) {
  if (tag == "combine_orthogonal") return Profile::OrthogonalRanges;
  if (tag == "range_inclusion_transfer") return Profile::RangeIncluded;
  return Profile::FreeCommuting;
}

// ---- criterion bodies ------------------------------------------------

bool paper_example_exact(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const CliRun run = cli({"paper-example", "--alpha", "1", "--beta", "1", "--rule",
                          "gauss_legendre", "--n", "2"});
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (run.code != 0) {
    detail = "exit code " + std::to_string(run.code);
    return false;
  }
  const json j = json::parse(run.out);
  const double third = 1.0 / 3.0;
  const double b = j.at("bounds").at("b_opt").get<double>();
  const double a = j.at("bounds").at("a_opt").get<double>();
  const double bk = j.at("bounds").at("b_opt_k").get<double>();
  if (std::abs(b - third) > 1e-12 || std::abs(a - third) > 1e-12 ||
      std::abs(bk - third) > 1e-12) {
    detail = "constants off: B=" + std::to_string(b) + " A=" + std::to_string(a);
    return false;
  }
  if (!j.at("bounds").at("tight").get<bool>()) {
    detail = "bounds not flagged tight";
    return false;
  }
  if (elapsed >= 1.0) {
    detail = "took " + std::to_string(elapsed) + " s";
    return false;
  }
  return true;
}

bool paper_example_falsification(std::string& detail) {
  FrameInstance inst = worked_example_instance(1.0, 1.0);
  inst.k.reset();
  for (double a : {1e-3, 1e-2, 0.1, 1.0}) {
    const Verdict v = certify_lower_k(inst, a, kTol);
    if (!v.falsified() || !v.witness.has_value()) {
      detail = "A=" + std::to_string(a) + " not falsified with witness";
      return false;
    }
    const CVec& w = *v.witness;
    const double bc = std::sqrt(std::norm(w(1)) + std::norm(w(2)));
    if (bc > 1e-8 * w.norm()) {
      detail = "witness has mass on the b, c coordinates";
      return false;
    }
  }
  const std::string path = temp_path("acceptance_no_k");
  save_instance(inst, path);
  const CliRun run = cli({"check", path});
  std::remove(path.c_str());
  if (run.code != 1) {
    detail = "check exit code " + std::to_string(run.code) + ", expected 1";
    return false;
  }
  return true;
}

bool quadrature_convergence(std::string& detail) {
  const double third = 1.0 / 3.0;
  std::vector<double> errs;
  for (int n : {8, 16, 32, 64}) {
    const FrameInstance inst =
        worked_example_instance(1.0, 1.0, QuadratureRule::Trapezoid, n);
    errs.push_back(optimal_bounds(inst, kTol).b_opt - third);
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    if (!(errs[i + 1] > 0.0)) {
      detail = "trapezoid error not positive";
      return false;
    }
    const double ratio = errs[i] / errs[i + 1];
    if (ratio < 3.7 || ratio > 4.3) {
      detail = "ratio " + std::to_string(ratio) + " outside [3.7, 4.3]";
      return false;
    }
  }
  const double gl2 = optimal_bounds(worked_example_instance(1.0, 1.0), kTol).b_opt;
  if (std::abs(gl2 - third) > 1e-14) {
    detail = "Gauss-Legendre n=2 error " + std::to_string(std::abs(gl2 - third));
    return false;
  }
  return true;
}

bool adjointness_suite(std::string& detail) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FrameInstance inst = generate_free_commuting(seed);
    const AssembledFrame asmb = assemble_frame_operator(inst);
    Rng rng(seed ^ 0xad701ULL);
    L2Section y;
    for (std::size_t k = 0; k < inst.measure.nodes.size(); ++k)
      y.blocks.push_back(random_module_vector(inst.family.op_codomain(), rng));
    const ModuleVector x = random_module_vector(inst.space, rng);

    const CMat lhs = inner_product(synthesis_apply(inst, y), x);
    const CMat rhs = l2_inner(inst, y, analysis_apply(inst, x));
    if (max_abs((lhs - rhs).eval()) > 1e-10 * std::max(1.0, max_abs(lhs))) {
      detail = "pairing mismatch at seed " + std::to_string(seed);
      return false;
    }

    const ModuleVector composed = synthesis_apply(inst, analysis_apply(inst, x));
    const ModuleVector direct = asmb.controlled.apply(x);
    const double scale = std::max(1.0, module_norm(direct));
    if ((composed.coords - direct.coords).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      detail = "synthesis∘analysis mismatch at seed " + std::to_string(seed);
      return false;
    }
  }
  return true;
}

bool frame_operator_properties(std::string& detail) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const AssembledFrame asmb = assemble_frame_operator(generate_free_commuting(seed));
    if (asmb.herm_deviation_rel > 1e-12) {
      detail = "herm deviation " + std::to_string(asmb.herm_deviation_rel) + " at seed " +
               std::to_string(seed);
      return false;
    }
    if (!asmb.positivity.certified()) {
      detail = "positivity not certified at seed " + std::to_string(seed);
      return false;
    }
  }
  return true;
}

bool synthesis_norm_is_bessel(std::string& detail) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const FrameInstance inst = generate_free_commuting(seed);
    const double norm = synthesis_norm(inst).norm;
    const double b_opt = optimal_bounds(inst, kTol).b_opt;
    if (norm * norm < b_opt - 1e-6 || norm * norm > b_opt + 1e-6) {
      detail = "||T||^2 = " + std::to_string(norm * norm) + " vs B_opt = " +
               std::to_string(b_opt) + " at seed " + std::to_string(seed);
      return false;
    }
  }
  return true;
}

bool verifier_suite(std::string& detail) {
  for (const std::string& tag : theorem_tags()) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const FrameInstance good = generate_instance(seed, enforcing_profile(tag));
      const TheoremReport rep = run_theorem_by_tag(tag, good, seed, kTol);
      if (rep.overall() != TheoremStatus::Certified) {
        detail = tag + " seed " + std::to_string(seed) + " on enforcing profile: " +
                 to_string(rep.overall());
        if (!rep.notes.empty()) detail += " (" + rep.notes + ")";
        return false;
      }
      const FrameInstance bad = generate_instance(seed, Profile::NoncommutingAdversarial);
      const TheoremReport adv = run_theorem_by_tag(tag, bad, seed, kTol);
      if (adv.overall() != TheoremStatus::HypothesesNotMet ||
          adv.conclusion.falsified()) {
        detail = tag + " seed " + std::to_string(seed) + " on adversarial profile: " +
                 to_string(adv.overall());
        return false;
      }
    }
  }
  return true;
}

bool oracle_equivalence(std::string& detail) {
  const std::vector<std::pair<int, int>> dims = {{2, 2}, {2, 3}, {3, 2}, {1, 4}, {1, 5},
                                                 {1, 6}, {3, 1}, {2, 1}, {1, 2}, {1, 3}};
  for (int round = 0; round < 2; ++round) {
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const std::uint64_t seed = static_cast<std::uint64_t>(round) * dims.size() + i;
      FreeCommutingOptions opts;
      opts.algebra_dim = dims[i].first;
      opts.rank = dims[i].second;
      const FrameInstance inst = generate_free_commuting(seed, opts);
      const BoundsReport rep = optimal_bounds(inst, kTol);
      if (!rep.a_opt) {
        detail = "no lower constant at seed " + std::to_string(seed);
        return false;
      }
      const double b_bis = oracles::bisect_upper(inst, kTol, 40);
      const double a_bis = oracles::bisect_lower(inst, kTol, 40);
      if (std::abs(b_bis - rep.b_opt) > 1e-6 * std::max(1.0, rep.b_opt) ||
          std::abs(a_bis - *rep.a_opt) > 1e-6 * std::max(1.0, *rep.a_opt)) {
        detail = "bisection disagrees at seed " + std::to_string(seed);
        return false;
      }

      // Douglas factorization against the closed form on an invertible T.
      Rng rng(seed ^ 0xd07a5ULL);
      const int nd = inst.space.algebra_dim() * inst.space.rank();
      CVec diag(nd);
      for (int r = 0; r < nd; ++r) diag(r) = Complex(rng.uniform(0.5, 1.5), 0.0);
      const CMat g = rng.unitary_matrix(nd) * diag.asDiagonal();
      const ModuleOperator t = from_flattened(inst.space, inst.space, g);
      CMat gx = rng.gaussian_matrix(nd, nd);
      gx /= std::max(opnorm(gx), 1e-12);
      const ModuleOperator x0 = from_flattened(inst.space, inst.space, gx);
      const ModuleOperator t_prime = t.compose(x0);

      const DouglasResult dg = douglas_check(t, t_prime, kTol);
      if (!dg.in_range || !dg.lambda_min) {
        detail = "planted factorization not recovered at seed " + std::to_string(seed);
        return false;
      }
      const CMat tm = t.matrix();
      const double expected = std::pow(opnorm(tm.inverse() * t_prime.matrix()), 2);
      if (std::abs(*dg.lambda_min - expected) > 1e-6 * std::max(1.0, expected)) {
        detail = "lambda_min " + std::to_string(*dg.lambda_min) + " vs ||T^-1 T'||^2 = " +
                 std::to_string(expected);
        return false;
      }
    }
  }
  return true;
}

bool determinism(std::string& detail) {
  const std::string path = temp_path("acceptance_det");
  save_instance(generate_free_commuting(5), path);
  const std::vector<std::vector<std::string>> invocations = {
      {"check", path},
      {"bounds", path},
      {"verify", "all", path, "--seed", "11"},
      {"paper-example", "--alpha", "2", "--beta", "1.5"},
      {"generate", "--profile", "range_included", "--seed", "9"},
  };
  for (const auto& args : invocations) {
    const CliRun first = cli(args);
    const CliRun second = cli(args);
    if (first.out != second.out || first.code != second.code) {
      std::remove(path.c_str());
      detail = "command '" + args[0] + "' not byte-identical";
      return false;
    }
  }
  std::remove(path.c_str());

  for (const std::string& tag : theorem_tags()) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const FrameInstance inst = generate_instance(seed, enforcing_profile(tag));
      const std::string d1 = theorem_to_json(run_theorem_by_tag(tag, inst, seed, kTol)).dump();
      const std::string d2 = theorem_to_json(run_theorem_by_tag(tag, inst, seed, kTol)).dump();
      if (d1 != d2) {
        detail = "verifier " + tag + " output drifts at seed " + std::to_string(seed);
        return false;
      }
    }
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* label;
    std::function<bool(std::string&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "paper example constants exact to 1e-12, under 1 s", paper_example_exact},
      {2, "K removed: every probe Falsified with b = c = 0 witness, exit 1",
       paper_example_falsification},
      {3, "trapezoid error ratio 4.0 +/- 0.3, Gauss-Legendre n=2 exact",
       quadrature_convergence},
      {4, "synthesis/analysis adjointness and factorization on 100 instances",
       adjointness_suite},
      {5, "frame operator self-adjoint and positive on 100 instances",
       frame_operator_properties},
      {6, "||T||^2 matches B_opt within 1e-6 on 50 instances", synthesis_norm_is_bessel},
      {7, "verifiers certified on enforcing profiles, hypotheses-gated on adversarial",
       verifier_suite},
      {8, "spectral bounds match bisection oracles; Douglas matches closed form",
       oracle_equivalence},
      {9, "reports byte-identical across reruns", determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": "
              << c.label;
    if (!ok && !detail.empty()) std::cout << " -- " << detail;
    std::cout << std::endl;
    if (!ok) ++failures;
  }
  if (failures != 0)
    std::cout << failures << " of " << criteria.size() << " criteria failed"
              << std::endl;
  return failures == 0 ? 0 : 1;
}
