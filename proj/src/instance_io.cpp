#include "modframe/instance_io.hpp"

#include <fstream>

namespace modframe {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw InstanceFormatError(path + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

json matrix_json(const CMat& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMat parse_matrix(const json& j, const std::string& path) {
  const int rows = as_int(require(j, "rows", path), path + ".rows");
  const int cols = as_int(require(j, "cols", path), path + ".cols");
  if (rows < 1 || cols < 1) bad(path, "matrix dimensions must be positive");
  const json& data = require(j, "data", path);
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols)
    bad(path + ".data", "expected " + std::to_string(static_cast<long long>(rows) * cols) +
                            " [re, im] entries in row-major order");
  CMat m(rows, cols);
  std::size_t idx = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, ++idx) {
      const json& e = data[idx];
      const std::string epath = path + ".data[" + std::to_string(idx) + "]";
      if (!e.is_array() || e.size() != 2) bad(epath, "expected [re, im]");
      m(r, c) = Complex(as_number(e[0], epath + "[0]"), as_number(e[1], epath + "[1]"));
    }
  return m;
}

json space_json(const ModuleSpace& s) {
  if (s.is_free())
    return json{{"kind", "free"}, {"rank", s.rank()}, {"algebra_dim", s.algebra_dim()}};
  json positions = json::array();
  for (const auto& [r, c] : s.positions())
    positions.push_back(json::array({r + 1, c + 1}));  // 1-based on disk
  return json{{"kind", "pattern"},
              {"rows", s.rows()},
              {"cols", s.cols()},
              {"positions", std::move(positions)}};
}

ModuleSpace parse_space(const json& j, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "free") {
    const int rank = as_int(require(j, "rank", path), path + ".rank");
    const int n = as_int(require(j, "algebra_dim", path), path + ".algebra_dim");
    if (rank < 1 || n < 1) bad(path, "rank and algebra_dim must be >= 1");
    return ModuleSpace::free_module(rank, n);
  }
  if (kind == "pattern") {
    const int rows = as_int(require(j, "rows", path), path + ".rows");
    const int cols = as_int(require(j, "cols", path), path + ".cols");
    const json& pos = require(j, "positions", path);
    if (!pos.is_array() || pos.empty()) bad(path + ".positions", "expected a nonempty array");
    std::vector<std::pair<int, int>> positions;
    positions.reserve(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const std::string ppath = path + ".positions[" + std::to_string(i) + "]";
      const json& p = pos[i];
      if (!p.is_array() || p.size() != 2) bad(ppath, "expected [row, col]");
      const int r = as_int(p[0], ppath + "[0]");
      const int c = as_int(p[1], ppath + "[1]");
      if (r < 1 || r > rows || c < 1 || c > cols)
        bad(ppath, "position out of range (positions are 1-based)");
      positions.emplace_back(r - 1, c - 1);
    }
    try {
      return ModuleSpace::pattern_module(rows, cols, std::move(positions));
    } catch (const std::invalid_argument& e) {
      bad(path, e.what());
    }
  }
  bad(path + ".kind", "expected \"free\" or \"pattern\"");
}

json measure_json(const MeasureDiscretization& m) {
  if (m.provenance == MeasureDiscretization::Provenance::Interval)
    return json{{"kind", "interval"}, {"a", m.a}, {"b", m.b},
                {"rule", to_string(m.rule)}, {"n", m.n}};
  json nodes = json::array();
  for (const auto& node : m.nodes)
    nodes.push_back(json{{"point", node.point}, {"weight", node.weight}});
  return json{{"kind", "discrete"}, {"nodes", std::move(nodes)}};
}

QuadratureRule parse_rule(const std::string& s, const std::string& path) {
  if (s == "gauss_legendre") return QuadratureRule::GaussLegendre;
  if (s == "trapezoid") return QuadratureRule::Trapezoid;
  if (s == "midpoint") return QuadratureRule::Midpoint;
  bad(path, "expected \"gauss_legendre\", \"trapezoid\" or \"midpoint\"");
}

MeasureDiscretization parse_measure(const json& j, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "interval") {
    const double a = as_number(require(j, "a", path), path + ".a");
    const double b = as_number(require(j, "b", path), path + ".b");
    QuadratureRule rule = QuadratureRule::GaussLegendre;
    if (j.contains("rule")) rule = parse_rule(as_string(j["rule"], path + ".rule"), path + ".rule");
    int n = 16;
    if (j.contains("n")) n = as_int(j["n"], path + ".n");
    try {
      return discretize_interval(a, b, rule, n);
    } catch (const std::invalid_argument& e) {
      bad(path, e.what());
    }
  }
  if (kind == "discrete") {
    const json& nodes = require(j, "nodes", path);
    if (!nodes.is_array() || nodes.empty()) bad(path + ".nodes", "expected a nonempty array");
    std::vector<QuadratureNode> parsed;
    parsed.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string npath = path + ".nodes[" + std::to_string(i) + "]";
      parsed.push_back(
          QuadratureNode{as_number(require(nodes[i], "point", npath), npath + ".point"),
                         as_number(require(nodes[i], "weight", npath), npath + ".weight")});
    }
    try {
      return discrete_measure(std::move(parsed));
    } catch (const std::invalid_argument& e) {
      bad(path, e.what());
    }
  }
  bad(path + ".kind", "expected \"interval\" or \"discrete\"");
}

json family_json(const OperatorFamily& f) {
  if (f.kind == OperatorFamily::Kind::ScalarProfile) {
    json coeffs = json::array();
    for (double c : f.coeffs) coeffs.push_back(c);
    return json{{"kind", "scalar_profile"}, {"base", matrix_json(f.base->matrix())},
                {"coeffs", std::move(coeffs)}};
  }
  json ops = json::array();
  for (const auto& op : f.table) ops.push_back(matrix_json(op.matrix()));
  return json{{"kind", "table"}, {"operators", std::move(ops)}};
}

ModuleOperator parse_endomorphism(const json& j, const ModuleSpace& space,
                                  const std::string& path) {
  const CMat m = parse_matrix(j, path);
  try {
    return ModuleOperator(space, space, m);
  } catch (const std::invalid_argument& e) {
    bad(path, e.what());
  }
}

OperatorFamily parse_family(const json& j, const ModuleSpace& space, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "table") {
    const json& ops = require(j, "operators", path);
    if (!ops.is_array() || ops.empty()) bad(path + ".operators", "expected a nonempty array");
    std::vector<ModuleOperator> parsed;
    parsed.reserve(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i)
      parsed.push_back(parse_endomorphism(ops[i], space,
                                          path + ".operators[" + std::to_string(i) + "]"));
    return OperatorFamily::from_table(std::move(parsed));
  }
  if (kind == "scalar_profile") {
    ModuleOperator base = parse_endomorphism(require(j, "base", path), space, path + ".base");
    const json& coeffs = require(j, "coeffs", path);
    if (!coeffs.is_array() || coeffs.empty()) bad(path + ".coeffs", "expected a nonempty array");
    std::vector<double> parsed;
    parsed.reserve(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      parsed.push_back(as_number(coeffs[i], path + ".coeffs[" + std::to_string(i) + "]"));
    return OperatorFamily::scalar_profile(std::move(base), std::move(parsed));
  }
  bad(path + ".kind", "expected \"table\" or \"scalar_profile\"");
}

}  // namespace

json instance_to_json(const FrameInstance& inst) {
  json j{{"format", "modframe-instance"},
         {"version", 1},
         {"space", space_json(inst.space)},
         {"measure", measure_json(inst.measure)},
         {"family", family_json(inst.family)},
         {"c", matrix_json(inst.c.matrix())},
         {"c_prime", matrix_json(inst.c_prime.matrix())}};
  if (inst.k) j["k"] = matrix_json(inst.k->matrix());
  return j;
}

FrameInstance instance_from_json(const json& j) {
  if (!j.is_object()) bad("$", "expected a JSON object");
  if (j.contains("format") && j["format"] != "modframe-instance")
    bad("$.format", "expected \"modframe-instance\"");
  if (j.contains("version") && (!j["version"].is_number_integer() || j["version"] != 1))
    bad("$.version", "only version 1 is understood");

  const ModuleSpace space = parse_space(require(j, "space", "$"), "$.space");
  MeasureDiscretization measure = parse_measure(require(j, "measure", "$"), "$.measure");
  OperatorFamily family = parse_family(require(j, "family", "$"), space, "$.family");
  if (family.kind == OperatorFamily::Kind::Table &&
      family.table.size() != measure.nodes.size())
    bad("$.family.operators", "table has " + std::to_string(family.table.size()) +
                                  " operators but the measure has " +
                                  std::to_string(measure.nodes.size()) + " nodes");
  ModuleOperator c = parse_endomorphism(require(j, "c", "$"), space, "$.c");
  ModuleOperator cp = parse_endomorphism(require(j, "c_prime", "$"), space, "$.c_prime");
  std::optional<ModuleOperator> k;
  if (j.contains("k") && !j["k"].is_null())
    k = parse_endomorphism(j["k"], space, "$.k");

  return FrameInstance{space,        std::move(measure), std::move(family), std::move(c),
                       std::move(cp), std::move(k),       ToleranceConfig::defaults()};
}

FrameInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceFormatError(path + ": cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InstanceFormatError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const FrameInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InstanceFormatError(path + ": cannot open for writing");
  out << instance_to_json(inst).dump(2) << '\n';
}

std::string instance_digest(const FrameInstance& inst) {
  const std::string dump = instance_to_json(inst).dump();
  const std::uint64_t h = fnv1a64(dump);
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xF];
  buf[16] = '\0';
  return std::string("fnv1a64:") + buf;
}

}  // namespace modframe
