#include "modframe/report.hpp"

namespace modframe {

using nlohmann::json;

json matrix_to_json(const CMat& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json vector_to_json(const CVec& v) {
  json data = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    data.push_back(json::array({v(i).real(), v(i).imag()}));
  return data;
}

json verdict_to_json(const Verdict& v) {
  json j{{"status", to_string(v.status)}, {"margin", v.margin}};
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (v.witness) j["witness"] = vector_to_json(*v.witness);
  if (v.violation) j["violation"] = matrix_to_json(*v.violation);
  return j;
}

json bounds_to_json(const BoundsReport& b) {
  json j{{"b_opt", b.b_opt},
         {"tight", b.tight},
         {"frame_class", to_string(b.frame_class)},
         {"exact_path", b.exact_path}};
  j["a_opt"] = b.a_opt ? json(*b.a_opt) : json(nullptr);
  j["b_opt_k"] = b.b_opt_k ? json(*b.b_opt_k) : json(nullptr);
  if (!b.notes.empty()) j["notes"] = b.notes;
  return j;
}

json theorem_to_json(const TheoremReport& r) {
  json hyps = json::array();
  for (const auto& h : r.hypotheses)
    hyps.push_back(json{{"name", h.name},
                        {"ok", h.ok},
                        {"value", h.value},
                        {"threshold", h.threshold}});
  json j{{"theorem", r.theorem_id},
         {"overall", to_string(r.overall())},
         {"hypotheses", std::move(hyps)},
         {"conclusion", verdict_to_json(r.conclusion)}};
  if (!r.constants.empty()) {
    json constants;
    for (const auto& [name, value] : r.constants) constants[name] = value;
    j["constants"] = std::move(constants);
  }
  if (r.bounds) j["bounds"] = bounds_to_json(*r.bounds);
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (r.internal_error) j["internal_error"] = *r.internal_error;
  return j;
}

json report_envelope(const std::string& command, const std::string& digest) {
  return json{{"tool", json{{"name", kToolName}, {"version", kToolVersion}}},
              {"command", command},
              {"instance_digest", digest}};
}

}  // namespace modframe
