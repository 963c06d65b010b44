#include "recpol/serialization.hpp"

#include <fstream>
#include <stdexcept>

namespace recpol {

Json policy_to_json(const Policy& policy) {
  Json j = Json::object();
  for (const auto& [x, r] : policy.mapping()) j[x] = to_token(r);
  return j;
}

Policy policy_from_json(const Json& j) {
  if (!j.is_object()) throw std::runtime_error("policy JSON must be an object");
  std::map<std::string, Recommendation> m;
  for (const auto& [x, tok] : j.items()) {
    m[x] = recommendation_from_token(tok.get<std::string>());
  }
  return Policy(std::move(m));
}

Json population_to_json(const PopulationSpec& spec) {
  Json rows = Json::array();
  for (const auto& row : spec.rows) {
    rows.push_back(Json{{"role", row.role},
                        {"type", row.type},
                        {"ability", to_token(row.ability)},
                        {"count", row.count}});
  }
  return Json{{"rows", rows}};
}

PopulationSpec population_from_json(const Json& j) {
  PopulationSpec spec;
  if (!j.contains("rows") || !j["rows"].is_array()) {
    throw std::runtime_error("population JSON must contain a 'rows' array");
  }
  for (const auto& row : j["rows"]) {
    spec.rows.push_back(PopulationRow{
        row.at("role").get<std::string>(), row.at("type").get<std::string>(),
        outcome_from_token(row.at("ability").get<std::string>()),
        row.at("count").get<int>()});
  }
  return spec;
}

Json baseline_to_json(const BaselineJoint& base) {
  Json atoms = Json::array();
  for (const auto& [atom, w] : base.pmf().entries()) {
    atoms.push_back(Json{{"x", atom.x},
                         {"d0", to_token(atom.d0)},
                         {"y", to_token(atom.y)},
                         {"w", w}});
  }
  return Json{{"atoms", atoms}};
}

BaselineJoint baseline_from_json(const Json& j) {
  if (!j.contains("atoms") || !j["atoms"].is_array()) {
    throw std::runtime_error("baseline JSON must contain an 'atoms' array");
  }
  std::vector<FinitePmf<BaselineAtom>::Entry> entries;
  for (const auto& a : j["atoms"]) {
    entries.push_back({BaselineAtom{a.at("x").get<std::string>(),
                                    decision_from_token(a.at("d0").get<std::string>()),
                                    outcome_from_token(a.at("y").get<std::string>())},
                       a.at("w").get<double>()});
  }
  return BaselineJoint(FinitePmf<BaselineAtom>(std::move(entries)));
}

Json stats_to_json(const MistakeStats& stats) {
  Json j = Json::object();
  for (const auto& x : stats.support()) {
    const MistakeRow& row = stats.at(x);
    Json r{{"p", row.p}, {"h", row.h}};
    r["m_N"] = row.m_nothire ? Json(*row.m_nothire) : Json(nullptr);
    r["m_H"] = row.m_hire ? Json(*row.m_hire) : Json(nullptr);
    j[x] = r;
  }
  return j;
}

Json summary_to_json(const SimulationSummary& s) {
  Json j{{"subjects", s.subjects},
         {"decisions", s.decisions},
         {"optimal_pct", s.optimal_pct},
         {"optimal_se", s.optimal_se},
         {"hire_pct", s.hire_pct},
         {"hire_se", s.hire_se}};
  j["deviated_pct"] = s.deviated_pct ? Json(*s.deviated_pct) : Json(nullptr);
  j["deviated_se"] = s.deviated_se ? Json(*s.deviated_se) : Json(nullptr);
  return j;
}

Json decomposition_to_json(const DecompositionReport& report) {
  Json per_x = Json::array();
  for (const auto& row : report.per_x) {
    per_x.push_back(Json{{"x", row.x}, {"te", row.te}, {"re", row.re}});
  }
  return Json{{"total", report.total},
              {"te", report.te},
              {"re", report.re},
              {"per_x", per_x}};
}

AgentModel model_from_json(const Json& j, const PopulationDistribution& pop,
                           const LossSpec& spec) {
  const Json compliance = j.value("compliance", Json{{"kind", "perfect"}});
  const Json active = j.value("active", Json{{"kind", "sophisticated"}});

  AgentModel::ActiveRule active_rule;
  const std::string active_kind = active.at("kind").get<std::string>();
  if (active_kind == "random") {
    active_rule = random_active(active.at("p").get<double>());
  } else if (active_kind == "sophisticated") {
    active_rule = sophisticated_active(pop, spec);
  } else if (active_kind == "probability-matching") {
    active_rule = probability_matching_active(pop);
  } else {
    throw std::runtime_error("unknown active rule kind '" + active_kind + "'");
  }

  const std::string compliance_kind = compliance.at("kind").get<std::string>();
  if (compliance_kind == "perfect") {
    return perfect_compliance_model(std::move(active_rule));
  }
  if (compliance_kind == "selective") {
    std::set<std::string> ignored;
    for (const auto& u : compliance.at("ignored")) ignored.insert(u.get<std::string>());
    return selective_compliance_model(ignored, std::move(active_rule), pop.u_support());
  }
  if (compliance_kind == "constant") {
    const double p = compliance.at("p").get<double>();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::runtime_error("constant compliance probability outside [0,1]");
    }
    return AgentModel([p](const std::string&, Recommendation) { return p; },
                      std::move(active_rule));
  }
  throw std::runtime_error("unknown compliance kind '" + compliance_kind + "'");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Json j;
  in >> j;
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace recpol
