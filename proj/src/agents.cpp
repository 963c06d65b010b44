#include "recpol/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace recpol {

ResponseType classify_response(const PotentialTriple& t) {
  if (t.on_nothire == t.on_none && t.on_none == t.on_hire) {
    return ResponseType::Ignore;
  }
  if (t.on_nothire == Decision::NotHire && t.on_hire == Decision::Hire) {
    return ResponseType::Comply;
  }
  if (t.on_nothire == Decision::Hire && t.on_hire == Decision::NotHire) {
    return ResponseType::Defy;
  }
  return ResponseType::Change;
}

bool is_monotone(const PotentialTriple& t) {
  const auto r = classify_response(t);
  return r == ResponseType::Ignore || r == ResponseType::Comply;
}

CompactResponse to_compact(const PotentialTriple& t) {
  if (!is_monotone(t)) {
    throw std::invalid_argument("to_compact: non-monotone potential triple");
  }
  const auto type = classify_response(t) == ResponseType::Ignore
                        ? ComplianceType::Ignore
                        : ComplianceType::Comply;
  return CompactResponse{t.on_none, type};
}

PotentialTriple from_compact(const CompactResponse& c) {
  if (c.compliance == ComplianceType::Ignore) {
    return PotentialTriple{c.active, c.active, c.active};
  }
  return PotentialTriple{Decision::NotHire, c.active, Decision::Hire};
}

namespace {

double checked_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability outside [0,1]");
  }
  return p;
}

}  // namespace

AgentModel::AgentModel(ComplianceRule compliance, ActiveRule active)
    : compliance_(std::move(compliance)), active_(std::move(active)) {
  if (!compliance_ || !active_) {
    throw std::invalid_argument("AgentModel: missing rule");
  }
}

double AgentModel::comply_prob(const std::string& u, Recommendation r) const {
  if (r == Recommendation::None) {
    throw std::invalid_argument("comply_prob: compliance undefined for None");
  }
  return checked_probability(compliance_(u, r), "compliance_rule");
}

double AgentModel::active_hire_prob(const std::string& u) const {
  return checked_probability(active_(u), "active_rule");
}

Decision realize_decision(const AgentModel& model, const std::string& u,
                          Recommendation r, Rng& rng) {
  // Fixed draw order keeps sub-streams aligned across branches.
  const double comply_draw = rng.uniform();
  const double active_draw = rng.uniform();
  const Decision active =
      active_draw < model.active_hire_prob(u) ? Decision::Hire : Decision::NotHire;
  if (r == Recommendation::None) return active;
  if (comply_draw < model.comply_prob(u, r)) return recommended_decision(r);
  return active;
}

PotentialTriple realize_potential_triple(const AgentModel& model,
                                         const std::string& u, Rng& rng) {
  const double comply_draw = rng.uniform();
  const double active_draw = rng.uniform();
  const Decision active =
      active_draw < model.active_hire_prob(u) ? Decision::Hire : Decision::NotHire;
  const Decision on_n = comply_draw < model.comply_prob(u, Recommendation::NotHire)
                            ? Decision::NotHire
                            : active;
  const Decision on_h = comply_draw < model.comply_prob(u, Recommendation::Hire)
                            ? Decision::Hire
                            : active;
  return PotentialTriple{on_n, active, on_h};
}

namespace {

double hire_probability(const AgentModel& model, const std::string& u,
                        Recommendation r) {
  const double a = model.active_hire_prob(u);
  if (r == Recommendation::None) return a;
  const double q = model.comply_prob(u, r);
  return r == Recommendation::Hire ? q + (1.0 - q) * a : (1.0 - q) * a;
}

}  // namespace

FinitePmf<Decision> decision_pmf(const AgentModel& model, const std::string& u,
                                 Recommendation r) {
  const double p = hire_probability(model, u, r);
  return FinitePmf<Decision>(
      {{Decision::NotHire, 1.0 - p}, {Decision::Hire, p}});
}

double expected_decision_loss(const AgentModel& model, const std::string& u,
                              Recommendation r, Outcome y, const LossSpec& spec) {
  const double p = hire_probability(model, u, r);
  return p * loss(spec, y, Decision::Hire) +
         (1.0 - p) * loss(spec, y, Decision::NotHire);
}

AgentModel perfect_compliance_model(AgentModel::ActiveRule active) {
  return AgentModel([](const std::string&, Recommendation) { return 1.0; },
                    std::move(active));
}

AgentModel selective_compliance_model(const std::set<std::string>& ignored_u,
                                      AgentModel::ActiveRule active,
                                      const std::vector<std::string>& u_support) {
  for (const auto& u : ignored_u) {
    if (std::find(u_support.begin(), u_support.end(), u) == u_support.end()) {
      throw std::invalid_argument(
          "selective_compliance_model: ignored signal '" + u +
          "' outside population support");
    }
  }
  return AgentModel(
      [ignored_u](const std::string& u, Recommendation) {
        return ignored_u.count(u) ? 0.0 : 1.0;
      },
      std::move(active));
}

AgentModel::ActiveRule random_active(double p) {
  checked_probability(p, "random_active");
  return [p](const std::string&) { return p; };
}

AgentModel::ActiveRule sophisticated_active(const PopulationDistribution& pop,
                                            const LossSpec& spec) {
  std::map<std::string, double> rule;
  for (const auto& u : pop.u_support()) {
    const double good = pop.prob_good_given_u(u);
    rule[u] = good * spec.c_type1 >= (1.0 - good) * spec.c_type2 ? 1.0 : 0.0;
  }
  return [rule](const std::string& u) {
    auto it = rule.find(u);
    if (it == rule.end()) {
      throw std::invalid_argument("sophisticated_active: unknown signal '" + u + "'");
    }
    return it->second;
  };
}

AgentModel::ActiveRule probability_matching_active(const PopulationDistribution& pop) {
  std::map<std::string, double> rule;
  for (const auto& u : pop.u_support()) rule[u] = pop.prob_good_given_u(u);
  return [rule](const std::string& u) {
    auto it = rule.find(u);
    if (it == rule.end()) {
      throw std::invalid_argument(
          "probability_matching_active: unknown signal '" + u + "'");
    }
    return it->second;
  };
}

}  // namespace recpol
