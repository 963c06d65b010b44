#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "recpol/core.hpp"
#include "recpol/distributions.hpp"
#include "recpol/pmf.hpp"
#include "recpol/rng.hpp"

namespace recpol {

/// Potential decisions across the three recommendation values. Non-monotone
/// triples are representable so they can be classified and rejected.
struct PotentialTriple {
  Decision on_nothire;
  Decision on_none;
  Decision on_hire;
  auto operator<=>(const PotentialTriple&) const = default;
};

enum class ResponseType { Ignore, Comply, Defy, Change };

enum class ComplianceType { Ignore, Comply };

/// Monotone triples collapse to (active decision, compliance type).
struct CompactResponse {
  Decision active;
  ComplianceType compliance;
  auto operator<=>(const CompactResponse&) const = default;
};

/// Total classification of all 8 triples into the four response types.
ResponseType classify_response(const PotentialTriple& t);

/// True iff on_nothire <= on_none <= on_hire in the NotHire-before-Hire order.
bool is_monotone(const PotentialTriple& t);

/// Bijection from monotone triples; throws std::invalid_argument otherwise.
CompactResponse to_compact(const PotentialTriple& t);
PotentialTriple from_compact(const CompactResponse& c);

/// Stochastic behavioral rule: probability of complying with a directional
/// recommendation, plus the active hire probability used when no
/// recommendation reaches the agent. Rules depend only on (u, r), which
/// keeps one model valid simultaneously for every policy.
class AgentModel {
 public:
  using ComplianceRule = std::function<double(const std::string& u, Recommendation r)>;
  using ActiveRule = std::function<double(const std::string& u)>;

  AgentModel(ComplianceRule compliance, ActiveRule active);

  /// Probability of Comply given (u, r); r must be directional.
  double comply_prob(const std::string& u, Recommendation r) const;

  /// Probability the active decision is Hire.
  double active_hire_prob(const std::string& u) const;

 private:
  ComplianceRule compliance_;
  ActiveRule active_;
};

/// One uniform draw decides compliance, a second decides the active
/// decision; both are reused across the three branches so simulated
/// potential triples are well-defined and monotone path by path.
Decision realize_decision(const AgentModel& model, const std::string& u,
                          Recommendation r, Rng& rng);

/// All three potential decisions under shared randomness.
PotentialTriple realize_potential_triple(const AgentModel& model,
                                         const std::string& u, Rng& rng);

/// Exact two-point law of realize_decision.
FinitePmf<Decision> decision_pmf(const AgentModel& model, const std::string& u,
                                 Recommendation r);

/// Expected loss of the decision law at (u, r); avoids pmf allocation.
double expected_decision_loss(const AgentModel& model, const std::string& u,
                              Recommendation r, Outcome y, const LossSpec& spec);

// Built-in behavior models.

AgentModel perfect_compliance_model(AgentModel::ActiveRule active);

/// Compliance 0 on the ignored signals, 1 elsewhere. Ignored values must
/// belong to the population's u-support.
AgentModel selective_compliance_model(const std::set<std::string>& ignored_u,
                                      AgentModel::ActiveRule active,
                                      const std::vector<std::string>& u_support);

AgentModel::ActiveRule random_active(double p);

/// Hire iff hiring is the cost-minimizing decision given Pr(Good | u).
AgentModel::ActiveRule sophisticated_active(const PopulationDistribution& pop,
                                            const LossSpec& spec);

/// Hire with probability Pr(Good | u).
AgentModel::ActiveRule probability_matching_active(const PopulationDistribution& pop);

}  // namespace recpol
