#include "recpol/decomposition.hpp"

#include <map>
#include <stdexcept>

namespace recpol {

namespace {

void require_same_support(const Policy& policy, const std::vector<std::string>& xs) {
  if (policy.support() != xs) {
    throw std::invalid_argument("policy support does not match x-support");
  }
}

double active_expected_loss(const AgentModel& model, const std::string& u, Outcome y,
                            const LossSpec& spec) {
  return expected_decision_loss(model, u, Recommendation::None, y, spec);
}

}  // namespace

BaselineJoint baseline_joint_from_model(const PopulationDistribution& pop,
                                        const AgentModel& baseline_model) {
  std::map<BaselineAtom, double> weights;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    const double hire = baseline_model.active_hire_prob(atom.u);
    if (hire > 0.0) {
      weights[BaselineAtom{atom.x, Decision::Hire, atom.y}] += w * hire;
    }
    if (hire < 1.0) {
      weights[BaselineAtom{atom.x, Decision::NotHire, atom.y}] += w * (1.0 - hire);
    }
  }
  std::vector<FinitePmf<BaselineAtom>::Entry> entries(weights.begin(), weights.end());
  return BaselineJoint(FinitePmf<BaselineAtom>(std::move(entries)));
}

double triage_effect(const Policy& policy, const BaselineJoint& base,
                     const LossSpec& spec) {
  require_same_support(policy, base.x_support());
  StableSum acc;
  for (const auto& [atom, w] : base.pmf().entries()) {
    const Recommendation r = policy.at(atom.x);
    const double l = r == Recommendation::None ? loss(spec, atom.y, atom.d0)
                                               : loss(spec, atom.y, r);
    acc.add(w * l);
  }
  return acc.value();
}

double response_effect(const Policy& policy, const PopulationDistribution& pop,
                       const AgentModel& model, const AgentModel& baseline_model,
                       const LossSpec& spec) {
  require_same_support(policy, pop.x_support());
  StableSum acc;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    const Recommendation r = policy.at(atom.x);
    const double realized = expected_decision_loss(model, atom.u, r, atom.y, spec);
    const double reference =
        r == Recommendation::None
            ? active_expected_loss(baseline_model, atom.u, atom.y, spec)
            : loss(spec, atom.y, r);
    acc.add(w * (realized - reference));
  }
  return acc.value();
}

ComplianceResponseEffect compliance_response_effect(
    const Policy& policy, const PopulationDistribution& pop, const AgentModel& model,
    const AgentModel& baseline_model, const LossSpec& spec) {
  require_same_support(policy, pop.x_support());
  StableSum ignore_part, shift_part;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    const Recommendation r = policy.at(atom.x);
    const double active = active_expected_loss(model, atom.u, atom.y, spec);
    if (r == Recommendation::None) {
      const double baseline = active_expected_loss(baseline_model, atom.u, atom.y, spec);
      shift_part.add(w * (active - baseline));
    } else {
      const double ignore_mass = 1.0 - model.comply_prob(atom.u, r);
      ignore_part.add(w * ignore_mass * (active - loss(spec, atom.y, r)));
    }
  }
  return ComplianceResponseEffect{ignore_part.value(), shift_part.value()};
}

double compliance_objective(const Policy& policy, const PopulationDistribution& pop,
                            const AgentModel& model, const LossSpec& spec) {
  require_same_support(policy, pop.x_support());
  StableSum acc;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    const Recommendation r = policy.at(atom.x);
    const double active = active_expected_loss(model, atom.u, atom.y, spec);
    if (r == Recommendation::None) {
      acc.add(w * active);
    } else {
      const double q = model.comply_prob(atom.u, r);
      acc.add(w * (q * loss(spec, atom.y, r) + (1.0 - q) * active));
    }
  }
  return acc.value();
}

DecompositionReport decompose(const Policy& policy, const PopulationDistribution& pop,
                              const AgentModel& model, const AgentModel& baseline_model,
                              const LossSpec& spec) {
  require_same_support(policy, pop.x_support());
  DecompositionReport report;
  std::map<std::string, StableSum> te_x, re_x;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    const Recommendation r = policy.at(atom.x);
    const double realized = expected_decision_loss(model, atom.u, r, atom.y, spec);
    const double followed =
        r == Recommendation::None
            ? active_expected_loss(baseline_model, atom.u, atom.y, spec)
            : loss(spec, atom.y, r);
    te_x[atom.x].add(w * followed);
    re_x[atom.x].add(w * (realized - followed));
  }
  StableSum te, re;
  for (const auto& x : pop.x_support()) {
    const double tx = te_x[x].value();
    const double rx = re_x[x].value();
    report.per_x.push_back({x, tx, rx});
    te.add(tx);
    re.add(rx);
  }
  report.te = te.value();
  report.re = re.value();
  report.total = evaluate_policy_exact(policy, pop, model, spec);
  return report;
}

std::vector<ParetoEntry> pareto_front(const std::vector<ParetoEntry>& entries) {
  std::vector<ParetoEntry> front;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < entries.size() && !dominated; ++j) {
      if (j == i) continue;
      const bool weakly = entries[j].te <= entries[i].te && entries[j].re <= entries[i].re;
      const bool strictly = entries[j].te < entries[i].te || entries[j].re < entries[i].re;
      dominated = weakly && strictly;
    }
    if (!dominated) front.push_back(entries[i]);
  }
  return front;
}

}  // namespace recpol
