#pragma once

#include <string>
#include <vector>

#include "recpol/agents.hpp"
#include "recpol/distributions.hpp"
#include "recpol/policy.hpp"

namespace recpol {

/// Splits the recommendation objective into the loss of following the
/// policy literally (te) and the residual from how the agent actually
/// responds (re). total == te + re by construction.
struct DecompositionReport {
  double total = 0.0;
  double te = 0.0;
  double re = 0.0;
  struct PerX {
    std::string x;
    double te = 0.0;
    double re = 0.0;
  };
  std::vector<PerX> per_x;
};

/// Unassisted decision law joined with (x, y): D0 comes from the baseline
/// model's active rule applied under an all-None policy.
BaselineJoint baseline_joint_from_model(const PopulationDistribution& pop,
                                        const AgentModel& baseline_model);

/// E[l(Y,R) 1(R != none) + l(Y,D0) 1(R = none)] over the baseline joint.
double triage_effect(const Policy& policy, const BaselineJoint& base,
                     const LossSpec& spec);

/// E[(l(Y,D) - l(Y,R)) 1(R != none) + (l(Y,D) - l(Y,D0)) 1(R = none)],
/// computed from its own expectation, not as total - te.
double response_effect(const Policy& policy, const PopulationDistribution& pop,
                       const AgentModel& model, const AgentModel& baseline_model,
                       const LossSpec& spec);

struct ComplianceResponseEffect {
  double re_ignore = 0.0;        // deviations on ignored directional recommendations
  double re_active_shift = 0.0;  // active-decision drift on the none branch
};

/// Refines the response effect along the compliance split; the two parts
/// sum to response_effect.
ComplianceResponseEffect compliance_response_effect(const Policy& policy,
                                                    const PopulationDistribution& pop,
                                                    const AgentModel& model,
                                                    const AgentModel& baseline_model,
                                                    const LossSpec& spec);

/// E[l(Y,R) 1(Comply, R != none) + l(Y, D_active) 1(Ignore or R = none)];
/// equals evaluate_policy_exact for compliance-form models.
double compliance_objective(const Policy& policy, const PopulationDistribution& pop,
                            const AgentModel& model, const LossSpec& spec);

/// Full report with per-x breakdown.
DecompositionReport decompose(const Policy& policy, const PopulationDistribution& pop,
                              const AgentModel& model, const AgentModel& baseline_model,
                              const LossSpec& spec);

struct ParetoEntry {
  Policy policy;
  double te = 0.0;
  double re = 0.0;
};

/// Entries not strictly dominated in (te, re): dominated means another
/// entry is <= in both coordinates and < in one. Input order is preserved.
std::vector<ParetoEntry> pareto_front(const std::vector<ParetoEntry>& entries);

}  // namespace recpol
