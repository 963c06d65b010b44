#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "recpol/agents.hpp"
#include "recpol/core.hpp"
#include "recpol/distributions.hpp"

namespace recpol {

/// Total map from the characteristic support to a recommendation.
class Policy {
 public:
  explicit Policy(std::map<std::string, Recommendation> mapping);

  const std::map<std::string, Recommendation>& mapping() const { return mapping_; }
  std::vector<std::string> support() const;
  Recommendation at(const std::string& x) const;

  /// Stable one-line identifier: tokens joined over the sorted support,
  /// e.g. "N,H,H,H,none".
  std::string id() const;

  static Policy constant(const std::vector<std::string>& support, Recommendation r);
  static Policy all_none(const std::vector<std::string>& support) {
    return constant(support, Recommendation::None);
  }

  bool operator==(const Policy& other) const { return mapping_ == other.mapping_; }

 private:
  std::map<std::string, Recommendation> mapping_;
};

/// All 3^|support| policies in lexicographic order under N < none < H,
/// with the first support value as the most significant digit.
class PolicyEnumeration {
 public:
  static constexpr std::size_t kDefaultCap = 12;

  explicit PolicyEnumeration(std::vector<std::string> support,
                             std::size_t support_cap = kDefaultCap);

  std::size_t size() const { return count_; }
  Policy at(std::size_t index) const;
  const std::vector<std::string>& support() const { return support_; }

 private:
  std::vector<std::string> support_;
  std::size_t count_;
};

/// Expected loss of the decisions the policy induces through the agent.
/// Policy support must equal the population's x-support.
double evaluate_policy_exact(const Policy& policy, const PopulationDistribution& pop,
                             const AgentModel& model, const LossSpec& spec);

/// Recommend the loss-minimizing decision per x; never withholds.
/// Ties go to Hire.
Policy optimal_decision_policy(const PopulationDistribution& pop, const LossSpec& spec);

/// Per-x argmin over {NotHire, Hire, None} of
///   c1 * Pr(Good | x),  c2 * Pr(Bad | x),  c1 E[type-I mistake | x] + c2 E[type-II mistake | x].
/// A directional branch wins an exact tie against None (the weak-inequality
/// semantics of the mistake-threshold rule); NotHire wins a directional tie.
Policy optimal_triage_policy(const BaselineJoint& base, const LossSpec& spec);

struct BruteForceResult {
  std::vector<Policy> optimal;  // all policies within tie_tolerance of the best
  double value = 0.0;
  static constexpr double kTieTolerance = 1e-9;
};

/// Exact argmin of evaluate_policy_exact over all policies on the support
/// (or over `candidates` when provided). `threads` > 1 splits the
/// enumeration into deterministic chunks.
BruteForceResult brute_force_optimal(const PopulationDistribution& pop,
                                     const AgentModel& model, const LossSpec& spec,
                                     const std::vector<Policy>* candidates = nullptr,
                                     unsigned threads = 1);

/// Per-(x, recommendation) expected-loss contributions; policy value is the
/// sum of its picks. Shared by brute force and the decomposition module.
std::map<std::string, std::array<double, 3>> policy_loss_table(
    const PopulationDistribution& pop, const AgentModel& model, const LossSpec& spec);

}  // namespace recpol
