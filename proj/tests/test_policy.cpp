#include <cmath>

#include "doctest.h"
#include "recpol/decomposition.hpp"
#include "recpol/experiment.hpp"
#include "recpol/policy.hpp"
#include "recpol/rng.hpp"

using namespace recpol;

namespace {

Policy tokens_policy(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::map<std::string, Recommendation> m;
  for (const auto& [x, tok] : kv) m[x] = recommendation_from_token(tok);
  return Policy(std::move(m));
}

/// Unassisted law of the role-rational agent joined with the experiment
/// population.
BaselineJoint rational_baseline() {
  const PopulationDistribution pop = population_distribution(default_population());
  return baseline_joint_from_model(
      pop, perfect_compliance_model(sophisticated_active(pop, LossSpec::unit())));
}

}  // namespace

TEST_CASE("optimal decision policy on the experiment population") {
  const PopulationDistribution pop = population_distribution(default_population());
  const Policy got = optimal_decision_policy(pop, LossSpec::unit());
  CHECK(got == table3_policies().predictive);
  for (const auto& [x, r] : got.mapping()) CHECK(r != Recommendation::None);
}

TEST_CASE("optimal decision policy ties break to hire") {
  const PopulationDistribution pop(FinitePmf<PopAtom>({
      {PopAtom{"x", "u", Outcome::Good}, 0.5},
      {PopAtom{"x", "u", Outcome::Bad}, 0.5},
  }));
  CHECK(optimal_decision_policy(pop, LossSpec::unit()).at("x") ==
        Recommendation::Hire);

  const PopulationDistribution all_good(FinitePmf<PopAtom>({
      {PopAtom{"a", "u", Outcome::Good}, 0.4},
      {PopAtom{"b", "u", Outcome::Good}, 0.6},
  }));
  const Policy p = optimal_decision_policy(all_good, LossSpec(3.0, 1.0));
  CHECK(p.at("a") == Recommendation::Hire);
  CHECK(p.at("b") == Recommendation::Hire);
}

TEST_CASE("optimal triage policy reproduces the published treatment") {
  CHECK(optimal_triage_policy(rational_baseline(), LossSpec::unit()) ==
        table3_policies().triage);
}

TEST_CASE("optimal triage policy on the control-arm joint") {
  const Policy got = optimal_triage_policy(table6_baseline(), LossSpec::unit());
  CHECK(got == tokens_policy(
                   {{"A", "none"}, {"B", "H"}, {"C", "H"}, {"D", "H"}, {"E", "H"}}));
}

TEST_CASE("triage never intervenes on a mistake-free baseline") {
  // Baseline decisions are always correct; both outcomes occur at each x.
  const BaselineJoint base(FinitePmf<BaselineAtom>({
      {BaselineAtom{"a", Decision::Hire, Outcome::Good}, 0.3},
      {BaselineAtom{"a", Decision::NotHire, Outcome::Bad}, 0.2},
      {BaselineAtom{"b", Decision::Hire, Outcome::Good}, 0.1},
      {BaselineAtom{"b", Decision::NotHire, Outcome::Bad}, 0.4},
  }));
  const Policy got = optimal_triage_policy(base, LossSpec(2.7, 0.4));
  CHECK(got == Policy::all_none(base.x_support()));
}

TEST_CASE("exact evaluation matches hand-computed experiment values") {
  const PopulationSpec spec = default_population();
  const PopulationDistribution pop = population_distribution(spec);
  const LossSpec unit = LossSpec::unit();
  const auto treatments = table3_policies();

  // Rational role-only agent, no recommendations: 6 errors out of 25.
  const AgentModel rational =
      perfect_compliance_model(sophisticated_active(pop, unit));
  CHECK(evaluate_policy_exact(treatments.control, pop, rational, unit) ==
        doctest::Approx(6.0 / 25));

  // Selective complier with sophisticated active decisions under
  // Complementary Triage: a single bad call, the good type-E
  // Communications applicant.
  const AgentModel selective = selective_compliance_model(
      {"Engineering"}, sophisticated_active(pop, unit), pop.u_support());
  CHECK(evaluate_policy_exact(treatments.complementary_triage, pop, selective, unit) ==
        doctest::Approx(1.0 / 25));

  // Perfect compliance with the Triage policy: two Engineering rejections
  // on type A, two bad Sales hires on type E.
  CHECK(evaluate_policy_exact(treatments.triage, pop, rational, unit) ==
        doctest::Approx(4.0 / 25));
}

TEST_CASE("evaluation requires matching support") {
  const PopulationDistribution pop = population_distribution(default_population());
  const Policy partial = tokens_policy({{"A", "H"}, {"B", "H"}});
  CHECK_THROWS_AS(evaluate_policy_exact(partial, pop,
                                        perfect_compliance_model(random_active(0.5)),
                                        LossSpec::unit()),
                  std::invalid_argument);
}

TEST_CASE("policy enumeration is lexicographic and complete") {
  const PolicyEnumeration one({"x"});
  CHECK(one.size() == 3);
  const PolicyEnumeration five({"a", "b", "c", "d", "e"});
  CHECK(five.size() == 243);
  CHECK(five.at(0) == Policy::constant({"a", "b", "c", "d", "e"},
                                       Recommendation::NotHire));
  CHECK(five.at(1).at("e") == Recommendation::None);
  CHECK(five.at(242) ==
        Policy::constant({"a", "b", "c", "d", "e"}, Recommendation::Hire));
  // No duplicates.
  std::set<std::string> ids;
  for (std::size_t i = 0; i < five.size(); ++i) ids.insert(five.at(i).id());
  CHECK(ids.size() == 243);

  CHECK_THROWS_AS(PolicyEnumeration(std::vector<std::string>(13, "x")),
                  std::invalid_argument);
}

TEST_CASE("brute force agrees with direct evaluation and collects ties") {
  const PopulationDistribution pop = population_distribution(default_population());
  const LossSpec unit = LossSpec::unit();
  const AgentModel rational =
      perfect_compliance_model(sophisticated_active(pop, unit));
  const auto result = brute_force_optimal(pop, rational, unit);
  // Optimum achieves 4/25 and ties between the published Triage policy and
  // its variant that withholds on type A.
  CHECK(result.value == doctest::Approx(4.0 / 25));
  CHECK(result.optimal.size() == 2);
  const auto& triage = table3_policies().triage;
  CHECK(std::find(result.optimal.begin(), result.optimal.end(), triage) !=
        result.optimal.end());
  for (const auto& p : result.optimal) {
    CHECK(evaluate_policy_exact(p, pop, rational, unit) ==
          doctest::Approx(result.value));
  }
  // Multi-threaded scan returns the same set.
  const auto threaded = brute_force_optimal(pop, rational, unit, nullptr, 4);
  CHECK(threaded.optimal.size() == result.optimal.size());
  CHECK(threaded.value == doctest::Approx(result.value));
}

TEST_CASE("assisted optimum never loses to the model's unassisted baseline") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<FinitePmf<PopAtom>::Entry> entries;
    const int nx = 1 + int(rng.below(4));
    std::vector<double> raw;
    double total = 0.0;
    for (int i = 0; i < nx * 2 * 2; ++i) {
      raw.push_back(rng.uniform(0.05, 1.0));
      total += raw.back();
    }
    int k = 0;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (const Outcome y : {Outcome::Bad, Outcome::Good}) {
          entries.push_back({PopAtom{"x" + std::to_string(i), "u" + std::to_string(j),
                                     y},
                             raw[k++] / total});
        }
      }
    }
    const PopulationDistribution pop{FinitePmf<PopAtom>(entries)};
    const double q = rng.uniform(), a0 = rng.uniform(), a1 = rng.uniform();
    const AgentModel model(
        [q](const std::string&, Recommendation) { return q; },
        [a0, a1](const std::string& u) { return u == "u0" ? a0 : a1; });
    const LossSpec spec(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0));
    const auto result = brute_force_optimal(pop, model, spec);
    const double unassisted = evaluate_policy_exact(
        Policy::all_none(pop.x_support()), pop, model, spec);
    CHECK(result.value <= unassisted + 1e-12);
  }
}

TEST_CASE("scaling both costs rescales values and preserves argmins") {
  const PopulationDistribution pop = population_distribution(default_population());
  const AgentModel model = selective_compliance_model(
      {"Engineering"}, random_active(0.5), pop.u_support());
  const LossSpec base(1.3, 0.8);
  const LossSpec scaled(1.3 * 4.5, 0.8 * 4.5);
  const auto r1 = brute_force_optimal(pop, model, base);
  const auto r2 = brute_force_optimal(pop, model, scaled);
  CHECK(r2.value == doctest::Approx(4.5 * r1.value));
  REQUIRE(r1.optimal.size() == r2.optimal.size());
  for (std::size_t i = 0; i < r1.optimal.size(); ++i) {
    CHECK(r1.optimal[i] == r2.optimal[i]);
  }
  CHECK(optimal_decision_policy(pop, base) == optimal_decision_policy(pop, scaled));
  const auto joint = baseline_joint_from_model(pop, model);
  CHECK(optimal_triage_policy(joint, base) == optimal_triage_policy(joint, scaled));
}

TEST_CASE("policy serialization id is stable") {
  const Policy p = table3_policies().complementary_triage;
  CHECK(p.id() == "N,none,none,H,N");
}
