#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "recpol/decomposition.hpp"
#include "recpol/experiment.hpp"
#include "recpol/rng.hpp"

using namespace recpol;

namespace {

struct Setup {
  PopulationDistribution pop;
  LossSpec unit;
  AgentModel rational;
  AgentModel selective;
  BaselineJoint baseline;

  Setup()
      : pop(population_distribution(default_population())),
        unit(LossSpec::unit()),
        rational(perfect_compliance_model(sophisticated_active(pop, unit))),
        selective(selective_compliance_model({"Engineering"},
                                             sophisticated_active(pop, unit),
                                             pop.u_support())),
        baseline(baseline_joint_from_model(pop, rational)) {}
};

}  // namespace

TEST_CASE("triage effect of an all-none policy is the unassisted loss") {
  const Setup s;
  const Policy none = Policy::all_none(s.pop.x_support());
  CHECK(triage_effect(none, s.baseline, s.unit) ==
        doctest::Approx(s.baseline.baseline_loss(s.unit)));
  CHECK(triage_effect(none, s.baseline, s.unit) == doctest::Approx(6.0 / 25));
}

TEST_CASE("hand-computed te/re for the Complementary policy") {
  const Setup s;
  const Policy complementary = table3_policies().complementary;
  // Following the recommendations literally: 2 + 1 + 1 + 0 + 3 errors.
  CHECK(triage_effect(complementary, s.baseline, s.unit) ==
        doctest::Approx(7.0 / 25));
  const double re =
      response_effect(complementary, s.pop, s.selective, s.rational, s.unit);
  CHECK(re == doctest::Approx(-4.0 / 25));  // overrides win back 4 errors
  const double total =
      evaluate_policy_exact(complementary, s.pop, s.selective, s.unit);
  CHECK(total == doctest::Approx(3.0 / 25));
  CHECK(total == doctest::Approx(triage_effect(complementary, s.baseline, s.unit) + re));
  CHECK(re < 0.0);
}

TEST_CASE("response effect vanishes when the agent follows exactly") {
  const Setup s;
  for (const auto& policy :
       {table3_policies().predictive, table3_policies().triage,
        Policy::all_none(s.pop.x_support())}) {
    CHECK(response_effect(policy, s.pop, s.rational, s.rational, s.unit) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("compliance split: ignore part and active shift") {
  const Setup s;
  const Policy complementary = table3_policies().complementary;
  const auto parts =
      compliance_response_effect(complementary, s.pop, s.selective, s.rational, s.unit);
  // Engineering mass with a directional recommendation is 10/25; overriding
  // an N with a hire on an all-good signal saves the full unit each time,
  // but only the 4 N-recommended Engineering applicants (types A and E) move.
  CHECK(parts.re_ignore == doctest::Approx(-4.0 / 25));
  CHECK(parts.re_active_shift == doctest::Approx(0.0));

  // Perfect compliance leaves no ignore mass.
  const auto perfect_parts = compliance_response_effect(
      complementary, s.pop, s.rational, s.rational, s.unit);
  CHECK(perfect_parts.re_ignore == doctest::Approx(0.0));

  const auto parts_sum = parts.re_ignore + parts.re_active_shift;
  CHECK(parts_sum == doctest::Approx(response_effect(complementary, s.pop, s.selective,
                                                     s.rational, s.unit)));
}

TEST_CASE("compliance objective equals exact evaluation") {
  const Setup s;
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, Recommendation> m;
    for (const auto& x : s.pop.x_support()) {
      const double v = rng.uniform();
      m[x] = v < 1.0 / 3 ? Recommendation::NotHire
                         : v < 2.0 / 3 ? Recommendation::None : Recommendation::Hire;
    }
    const Policy policy(m);
    const double q = rng.uniform();
    const AgentModel model(
        [q](const std::string&, Recommendation) { return q; },
        probability_matching_active(s.pop));
    CHECK(compliance_objective(policy, s.pop, model, s.unit) ==
          doctest::Approx(evaluate_policy_exact(policy, s.pop, model, s.unit))
              .epsilon(1e-12));
  }
}

TEST_CASE("mixture linearity of the compliance objective") {
  const PopulationDistribution pop(FinitePmf<PopAtom>({
      {PopAtom{"x", "u", Outcome::Good}, 0.35},
      {PopAtom{"x", "u", Outcome::Bad}, 0.65},
  }));
  const LossSpec spec(2.0, 1.5);
  const Policy hire = Policy::constant({"x"}, Recommendation::Hire);
  const AgentModel half(
      [](const std::string&, Recommendation) { return 0.5; }, random_active(0.25));
  const AgentModel comply = perfect_compliance_model(random_active(0.25));
  const AgentModel ignore(
      [](const std::string&, Recommendation) { return 0.0; }, random_active(0.25));
  const double mixed = compliance_objective(hire, pop, half, spec);
  const double followed = compliance_objective(hire, pop, comply, spec);
  const double active = compliance_objective(hire, pop, ignore, spec);
  CHECK(mixed == doctest::Approx(0.5 * followed + 0.5 * active));
}

TEST_CASE("decomposition report sums per-x rows to the aggregates") {
  const Setup s;
  const auto report = decompose(table3_policies().complementary_triage, s.pop,
                                s.selective, s.rational, s.unit);
  double te = 0.0, re = 0.0;
  for (const auto& row : report.per_x) {
    te += row.te;
    re += row.re;
  }
  CHECK(te == doctest::Approx(report.te).epsilon(1e-12));
  CHECK(re == doctest::Approx(report.re).epsilon(1e-12));
  CHECK(report.total == doctest::Approx(report.te + report.re).epsilon(1e-9));
  CHECK(report.per_x.size() == 5);
}

TEST_CASE("pareto front basics") {
  const Policy p = Policy::constant({"x"}, Recommendation::None);
  SUBCASE("single entry is its own front") {
    const auto front = pareto_front({{p, 1.0, 2.0}});
    CHECK(front.size() == 1);
  }
  SUBCASE("dominated point drops") {
    const auto front = pareto_front({{p, 1.0, 0.0}, {p, 0.0, 1.0}, {p, 1.0, 1.0}});
    CHECK(front.size() == 2);
    CHECK(front[0].te == 1.0);
    CHECK(front[1].te == 0.0);
  }
  SUBCASE("duplicates survive") {
    const auto front = pareto_front({{p, 1.0, 1.0}, {p, 1.0, 1.0}});
    CHECK(front.size() == 2);
  }
}

TEST_CASE("te-argmin and total-argmin lie on the front over all policies") {
  const Setup s;
  const PolicyEnumeration all(s.pop.x_support());
  std::vector<ParetoEntry> entries;
  std::size_t best_te = 0, best_total = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto report =
        decompose(all.at(i), s.pop, s.selective, s.rational, s.unit);
    entries.push_back({all.at(i), report.te, report.re});
    if (report.te < entries[best_te].te) best_te = i;
    if (report.te + report.re <
        entries[best_total].te + entries[best_total].re) {
      best_total = i;
    }
  }
  const auto front = pareto_front(entries);
  const auto on_front = [&](std::size_t idx) {
    return std::any_of(front.begin(), front.end(), [&](const ParetoEntry& e) {
      return e.policy == entries[idx].policy;
    });
  };
  CHECK(on_front(best_te));
  CHECK(on_front(best_total));
  // The te-argmin is the triage solution on this baseline.
  CHECK(entries[best_te].te ==
        doctest::Approx(triage_effect(optimal_triage_policy(s.baseline, s.unit),
                                      s.baseline, s.unit)));
}
