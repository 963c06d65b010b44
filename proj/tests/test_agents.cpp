#include <cmath>
#include <map>

#include "doctest.h"
#include "recpol/agents.hpp"
#include "recpol/experiment.hpp"

using namespace recpol;

namespace {

constexpr Decision N = Decision::NotHire;
constexpr Decision H = Decision::Hire;

PopulationDistribution tiny_population() {
  // Two signals: "sure" is always good, "coin" is good 60% of the time.
  return PopulationDistribution(FinitePmf<PopAtom>({
      {PopAtom{"a", "sure", Outcome::Good}, 0.5},
      {PopAtom{"b", "coin", Outcome::Good}, 0.3},
      {PopAtom{"b", "coin", Outcome::Bad}, 0.2},
  }));
}

}  // namespace

TEST_CASE("classification covers the full table") {
  CHECK(classify_response({N, N, N}) == ResponseType::Ignore);
  CHECK(classify_response({H, H, H}) == ResponseType::Ignore);
  CHECK(classify_response({N, N, H}) == ResponseType::Comply);
  CHECK(classify_response({N, H, H}) == ResponseType::Comply);
  CHECK(classify_response({H, N, N}) == ResponseType::Defy);
  CHECK(classify_response({H, H, N}) == ResponseType::Defy);
  CHECK(classify_response({H, N, H}) == ResponseType::Change);
  CHECK(classify_response({N, H, N}) == ResponseType::Change);
}

TEST_CASE("monotonicity keeps exactly Ignore and Comply") {
  int monotone = 0;
  for (const Decision a : {N, H}) {
    for (const Decision b : {N, H}) {
      for (const Decision c : {N, H}) {
        const PotentialTriple t{a, b, c};
        const auto type = classify_response(t);
        CHECK(is_monotone(t) ==
              (type == ResponseType::Ignore || type == ResponseType::Comply));
        if (is_monotone(t)) ++monotone;
      }
    }
  }
  CHECK(monotone == 4);
}

TEST_CASE("compact representation is a bijection on monotone triples") {
  CHECK(to_compact({N, N, N}) == CompactResponse{N, ComplianceType::Ignore});
  CHECK(to_compact({N, N, H}) == CompactResponse{N, ComplianceType::Comply});
  CHECK(to_compact({N, H, H}) == CompactResponse{H, ComplianceType::Comply});
  CHECK(to_compact({H, H, H}) == CompactResponse{H, ComplianceType::Ignore});
  CHECK(from_compact({N, ComplianceType::Ignore}) == PotentialTriple{N, N, N});
  CHECK(from_compact({N, ComplianceType::Comply}) == PotentialTriple{N, N, H});
  for (const Decision active : {N, H}) {
    for (const auto c : {ComplianceType::Ignore, ComplianceType::Comply}) {
      const CompactResponse compact{active, c};
      CHECK(to_compact(from_compact(compact)) == compact);
    }
  }
  CHECK_THROWS_AS(to_compact({H, N, N}), std::invalid_argument);
  CHECK_THROWS_AS(to_compact({N, H, N}), std::invalid_argument);
}

TEST_CASE("realize_decision respects compliance") {
  Rng rng(11);
  const AgentModel full = perfect_compliance_model(random_active(0.0));
  CHECK(realize_decision(full, "u", Recommendation::Hire, rng) == H);
  CHECK(realize_decision(full, "u", Recommendation::NotHire, rng) == N);

  const AgentModel never(
      [](const std::string&, Recommendation) { return 0.0; }, random_active(1.0));
  CHECK(realize_decision(never, "u", Recommendation::NotHire, rng) == H);
}

TEST_CASE("selective model overrides recommendations on ignored signals") {
  const PopulationDistribution pop = population_distribution(default_population());
  const AgentModel model = selective_compliance_model(
      {"Engineering"}, sophisticated_active(pop, LossSpec::unit()), pop.u_support());
  Rng rng(3);
  CHECK(realize_decision(model, "Engineering", Recommendation::NotHire, rng) == H);
  CHECK(realize_decision(model, "Sales", Recommendation::NotHire, rng) == N);
  CHECK_THROWS_AS(
      selective_compliance_model({"Astronauts"}, random_active(0.5), pop.u_support()),
      std::invalid_argument);
}

TEST_CASE("decision_pmf is the exact law of realize_decision") {
  const AgentModel half(
      [](const std::string&, Recommendation) { return 0.5; }, random_active(1.0));
  const auto law = decision_pmf(half, "u", Recommendation::NotHire);
  CHECK(law.mass_where([](Decision d) { return d == N; }) == doctest::Approx(0.5));
  CHECK(law.mass_where([](Decision d) { return d == H; }) == doctest::Approx(0.5));

  const AgentModel none_model = perfect_compliance_model(random_active(0.6));
  const auto none_law = decision_pmf(none_model, "u", Recommendation::None);
  CHECK(none_law.mass_where([](Decision d) { return d == H; }) ==
        doctest::Approx(0.6));

  const auto sure = decision_pmf(perfect_compliance_model(random_active(0.0)), "u",
                                 Recommendation::Hire);
  CHECK(sure.mass_where([](Decision d) { return d == H; }) == doctest::Approx(1.0));
}

TEST_CASE("seeded frequencies converge to decision_pmf within 4/sqrt(n)") {
  const PopulationDistribution pop = tiny_population();
  const AgentModel model(
      [](const std::string& u, Recommendation r) {
        return u == "sure" ? 0.2 : (r == Recommendation::Hire ? 0.8 : 0.6);
      },
      probability_matching_active(pop));
  const int n = 40000;
  int trial = 0;
  for (const auto& u : pop.u_support()) {
    for (const Recommendation r :
         {Recommendation::NotHire, Recommendation::None, Recommendation::Hire}) {
      Rng rng = Rng::derive(17, 100, ++trial);
      int hires = 0;
      for (int i = 0; i < n; ++i) {
        if (realize_decision(model, u, r, rng) == H) ++hires;
      }
      const double expect =
          decision_pmf(model, u, r).mass_where([](Decision d) { return d == H; });
      CHECK(std::abs(double(hires) / n - expect) <= 4.0 / std::sqrt(double(n)));
    }
  }
}

TEST_CASE("shared randomness always yields monotone potential triples") {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const double qn = rng.uniform(), qh = rng.uniform(), a = rng.uniform();
    const AgentModel model(
        [qn, qh](const std::string&, Recommendation r) {
          return r == Recommendation::NotHire ? qn : qh;
        },
        [a](const std::string&) { return a; });
    const PotentialTriple t = realize_potential_triple(model, "u", rng);
    CHECK(is_monotone(t));
    // The none branch is the active decision by construction.
    CHECK(t.on_none == to_compact(t).active);
  }
}

TEST_CASE("built-in active rules") {
  const PopulationDistribution pop = tiny_population();
  const auto soph = sophisticated_active(pop, LossSpec::unit());
  CHECK(soph("sure") == 1.0);
  CHECK(soph("coin") == 1.0);  // 0.6 clears the even-odds threshold
  const auto soph_costly = sophisticated_active(pop, LossSpec(1.0, 2.0));
  CHECK(soph_costly("coin") == 0.0);  // hiring a 60% good applicant now loses
  const auto match = probability_matching_active(pop);
  CHECK(match("coin") == doctest::Approx(0.6));
  CHECK(match("sure") == doctest::Approx(1.0));
  CHECK(random_active(0.5)("anything") == 0.5);
  CHECK_THROWS_AS(random_active(1.5), std::invalid_argument);
  CHECK_THROWS_AS(match("unknown"), std::invalid_argument);
}

TEST_CASE("probability matching on the experiment population") {
  const PopulationDistribution pop = population_distribution(default_population());
  CHECK(probability_matching_active(pop)("Sales") == doctest::Approx(0.6));
  CHECK(sophisticated_active(pop, LossSpec::unit())("Engineering") == 1.0);
}
