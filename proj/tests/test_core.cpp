#include <map>
#include <string>

#include "doctest.h"
#include "recpol/core.hpp"
#include "recpol/pmf.hpp"
#include "recpol/rng.hpp"

using namespace recpol;

TEST_CASE("loss matches the cost specification") {
  const LossSpec unit = LossSpec::unit();
  CHECK(loss(unit, Outcome::Good, Decision::NotHire) == 1.0);
  CHECK(loss(unit, Outcome::Good, Decision::Hire) == 0.0);
  CHECK(loss(unit, Outcome::Bad, Decision::NotHire) == 0.0);
  const LossSpec spec(2.0, 3.0);
  CHECK(loss(spec, Outcome::Bad, Decision::Hire) == 3.0);
  CHECK(loss(spec, Outcome::Good, Decision::NotHire) == 2.0);
}

TEST_CASE("loss is zero exactly on correct decisions") {
  const LossSpec spec(0.7, 4.2);
  for (const Outcome y : {Outcome::Bad, Outcome::Good}) {
    for (const Decision d : {Decision::NotHire, Decision::Hire}) {
      const bool correct = d == optimal_decision(y);
      CHECK((loss(spec, y, d) == 0.0) == correct);
    }
  }
}

TEST_CASE("LossSpec rejects non-positive costs") {
  CHECK_THROWS_AS(LossSpec(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("pmf expectation basics") {
  using Pmf = FinitePmf<int>;
  const Pmf uniform({{0, 0.5}, {1, 0.5}});
  CHECK(uniform.expectation([](int) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(uniform.expectation([](int v) { return double(v); }) == doctest::Approx(0.5));
  const Pmf point({{7, 1.0}});
  CHECK(point.expectation([](int v) { return double(v); }) == doctest::Approx(7.0));
}

TEST_CASE("pmf validation") {
  using Pmf = FinitePmf<int>;
  CHECK_THROWS_AS(Pmf({{0, 0.5}, {0, 0.5}}), std::invalid_argument);  // duplicate atom
  CHECK_THROWS_AS(Pmf({{0, 0.7}, {1, 0.2}}), std::invalid_argument);  // not normalized
  CHECK_THROWS_AS(Pmf({{0, -0.1}, {1, 1.1}}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({}), std::invalid_argument);
}

TEST_CASE("expectation of an indicator is the event mass") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FinitePmf<int>::Entry> entries;
    const int n = 1 + int(rng.below(10));
    double total = 0.0;
    std::vector<double> raw;
    for (int i = 0; i < n; ++i) {
      raw.push_back(rng.uniform(0.01, 1.0));
      total += raw.back();
    }
    for (int i = 0; i < n; ++i) entries.push_back({i, raw[i] / total});
    const FinitePmf<int> pmf(entries);
    const auto pred = [](int v) { return v % 2 == 0; };
    const double mass = pmf.mass_where(pred);
    const double ind = pmf.expectation([&](int v) { return pred(v) ? 1.0 : 0.0; });
    CHECK(mass == doctest::Approx(ind).epsilon(1e-12));
  }
}

TEST_CASE("expectation is atom-order independent") {
  // Same distribution assembled in two different insertion orders.
  std::vector<FinitePmf<int>::Entry> fwd, rev;
  double total = 0.0;
  for (int i = 0; i < 20; ++i) total += 1.0 / (1 + i);
  for (int i = 0; i < 20; ++i) fwd.push_back({i, (1.0 / (1 + i)) / total});
  rev.assign(fwd.rbegin(), fwd.rend());
  const auto fn = [](int v) { return std::sin(v * 0.37) * 1e3; };
  CHECK(FinitePmf<int>(fwd).expectation(fn) == FinitePmf<int>(rev).expectation(fn));
}

TEST_CASE("token round trips") {
  for (const auto r : {Recommendation::NotHire, Recommendation::None,
                       Recommendation::Hire}) {
    CHECK(recommendation_from_token(to_token(r)) == r);
  }
  CHECK_THROWS_AS(outcome_from_token("X"), std::invalid_argument);
  CHECK_THROWS_AS(decision_from_token("none"), std::invalid_argument);
}

TEST_CASE("derived rng streams are stable and independent of draw order") {
  Rng a = Rng::derive(1, 2, 3);
  Rng b = Rng::derive(1, 2, 3);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng c = Rng::derive(1, 2, 4);
  CHECK(c.next() != Rng::derive(1, 2, 3).next());
  Rng u(99);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}
