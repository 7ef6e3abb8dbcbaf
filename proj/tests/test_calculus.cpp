#include <doctest.h>

#include <random>

#include "fairbroker/calculus.hpp"
#include "fairbroker/errors.hpp"
#include "oracles.hpp"

using namespace fairbroker;

namespace {

constexpr auto F = FairnessState::CurrFair;
constexpr auto X = FairnessState::CurrUnfair;
constexpr auto U = FairnessState::CurrUnsure;

EpochLedger ledger(long fair, long unsure, long moved) {
  EpochLedger l;
  l.fair_units = fair;
  l.unsure_units = unsure;
  l.moved_units = moved;
  return l;
}

}  // namespace

TEST_CASE("classify_trace examples") {
  CHECK(classify_trace({U, U, F, U, F, U, F, U}, 3) == TraceClass::BrokeredFair);
  CHECK(classify_trace({U, U, U, U, U}, 3) == TraceClass::Unfair);
  CHECK(classify_trace({F, F, U, U, U, U}, 3) == TraceClass::Unfair);
  CHECK(classify_trace({F, F}, 3) == TraceClass::Indeterminate);
  CHECK_THROWS_AS(classify_trace({}, 3), DomainError);
  CHECK_THROWS_AS(classify_trace({F}, 0), DomainError);
}

TEST_CASE("classify_trace matches the sliding-window oracle on short traces") {
  for (int len = 1; len <= 8; ++len) {
    int count = 1;
    for (int i = 0; i < len; ++i) count *= 3;
    for (int code = 0; code < count; ++code) {
      FairnessTrace t;
      for (int c = code, i = 0; i < len; ++i, c /= 3) t.push_back(static_cast<FairnessState>(c % 3));
      for (int w = 1; w <= 5; ++w) REQUIRE(classify_trace(t, w) == oracle::window_classify(t, w));
    }
  }
}

TEST_CASE("classify_trace edge properties") {
  for (int len = 1; len <= 10; ++len) {
    FairnessTrace all_fair(len, F), none_fair(len, X);
    for (int w = 1; w <= len; ++w) {
      CHECK(classify_trace(all_fair, w) == TraceClass::BrokeredFair);
      CHECK(classify_trace(none_fair, w) != TraceClass::BrokeredFair);
    }
  }
}

TEST_CASE("estimate_triple examples") {
  auto cur = ledger(30, 10, 2);
  auto prev = ledger(25, 15, 5);
  auto t = estimate_triple(cur, &prev);
  CHECK(t.phi == doctest::Approx(0.75));
  CHECK(t.tau == doctest::Approx(0.075));
  CHECK(t.mu == doctest::Approx(0.175));

  auto low_prev = ledger(30, 10, 2);
  auto rising = estimate_triple(ledger(30, 10, 4), &low_prev);
  CHECK(rising.tau == 0.0);
  CHECK(rising.mu == doctest::Approx(1.0 - rising.phi));

  auto full_prev = ledger(40, 0, 0);
  auto full = estimate_triple(ledger(40, 0, 0), &full_prev);
  CHECK(full.phi == 1.0);
  CHECK(full.tau == 0.0);
  CHECK(full.mu == 0.0);

  CHECK_THROWS_AS(estimate_triple(ledger(0, 0, 0), nullptr), NoSamplesError);
}

TEST_CASE("estimate_triple matches exact rational arithmetic") {
  std::mt19937 gen(2024);
  int clamped = 0;
  for (int i = 0; i < 500; ++i) {
    const long f = gen() % 60, u = 1 + gen() % 60, m = gen() % (u + 1);
    const long pf = gen() % 60, pu = 1 + gen() % 60, pm = gen() % (pf + pu + 1);
    auto cur = ledger(f, u, m);
    auto prev = ledger(pf, pu, pm);
    auto t = estimate_triple(cur, &prev);
    auto e = oracle::exact_triple(f, u, m, pf, pu, pm);
    REQUIRE(t.phi == doctest::Approx(oracle::to_double(e.phi)).epsilon(1e-12));
    REQUIRE(std::abs(t.tau - oracle::to_double(e.tau)) <= 1e-12);
    REQUIRE(std::abs(t.mu - oracle::to_double(e.mu)) <= 1e-12);
    REQUIRE(t.boundary_adjusted == e.boundary_adjusted);
    REQUIRE(std::abs(t.phi + t.mu + t.tau - 1.0) <= 1e-9);
    clamped += e.boundary_adjusted;
  }
  CHECK(clamped > 0);
}

TEST_CASE("trend mode weights recent epochs more") {
  std::vector<EpochLedger> history{ledger(10, 10, 10), ledger(10, 10, 0)};
  auto cur = ledger(10, 10, 0);
  auto t = estimate_triple_trend(cur, history);
  // weighted past ratio (1*0 + 0.5*0.5) / 1.5
  CHECK(t.tau == doctest::Approx(0.25 / 1.5));
  CHECK(estimate_triple_trend(cur, {}).tau == 0.0);
}

TEST_CASE("decide examples") {
  const DecisionThresholds th{0.6, 0.2};
  CHECK(decide({0.7, 0.1, 0.2}, th));
  CHECK(decide({0.5, 0.1, 0.4}, th));
  CHECK_FALSE(decide({0.3, 0.6, 0.1}, th));
}

TEST_CASE("decide is monotone in phi") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double tau = d(gen) * 0.5;
    const double phi = d(gen) * (1.0 - tau);
    const double mu = 1.0 - phi - tau;
    const double step = d(gen) * mu;
    const DecisionThresholds th{0.5 + d(gen) * 0.45, 0.05 + d(gen) * 0.45};
    if (decide({phi, mu, tau}, th)) REQUIRE(decide({phi + step, mu - step, tau}, th));
  }
}

TEST_CASE("quotient examples and identities") {
  auto q = quotient({0.8, 0.1, 0.1});
  CHECK(q.fq == doctest::Approx(0.85));
  CHECK(q.uq == doctest::Approx(0.15));
  CHECK(quotient({1.0, 0.0, 0.0}).fq == 1.0);
  auto half = quotient({0.0, 0.0, 1.0});
  CHECK(half.fq == 0.5);
  CHECK(half.uq == 0.5);

  std::mt19937 gen(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double phi = d(gen), tau = d(gen) * (1.0 - phi);
    auto r = quotient({phi, 1.0 - phi - tau, tau});
    REQUIRE(r.fq + r.uq == 1.0);
    REQUIRE(r.fq >= 0.0);
    REQUIRE(r.fq <= 1.0);
  }
}

TEST_CASE("threshold validation") {
  CHECK_NOTHROW(DecisionThresholds{0.6, 0.2}.validate());
  CHECK_THROWS_AS((DecisionThresholds{1.2, 0.2}.validate()), DomainError);
  CHECK_THROWS_AS((DecisionThresholds{0.6, -0.1}.validate()), DomainError);
}
