#include <doctest.h>

#include <sstream>

#include "fairbroker/errors.hpp"
#include "fairbroker/verifier.hpp"

using namespace fairbroker;

namespace {

SimulatedBroker make_broker(BrokerPolicy policy, int capacity = 1000) {
  return SimulatedBroker(std::move(policy), make_suppliers(uniform_suppliers(5, capacity, 1.0)));
}

ProvisioningRequest req(int size) { return {size, Color{0}, 1.0}; }

Sample sample(int size, std::vector<int> observed, std::vector<int> reference) {
  return Sample{0, req(size), Apportionment{std::move(observed)}, Apportionment{std::move(reference)}};
}

EpochLedger ledger(long fair, long unsure, long moved) {
  EpochLedger l;
  l.fair_units = fair;
  l.unsure_units = unsure;
  l.moved_units = moved;
  return l;
}

}  // namespace

TEST_CASE("simple_fairness_test examples") {
  auto fair = make_broker(BrokerPolicy::epoch_fair());
  auto r = simple_fairness_test(fair, req(10), 1);
  CHECK(r.state == FairnessState::CurrFair);
  CHECK(r.observed.counts == std::vector<int>{2, 2, 2, 2, 2});

  auto biased = make_broker(BrokerPolicy::biased(0, 0.40));
  auto b = simple_fairness_test(biased, req(10), 1);
  CHECK(b.state == FairnessState::CurrUnsure);
  CHECK(b.observed.counts == std::vector<int>{4, 2, 2, 1, 1});

  auto specs = uniform_suppliers(5, 1000, 1.0);
  specs[2].capacity[0] = 0;
  SimulatedBroker exhausted(BrokerPolicy::epoch_fair(), make_suppliers(specs));
  auto e = simple_fairness_test(exhausted, req(10), 1);
  CHECK(e.state == FairnessState::CurrFair);
  CHECK(e.observed.counts == std::vector<int>{3, 3, 0, 2, 2});
  CHECK(e.reference.counts == std::vector<int>{3, 3, 0, 2, 2});
}

TEST_CASE("run_epoch on a fair broker ends nearly fully fair") {
  auto broker = make_broker(BrokerPolicy::epoch_fair());
  VerifierConfig cfg;
  cfg.consolidation_period = 10;
  Rng rng(42);
  auto run = run_epoch(broker, cfg, rng);
  CHECK(run.trace.size() == 5);
  CHECK(run.ledger.total() == 50);
  CHECK(run.ledger.unsure_units <= 5);
}

TEST_CASE("run_epoch on a heavily biased broker keeps phi low") {
  auto broker = make_broker(BrokerPolicy::biased(0, 0.45));
  VerifierConfig cfg;
  Rng rng(42);
  auto run = run_epoch(broker, cfg, rng);
  CHECK(estimate_triple(run.ledger, nullptr).phi < 0.5);
}

TEST_CASE("run_epoch rejects a zero sample budget") {
  auto broker = make_broker(BrokerPolicy::epoch_fair());
  VerifierConfig cfg;
  cfg.samples_per_epoch = 0;
  Rng rng(1);
  CHECK_THROWS_AS(run_epoch(broker, cfg, rng), ConfigError);
}

TEST_CASE("run_epoch aborts when every probe is rejected") {
  auto broker = make_broker(BrokerPolicy::epoch_fair(), 0);
  VerifierConfig cfg;
  Rng rng(1);
  CHECK_THROWS_AS(run_epoch(broker, cfg, rng), EpochAbortedError);
}

TEST_CASE("consolidate examples") {
  SUBCASE("exact equity promotes every unsure entry") {
    FairnessTables t;
    EpochLedger l;
    for (int i = 0; i < 5; ++i) {
      t.add(true, sample(10, {2, 2, 2, 2, 2}, {2, 2, 2, 2, 2}));
      l.fair_units++;
    }
    t.add(false, sample(10, {3, 1, 2, 2, 2}, {2, 2, 2, 2, 2}));
    t.add(false, sample(10, {1, 3, 2, 2, 2}, {2, 2, 2, 2, 2}));
    l.unsure_units += 2;
    CHECK(consolidate(t, l, 1) == FairnessState::CurrFair);
    CHECK(t.unsure_count() == 0);
    CHECK(t.fair_count() == 7);
    CHECK(l.moved_units == 2);
    CHECK(l.fair_units == 7);
  }
  SUBCASE("persistent bias with a majority of unsure entries is unfair") {
    FairnessTables t;
    EpochLedger l;
    for (int i = 0; i < 9; ++i) t.add(false, sample(10, {4, 1, 2, 2, 1}, {2, 2, 2, 2, 2}));
    t.add(false, sample(10, {3, 2, 1, 1, 3}, {2, 2, 2, 2, 2}));
    t.add(false, sample(10, {3, 2, 1, 1, 3}, {2, 2, 2, 2, 2}));
    t.add(false, sample(10, {3, 2, 0, 0, 5}, {2, 2, 2, 2, 2}));
    l.unsure_units = 12;
    CHECK(consolidate(t, l, 1) == FairnessState::CurrUnfair);
    CHECK(l.moved_units == 0);
    CHECK(t.unsure_count() == 12);
  }
  SUBCASE("bias with a fair majority stays unsure") {
    FairnessTables t;
    EpochLedger l;
    for (int i = 0; i < 3; ++i) t.add(true, sample(10, {2, 2, 2, 2, 2}, {2, 2, 2, 2, 2}));
    t.add(false, sample(10, {10, 0, 0, 0, 0}, {2, 2, 2, 2, 2}));
    CHECK(consolidate(t, l, 1) == FairnessState::CurrUnsure);
  }
  SUBCASE("empty tables") {
    FairnessTables t;
    EpochLedger l;
    l.moved_units = 3;
    CHECK(consolidate(t, l, 1) == FairnessState::CurrUnsure);
    CHECK(l.moved_units == 3);
  }
}

TEST_CASE("verdict examples") {
  VerifierConfig cfg;
  const FairnessTrace all_fair(5, FairnessState::CurrFair);

  auto prev_full = ledger(40, 0, 0);
  auto v = verdict(ledger(40, 0, 0), &prev_full, all_fair, cfg);
  CHECK(v.decision);
  CHECK(v.fq == 1.0);

  auto low = verdict(ledger(20, 80, 0), nullptr, FairnessTrace(5, FairnessState::CurrUnsure), cfg);
  CHECK_FALSE(low.decision);
  CHECK(low.fq < 0.5);

  auto prev = ledger(25, 15, 5);
  auto mid = verdict(ledger(30, 10, 2), &prev, all_fair, cfg);
  CHECK(mid.fq == doctest::Approx(0.7875));

  auto none = verdict(EpochLedger{}, nullptr, {}, cfg);
  CHECK(none.no_samples);
  CHECK_FALSE(none.decision);
  CHECK(none.fq == 0.5);
}

TEST_CASE("isolate_unfair_sizes on a size-dependent broker") {
  auto broker = make_broker(BrokerPolicy::size_dependent(2, 0.40, 40));
  VerifierConfig cfg;
  Rng rng(8);
  auto run = run_epoch(broker, cfg, rng);
  auto sizes = isolate_unfair_sizes(run.tables, cfg.equity_tolerance);
  CHECK_FALSE(sizes.empty());
  for (int s : sizes) {
    CHECK(s > 40);
    CHECK(s <= 50);
  }
}

TEST_CASE("isolate_unfair_sizes returns nothing for fair or uniformly biased brokers") {
  VerifierConfig cfg;
  Rng rng(3);
  auto fair = make_broker(BrokerPolicy::epoch_fair());
  auto fair_run = run_epoch(fair, cfg, rng);
  CHECK(isolate_unfair_sizes(fair_run.tables, 1).empty());

  auto biased = make_broker(BrokerPolicy::biased(1, 0.40));
  auto biased_run = run_epoch(biased, cfg, rng);
  CHECK(isolate_unfair_sizes(biased_run.tables, 1).empty());

  CHECK(isolate_unfair_sizes(FairnessTables{}, 1).empty());
}

TEST_CASE("isolated sizes stay within [1, MAX_X]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto broker = make_broker(BrokerPolicy::size_dependent(2, 0.30, static_cast<int>(10 + seed)), 100000);
    VerifierConfig cfg;
    cfg.max_x = 30;
    Rng rng(seed);
    auto run = run_epoch(broker, cfg, rng);
    for (int s : isolate_unfair_sizes(run.tables, 1, {cfg.max_x, 2, true})) {
      CHECK(s >= 1);
      CHECK(s <= cfg.max_x);
    }
  }
}

TEST_CASE("tables conserve samples and moved units never decrease") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto broker = make_broker(seed % 2 ? BrokerPolicy::epoch_fair() : BrokerPolicy::biased(0, 0.3));
    VerifierConfig cfg;
    Rng rng(seed);
    long last_moved = 0;
    for (long limit = 1; limit <= cfg.samples_per_epoch; ++limit) {
      Rng copy = rng;
      auto run = run_epoch(broker, cfg, copy, 0, limit);
      REQUIRE(run.tables.size() == limit);
      REQUIRE(run.ledger.total() == limit);
      REQUIRE(run.tables.fair_count() == run.ledger.fair_units);
      REQUIRE(run.ledger.moved_units >= last_moved);
      last_moved = run.ledger.moved_units;
    }
  }
}

TEST_CASE("epochs are isolated from each other") {
  auto broker = make_broker(BrokerPolicy::epoch_fair());
  VerifierConfig cfg;
  FairnessAuditor auditor(cfg);
  Rng rng(4);
  auditor.run_epoch(broker, rng);
  const auto& second = auditor.run_epoch(broker, rng);
  CHECK(second.ledger.epoch_index == 1);
  CHECK(second.tables.size() == cfg.samples_per_epoch);
  CHECK(second.ledger.moved_units <= second.ledger.total());
  CHECK(auditor.samples_taken() == 2 * cfg.samples_per_epoch);
  CHECK(auditor.trace().size() == 10);
}

TEST_CASE("audit log records probes and consolidations") {
  auto broker = make_broker(BrokerPolicy::biased(0, 0.3));
  VerifierConfig cfg;
  std::ostringstream out;
  AuditLog log(out);
  Rng rng(6);
  auto run = run_epoch(broker, cfg, rng, 0, std::nullopt, &log);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == AuditLog::kHeader);
  long probes = 0, consolidations = 0;
  while (std::getline(in, line)) {
    probes += line.rfind("probe,", 0) == 0;
    consolidations += line.rfind("consolidate,", 0) == 0;
  }
  CHECK(probes == cfg.samples_per_epoch);
  CHECK(consolidations == static_cast<long>(run.trace.size()));
}

TEST_CASE("fair brokers reach a fair final consolidation in most seeds") {
  int fair_final = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto broker = make_broker(BrokerPolicy::epoch_fair());
    Rng rng(seed);
    auto run = run_epoch(broker, VerifierConfig{}, rng);
    fair_final += run.trace.back() == FairnessState::CurrFair;
  }
  CHECK(fair_final >= 90);
}

TEST_CASE("biased brokers at rate 0.30 or more are rejected in most seeds") {
  int rejected = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const double rate = 0.30 + 0.15 * rng.uniform_real();
    auto broker = make_broker(BrokerPolicy::biased(static_cast<int>(seed % 5), rate));
    FairnessAuditor auditor(VerifierConfig{});
    auditor.run_epoch(broker, rng);
    rejected += !auditor.verdict().decision;
  }
  CHECK(rejected >= 90);
}
