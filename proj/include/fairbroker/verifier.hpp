#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "fairbroker/calculus.hpp"
#include "fairbroker/cloudsim.hpp"
#include "fairbroker/domain.hpp"
#include "fairbroker/random.hpp"

namespace fairbroker {

struct VerifierConfig {
  int max_x = 50;
  long samples_per_epoch = 50;
  std::chrono::seconds epoch_length{3600};  // logical time only
  DecisionThresholds thresholds{};
  long equity_tolerance = 1;
  long consolidation_period = 0;  // 0: samples_per_epoch / 5
  int window = 4;
  std::uint32_t color_space = 1;
  double cost_target = 1.0;
  TauMode tau_mode = TauMode::TwoEpoch;
  int isolation_cap = 2;
  // A probe rejected by the broker is retried; an epoch gives up after
  // samples_per_epoch * max_attempt_factor attempts.
  long max_attempt_factor = 4;

  // Throws ConfigError.
  void validate() const;
  long effective_period() const;

  friend bool operator==(const VerifierConfig&, const VerifierConfig&) = default;
};

// One observed provisioning transaction with the reference it was judged
// against.
struct Sample {
  long probe_index = 0;
  ProvisioningRequest request;
  Apportionment observed;
  Apportionment reference;
};

struct TableKey {
  int size = 0;
  std::uint32_t color = 0;

  friend auto operator<=>(const TableKey&, const TableKey&) = default;
};

// fair_table and unsure_table, indexed by (request size, color); each row
// holds the per-supplier apportionments observed for that cell.
class FairnessTables {
 public:
  using Table = std::map<TableKey, std::vector<Sample>>;

  void add(bool fair, Sample sample);
  // Moves every unsure entry into the fair table; returns how many moved.
  long promote_unsure();
  void clear();

  const Table& fair() const { return fair_; }
  const Table& unsure() const { return unsure_; }
  long fair_count() const { return fair_count_; }
  long unsure_count() const { return unsure_count_; }
  long size() const { return fair_count_ + unsure_count_; }

  // Calls fn(const Sample&) for every entry of both tables.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto* t : {&fair_, &unsure_}) {
      for (const auto& [key, row] : *t) {
        for (const auto& s : row) fn(s);
      }
    }
  }

 private:
  Table fair_;
  Table unsure_;
  long fair_count_ = 0;
  long unsure_count_ = 0;
};

// Line-delimited audit trail, one comma-separated record per event:
//   kind,epoch,index,size,color,apportionment,state,moved
// kind is probe, skip or consolidate; apportionment is ';'-joined counts.
class AuditLog {
 public:
  explicit AuditLog(std::ostream& out);

  void probe(long epoch, const Sample& sample, FairnessState state);
  void skip(long epoch, long attempt, const ProvisioningRequest& request);
  void consolidation(long epoch, long samples, FairnessState state, long moved);

  static constexpr const char* kHeader = "kind,epoch,index,size,color,apportionment,state,moved";

 private:
  std::ostream* out_;
};

struct ProbeOutcome {
  FairnessState state = FairnessState::CurrUnsure;
  Apportionment observed;
  Apportionment reference;
  BottleneckProfile bottlenecks;
};

// Provisions `request` through the broker, tallies the provider tags and
// compares them with the efficient-fair reference for the bottlenecks seen
// just before the request. Per-request inequity is CurrUnsure, never
// CurrUnfair. Propagates UnsatisfiableError.
ProbeOutcome simple_fairness_test(Broker& broker, const ProvisioningRequest& request,
                                  long tolerance);

// Cumulative equity check over both tables with tolerance scaled by the
// sample count. Equitable: unsure entries move to the fair table and the
// result is CurrFair. Otherwise CurrUnsure while unsure entries are under
// half of the samples, else CurrUnfair. Empty tables give CurrUnsure.
FairnessState consolidate(FairnessTables& tables, EpochLedger& ledger, long tolerance);

struct EpochRun {
  FairnessTables tables;
  EpochLedger ledger;
  FairnessTrace trace;
  long skipped = 0;
  long vms_provisioned = 0;
  bool complete = false;
};

// Runs one epoch: resets the broker, draws size in [1, MAX_X] and color
// uniformly per probe and consolidates every consolidation period. With
// `probe_limit` the epoch stops early after that many accepted samples (a
// mid-epoch snapshot). Throws EpochAbortedError when no probe is accepted.
EpochRun run_epoch(Broker& broker, const VerifierConfig& config, Rng& rng,
                   long epoch_index = 0, std::optional<long> probe_limit = std::nullopt,
                   AuditLog* log = nullptr);

struct FairnessVerdict {
  bool decision = false;
  double fq = 0.5;
  double uq = 0.5;
  ProbabilityTriple triple{0.0, 0.0, 1.0, false};
  TraceClass trace_class = TraceClass::Indeterminate;
  bool no_samples = false;
};

// decide(triple) and a trace that is not Unfair; quotient from the triple.
// An empty ledger yields the Unsure verdict (decision false, fq 0.5).
FairnessVerdict verdict(const EpochLedger& current, const EpochLedger* previous,
                        const FairnessTrace& trace, const VerifierConfig& config);

// Variant fed with all completed epochs (oldest first); honours
// config.tau_mode.
FairnessVerdict verdict(const EpochLedger& current, std::span<const EpochLedger> history,
                        const FairnessTrace& trace, const VerifierConfig& config);

struct IsolationOptions {
  int max_x = 50;
  int max_combination = 2;
  bool interval_search = true;
};

// Looks for the smallest set of request-size rows whose removal makes the
// cumulative totals equitable: single rows, then pairs up to
// max_combination, then contiguous size ranges. A candidate must leave more
// samples in scope than it removes. Returns {} when the tables are already
// equitable or nothing explains the inequity.
std::set<int> isolate_unfair_sizes(const FairnessTables& tables, long tolerance,
                                   const IsolationOptions& options = {});

// Sequences epochs against one broker and keeps what a verdict needs.
class FairnessAuditor {
 public:
  explicit FairnessAuditor(VerifierConfig config, AuditLog* log = nullptr);

  const EpochRun& run_epoch(Broker& broker, Rng& rng);
  // Runs the next epoch only up to `fraction` of its samples.
  const EpochRun& run_partial_epoch(Broker& broker, Rng& rng, double fraction);

  FairnessVerdict verdict() const;
  std::set<int> isolate_unfair_sizes() const;

  const VerifierConfig& config() const { return config_; }
  const FairnessTrace& trace() const { return trace_; }
  const std::optional<EpochRun>& current() const { return current_; }
  long vms_provisioned() const { return vms_provisioned_; }
  long samples_taken() const { return samples_taken_; }

 private:
  const EpochRun& advance(Broker& broker, Rng& rng, std::optional<long> limit);

  VerifierConfig config_;
  AuditLog* log_;
  std::vector<EpochLedger> history_;  // completed epochs before current_
  std::optional<EpochRun> current_;
  FairnessTrace trace_;
  long next_epoch_ = 0;
  long vms_provisioned_ = 0;
  long samples_taken_ = 0;
};

}  // namespace fairbroker
