#include "fairbroker/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "fairbroker/errors.hpp"

namespace fairbroker {

void VerifierConfig::validate() const {
  if (max_x < 1) throw ConfigError("max_x must be >= 1");
  if (samples_per_epoch < 1) throw ConfigError("samples_per_epoch must be >= 1");
  if (epoch_length.count() <= 0) throw ConfigError("epoch_length must be positive");
  if (equity_tolerance < 0) throw ConfigError("equity_tolerance must be >= 0");
  if (consolidation_period < 0 || consolidation_period > samples_per_epoch) {
    throw ConfigError("consolidation_period must lie in [1, samples_per_epoch] (0 = auto)");
  }
  if (window < 1) throw ConfigError("window must be >= 1");
  if (color_space < 1) throw ConfigError("color_space must be >= 1");
  if (cost_target < 0.0) throw ConfigError("cost_target must be >= 0");
  if (isolation_cap < 1) throw ConfigError("isolation_cap must be >= 1");
  if (max_attempt_factor < 1) throw ConfigError("max_attempt_factor must be >= 1");
  try {
    thresholds.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

long VerifierConfig::effective_period() const {
  if (consolidation_period > 0) return consolidation_period;
  return std::max(1L, samples_per_epoch / 5);
}

void FairnessTables::add(bool fair, Sample sample) {
  const TableKey key{sample.request.size, sample.request.color.id};
  if (fair) {
    fair_[key].push_back(std::move(sample));
    ++fair_count_;
  } else {
    unsure_[key].push_back(std::move(sample));
    ++unsure_count_;
  }
}

long FairnessTables::promote_unsure() {
  const long moved = unsure_count_;
  for (auto& [key, row] : unsure_) {
    auto& dst = fair_[key];
    dst.insert(dst.end(), std::make_move_iterator(row.begin()), std::make_move_iterator(row.end()));
  }
  unsure_.clear();
  fair_count_ += moved;
  unsure_count_ = 0;
  return moved;
}

void FairnessTables::clear() {
  fair_.clear();
  unsure_.clear();
  fair_count_ = unsure_count_ = 0;
}

namespace {

std::string join_counts(const Apportionment& a) {
  std::string s;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(a.counts[i]);
  }
  return s;
}

}  // namespace

AuditLog::AuditLog(std::ostream& out) : out_(&out) { *out_ << kHeader << '\n'; }

void AuditLog::probe(long epoch, const Sample& sample, FairnessState state) {
  *out_ << "probe," << epoch << ',' << sample.probe_index << ',' << sample.request.size << ','
        << sample.request.color.id << ',' << join_counts(sample.observed) << ','
        << to_string(state) << ",\n";
}

void AuditLog::skip(long epoch, long attempt, const ProvisioningRequest& request) {
  *out_ << "skip," << epoch << ',' << attempt << ',' << request.size << ',' << request.color.id
        << ",,unsatisfiable,\n";
}

void AuditLog::consolidation(long epoch, long samples, FairnessState state, long moved) {
  *out_ << "consolidate," << epoch << ',' << samples << ",,,," << to_string(state) << ','
        << moved << '\n';
}

ProbeOutcome simple_fairness_test(Broker& broker, const ProvisioningRequest& request,
                                  long tolerance) {
  ProbeOutcome out;
  out.bottlenecks = bottleneck_profile(broker.suppliers(), request.color, request.cost_target);
  out.reference = efficient_fair_reference(request.size, out.bottlenecks);
  const ProvisionResult result = broker.provision(request);
  out.observed = tally_tags(result.provider_tags, broker.suppliers().size());
  if (out.observed.total() != request.size) {
    throw DomainError("broker provisioned " + std::to_string(out.observed.total()) + " of " +
                      std::to_string(request.size) + " VMs");
  }
  out.state = is_equitable(out.observed, out.reference, tolerance) ? FairnessState::CurrFair
                                                                  : FairnessState::CurrUnsure;
  return out;
}

FairnessState consolidate(FairnessTables& tables, EpochLedger& ledger, long tolerance) {
  if (tables.size() == 0) return FairnessState::CurrUnsure;

  Apportionment observed;
  Apportionment reference;
  tables.for_each([&](const Sample& s) {
    if (observed.counts.empty()) {
      observed.counts.assign(s.observed.suppliers(), 0);
      reference.counts.assign(s.reference.suppliers(), 0);
    }
    for (std::size_t i = 0; i < s.observed.suppliers(); ++i) {
      observed.counts[i] += s.observed.counts[i];
      reference.counts[i] += s.reference.counts[i];
    }
  });

  if (is_equitable(observed, reference, tolerance * tables.size())) {
    const long moved = tables.promote_unsure();
    ledger.moved_units += moved;
    ledger.fair_units += moved;
    ledger.unsure_units -= moved;
    return FairnessState::CurrFair;
  }
  return 2 * tables.unsure_count() < tables.size() ? FairnessState::CurrUnsure
                                                   : FairnessState::CurrUnfair;
}

EpochRun run_epoch(Broker& broker, const VerifierConfig& config, Rng& rng, long epoch_index,
                   std::optional<long> probe_limit, AuditLog* log) {
  config.validate();
  broker.begin_epoch();

  EpochRun run;
  run.ledger.epoch_index = epoch_index;
  run.ledger.epoch_length = config.epoch_length;
  run.ledger.samples_per_epoch = config.samples_per_epoch;

  const long target =
      std::min(config.samples_per_epoch, probe_limit.value_or(config.samples_per_epoch));
  const long period = config.effective_period();
  const long max_attempts = config.samples_per_epoch * config.max_attempt_factor;

  auto checkpoint = [&] {
    const long before = run.ledger.moved_units;
    const FairnessState s = consolidate(run.tables, run.ledger, config.equity_tolerance);
    run.trace.push_back(s);
    if (log) log->consolidation(epoch_index, run.tables.size(), s, run.ledger.moved_units - before);
  };

  long accepted = 0;
  for (long attempt = 0; accepted < target && attempt < max_attempts; ++attempt) {
    ProvisioningRequest request;
    request.size = static_cast<int>(rng.uniform_int(1, config.max_x));
    request.color = Color{static_cast<std::uint32_t>(rng.uniform_int(0, config.color_space - 1))};
    request.cost_target = config.cost_target;

    ProbeOutcome outcome;
    try {
      outcome = simple_fairness_test(broker, request, config.equity_tolerance);
    } catch (const UnsatisfiableError&) {
      ++run.skipped;
      if (log) log->skip(epoch_index, attempt, request);
      continue;
    }

    Sample sample{accepted, request, std::move(outcome.observed), std::move(outcome.reference)};
    const bool fair = outcome.state == FairnessState::CurrFair;
    if (log) log->probe(epoch_index, sample, outcome.state);
    run.tables.add(fair, std::move(sample));
    (fair ? run.ledger.fair_units : run.ledger.unsure_units) += 1;
    run.vms_provisioned += request.size;
    ++accepted;

    if (accepted % period == 0) checkpoint();
  }

  if (accepted == 0 && target > 0) {
    throw EpochAbortedError("epoch " + std::to_string(epoch_index) + ": all " +
                            std::to_string(run.skipped) + " probes were rejected by the broker");
  }
  run.complete = accepted >= config.samples_per_epoch || !probe_limit;
  if (run.complete && accepted % period != 0) checkpoint();
  return run;
}

namespace {

FairnessVerdict finish(const ProbabilityTriple& triple, const FairnessTrace& trace,
                       const VerifierConfig& config) {
  FairnessVerdict v;
  v.triple = triple;
  v.trace_class = trace.empty() ? TraceClass::Indeterminate : classify_trace(trace, config.window);
  v.decision = decide(triple, config.thresholds) && v.trace_class != TraceClass::Unfair;
  const Quotient q = quotient(triple);
  v.fq = q.fq;
  v.uq = q.uq;
  return v;
}

FairnessVerdict unsure_verdict() {
  FairnessVerdict v;
  v.no_samples = true;
  return v;
}

}  // namespace

FairnessVerdict verdict(const EpochLedger& current, const EpochLedger* previous,
                        const FairnessTrace& trace, const VerifierConfig& config) {
  if (current.total() <= 0) return unsure_verdict();
  return finish(estimate_triple(current, previous), trace, config);
}

FairnessVerdict verdict(const EpochLedger& current, std::span<const EpochLedger> history,
                        const FairnessTrace& trace, const VerifierConfig& config) {
  if (current.total() <= 0) return unsure_verdict();
  if (config.tau_mode == TauMode::Trend) {
    return finish(estimate_triple_trend(current, history), trace, config);
  }
  return finish(estimate_triple(current, history.empty() ? nullptr : &history.back()), trace,
                config);
}

namespace {

struct SizeRow {
  int size = 0;
  long samples = 0;
  std::vector<long> observed;
  std::vector<long> reference;
};

class ExclusionChecker {
 public:
  ExclusionChecker(const FairnessTables& tables, long tolerance) : tolerance_(tolerance) {
    std::map<int, SizeRow> rows;
    tables.for_each([&](const Sample& s) {
      auto& row = rows[s.request.size];
      if (row.observed.empty()) {
        row.size = s.request.size;
        row.observed.assign(s.observed.suppliers(), 0);
        row.reference.assign(s.observed.suppliers(), 0);
      }
      ++row.samples;
      for (std::size_t i = 0; i < s.observed.suppliers(); ++i) {
        row.observed[i] += s.observed.counts[i];
        row.reference[i] += s.reference.counts[i];
      }
    });
    for (auto& [size, row] : rows) rows_.push_back(std::move(row));
    if (!rows_.empty()) {
      total_ = SizeRow{0, 0, std::vector<long>(rows_[0].observed.size(), 0),
                       std::vector<long>(rows_[0].observed.size(), 0)};
      for (const auto& r : rows_) accumulate(total_, r, +1);
    }
  }

  const std::vector<SizeRow>& rows() const { return rows_; }

  // Normalized leftover deviation when the given rows are excluded, or
  // nullopt when the exclusion is not admissible or not equitable.
  std::optional<double> check(std::span<const std::size_t> excluded) const {
    SizeRow left = total_;
    for (std::size_t idx : excluded) accumulate(left, rows_[idx], -1);
    const long removed = total_.samples - left.samples;
    if (left.samples <= 0 || removed >= left.samples) return std::nullopt;
    long worst = 0;
    for (std::size_t i = 0; i < left.observed.size(); ++i) {
      worst = std::max(worst, std::labs(left.observed[i] - left.reference[i]));
    }
    if (worst > tolerance_ * left.samples) return std::nullopt;
    return static_cast<double>(worst) / static_cast<double>(left.samples);
  }

  bool equitable_as_is() const {
    return rows_.empty() || check(std::span<const std::size_t>{}).has_value();
  }

 private:
  static void accumulate(SizeRow& into, const SizeRow& row, int sign) {
    into.samples += sign * row.samples;
    for (std::size_t i = 0; i < into.observed.size(); ++i) {
      into.observed[i] += sign * row.observed[i];
      into.reference[i] += sign * row.reference[i];
    }
  }

  long tolerance_;
  std::vector<SizeRow> rows_;
  SizeRow total_;
};

struct Candidate {
  std::vector<std::size_t> rows;
  double deviation = 0.0;
};

void consider(const ExclusionChecker& checker, std::vector<std::size_t> rows,
              std::optional<Candidate>& best) {
  const auto dev = checker.check(rows);
  if (!dev) return;
  if (!best || *dev < best->deviation) best = Candidate{std::move(rows), *dev};
}

void combinations(const ExclusionChecker& checker, std::size_t k, std::size_t start,
                  std::vector<std::size_t>& picked, std::optional<Candidate>& best) {
  if (picked.size() == k) {
    consider(checker, picked, best);
    return;
  }
  for (std::size_t i = start; i < checker.rows().size(); ++i) {
    picked.push_back(i);
    combinations(checker, k, i + 1, picked, best);
    picked.pop_back();
  }
}

std::set<int> sizes_of(const ExclusionChecker& checker, const Candidate& c) {
  std::set<int> out;
  for (std::size_t idx : c.rows) out.insert(checker.rows()[idx].size);
  return out;
}

}  // namespace

std::set<int> isolate_unfair_sizes(const FairnessTables& tables, long tolerance,
                                   const IsolationOptions& options) {
  const ExclusionChecker checker(tables, tolerance);
  if (checker.equitable_as_is()) return {};
  const std::size_t rows = checker.rows().size();

  for (std::size_t k = 1; k <= static_cast<std::size_t>(options.max_combination) && k < rows;
       ++k) {
    std::optional<Candidate> best;
    std::vector<std::size_t> picked;
    combinations(checker, k, 0, picked, best);
    if (best) return sizes_of(checker, *best);
  }

  if (!options.interval_search) return {};
  // Contiguous runs of observed size rows, shortest first.
  for (std::size_t len = options.max_combination + 1; len < rows; ++len) {
    std::optional<Candidate> best;
    for (std::size_t start = 0; start + len <= rows; ++start) {
      std::vector<std::size_t> picked(len);
      for (std::size_t j = 0; j < len; ++j) picked[j] = start + j;
      consider(checker, std::move(picked), best);
    }
    if (best) {
      auto out = sizes_of(checker, *best);
      std::erase_if(out, [&](int s) { return s < 1 || s > options.max_x; });
      return out;
    }
  }
  return {};
}

FairnessAuditor::FairnessAuditor(VerifierConfig config, AuditLog* log)
    : config_(std::move(config)), log_(log) {
  config_.validate();
}

const EpochRun& FairnessAuditor::advance(Broker& broker, Rng& rng, std::optional<long> limit) {
  if (current_) {
    if (current_->tables.size() > 0) history_.push_back(current_->ledger);
    current_.reset();
  }
  current_ = fairbroker::run_epoch(broker, config_, rng, next_epoch_++, limit, log_);
  trace_.insert(trace_.end(), current_->trace.begin(), current_->trace.end());
  vms_provisioned_ += current_->vms_provisioned;
  samples_taken_ += current_->tables.size();
  return *current_;
}

const EpochRun& FairnessAuditor::run_epoch(Broker& broker, Rng& rng) {
  return advance(broker, rng, std::nullopt);
}

const EpochRun& FairnessAuditor::run_partial_epoch(Broker& broker, Rng& rng, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("epoch fraction must lie in (0, 1]");
  const auto limit =
      static_cast<long>(std::floor(fraction * static_cast<double>(config_.samples_per_epoch)));
  return advance(broker, rng, std::max(1L, limit));
}

FairnessVerdict FairnessAuditor::verdict() const {
  if (!current_) return fairbroker::verdict(EpochLedger{}, nullptr, trace_, config_);
  return fairbroker::verdict(current_->ledger, std::span<const EpochLedger>(history_), trace_,
                             config_);
}

std::set<int> FairnessAuditor::isolate_unfair_sizes() const {
  if (!current_) return {};
  return fairbroker::isolate_unfair_sizes(
      current_->tables, config_.equity_tolerance,
      IsolationOptions{config_.max_x, config_.isolation_cap, true});
}

}  // namespace fairbroker
