#pragma once

#include <chrono>
#include <span>
#include <string_view>
#include <vector>

namespace fairbroker {

enum class FairnessState { CurrFair, CurrUnfair, CurrUnsure };

std::string_view to_string(FairnessState state);
char to_letter(FairnessState state);  // 'F', 'X' or 'U'

using FairnessTrace = std::vector<FairnessState>;

enum class TraceClass { BrokeredFair, Unfair, Indeterminate };

std::string_view to_string(TraceClass c);

// Bounded-window reading of "always eventually CurrFair" over a finite
// trace. Shorter than `window`: Indeterminate. Otherwise BrokeredFair iff
// every run of `window` consecutive states contains a CurrFair, else Unfair.
// Throws DomainError on an empty trace or window < 1.
TraceClass classify_trace(const FairnessTrace& trace, int window);

// Sample counts of one epoch of the probabilistic tester.
struct EpochLedger {
  long epoch_index = 0;
  long fair_units = 0;
  long unsure_units = 0;
  long moved_units = 0;  // unsure entries promoted to the fair table
  std::chrono::seconds epoch_length{3600};
  long samples_per_epoch = 1;

  long total() const { return fair_units + unsure_units; }
  double moved_ratio() const;  // moved_units / total(); requires total() > 0
};

struct ProbabilityTriple {
  double phi = 0.0;  // fair
  double mu = 0.0;   // unfair
  double tau = 0.0;  // unsure
  // Set when tau had to be cut so that mu would not go negative.
  bool boundary_adjusted = false;
};

enum class TauMode {
  TwoEpoch,  // movement ratio of epoch t-1 minus that of epoch t
  Trend,     // exponentially weighted (base 0.5) trend over all past epochs
};

// phi = fair / (fair + unsure); tau = previous movement ratio minus the
// current one, floored at 0 and capped at 1 - phi; mu = 1 - phi - tau.
// Without a previous epoch tau is 0. Throws NoSamplesError when `current`
// holds no samples and DomainError for a present but empty `previous`.
ProbabilityTriple estimate_triple(const EpochLedger& current, const EpochLedger* previous);

// Same, with the past movement ratio taken as a weighted mean over `history`
// (most recent last) using weights 1, 1/2, 1/4, ... from newest to oldest.
ProbabilityTriple estimate_triple_trend(const EpochLedger& current,
                                        std::span<const EpochLedger> history);

struct DecisionThresholds {
  double min_fair = 0.6;
  double max_unfair = 0.2;

  void validate() const;

  friend bool operator==(const DecisionThresholds&, const DecisionThresholds&) = default;
};

// (phi >= MinFair and mu <= MaxUnfair) or (phi + tau >= 1 - MaxUnfair).
bool decide(const ProbabilityTriple& triple, const DecisionThresholds& thresholds);

struct Quotient {
  double fq = 0.0;
  double uq = 0.0;
};

// fq = phi + tau / 2, uq = 1 - fq (== mu + tau / 2).
Quotient quotient(const ProbabilityTriple& triple);

}  // namespace fairbroker
