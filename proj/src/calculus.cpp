#include "fairbroker/calculus.hpp"

#include <algorithm>
#include <string>

#include "fairbroker/errors.hpp"

namespace fairbroker {

namespace {

// Absorbs rounding in threshold arithmetic such as 1 - 0.2.
constexpr double kDecisionEps = 1e-12;

}  // namespace

std::string_view to_string(FairnessState state) {
  switch (state) {
    case FairnessState::CurrFair:
      return "CurrFair";
    case FairnessState::CurrUnfair:
      return "CurrUnfair";
    case FairnessState::CurrUnsure:
      return "CurrUnsure";
  }
  return "?";
}

char to_letter(FairnessState state) {
  switch (state) {
    case FairnessState::CurrFair:
      return 'F';
    case FairnessState::CurrUnfair:
      return 'X';
    case FairnessState::CurrUnsure:
      return 'U';
  }
  return '?';
}

std::string_view to_string(TraceClass c) {
  switch (c) {
    case TraceClass::BrokeredFair:
      return "BrokeredFair";
    case TraceClass::Unfair:
      return "Unfair";
    case TraceClass::Indeterminate:
      return "Indeterminate";
  }
  return "?";
}

TraceClass classify_trace(const FairnessTrace& trace, int window) {
  if (window < 1) throw DomainError("trace window must be >= 1");
  if (trace.empty()) throw DomainError("cannot classify an empty trace");
  if (trace.size() < static_cast<std::size_t>(window)) return TraceClass::Indeterminate;

  // A window without CurrFair exists iff some run of non-fair states is at
  // least `window` long.
  int run = 0;
  for (FairnessState s : trace) {
    run = s == FairnessState::CurrFair ? 0 : run + 1;
    if (run >= window) return TraceClass::Unfair;
  }
  return TraceClass::BrokeredFair;
}

double EpochLedger::moved_ratio() const {
  if (total() <= 0) throw NoSamplesError("epoch " + std::to_string(epoch_index) + " has no samples");
  return static_cast<double>(moved_units) / static_cast<double>(total());
}

namespace {

ProbabilityTriple assemble(const EpochLedger& current, double past_ratio) {
  ProbabilityTriple t;
  t.phi = static_cast<double>(current.fair_units) / static_cast<double>(current.total());
  t.tau = std::max(0.0, past_ratio - current.moved_ratio());
  if (t.phi + t.tau > 1.0) {
    t.tau = 1.0 - t.phi;
    t.boundary_adjusted = true;
  }
  t.mu = std::max(0.0, 1.0 - (t.phi + t.tau));
  return t;
}

void require_samples(const EpochLedger& current) {
  if (current.total() <= 0) {
    throw NoSamplesError("epoch " + std::to_string(current.epoch_index) + " has no samples");
  }
}

}  // namespace

ProbabilityTriple estimate_triple(const EpochLedger& current, const EpochLedger* previous) {
  require_samples(current);
  if (previous == nullptr) return assemble(current, 0.0);
  if (previous->total() <= 0) throw DomainError("previous epoch ledger is empty");
  return assemble(current, previous->moved_ratio());
}

ProbabilityTriple estimate_triple_trend(const EpochLedger& current,
                                        std::span<const EpochLedger> history) {
  require_samples(current);
  if (history.empty()) return assemble(current, 0.0);
  double weighted = 0.0;
  double weights = 0.0;
  double w = 1.0;
  for (auto it = history.rbegin(); it != history.rend(); ++it, w *= 0.5) {
    if (it->total() <= 0) throw DomainError("historic epoch ledger is empty");
    weighted += w * it->moved_ratio();
    weights += w;
  }
  return assemble(current, weighted / weights);
}

void DecisionThresholds::validate() const {
  if (!(min_fair >= 0.0 && min_fair <= 1.0) || !(max_unfair >= 0.0 && max_unfair <= 1.0)) {
    throw DomainError("decision thresholds must lie in [0, 1]");
  }
}

bool decide(const ProbabilityTriple& triple, const DecisionThresholds& thresholds) {
  const bool direct = triple.phi + kDecisionEps >= thresholds.min_fair &&
                      triple.mu <= thresholds.max_unfair + kDecisionEps;
  const bool with_unsure = triple.phi + triple.tau + kDecisionEps >= 1.0 - thresholds.max_unfair;
  return direct || with_unsure;
}

Quotient quotient(const ProbabilityTriple& triple) {
  Quotient q;
  q.fq = std::clamp(triple.phi + triple.tau / 2.0, 0.0, 1.0);
  q.uq = 1.0 - q.fq;
  return q;
}

}  // namespace fairbroker
