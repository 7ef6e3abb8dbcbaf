#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's algorithms beyond plain data types.

#include <algorithm>
#include <boost/rational.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fairbroker/calculus.hpp"

namespace oracle {

// Enumerates every integer split of `size` over the non-bottlenecked
// suppliers and keeps the one whose ascending-sorted profile is
// lexicographically largest (max-min); ties go to the split that is
// lexicographically largest in supplier order (lowest index first).
inline std::vector<int> max_min_split(int size, const std::vector<bool>& bottlenecked) {
  const std::size_t n = bottlenecked.size();
  std::vector<int> current(n, 0);
  std::optional<std::vector<int>> best;
  std::vector<int> best_profile;

  auto profile = [&](const std::vector<int>& v) {
    std::vector<int> p;
    for (std::size_t i = 0; i < n; ++i) {
      if (!bottlenecked[i]) p.push_back(v[i]);
    }
    std::sort(p.begin(), p.end());
    return p;
  };

  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == n) {
      if (left != 0) return;
      auto p = profile(current);
      if (!best || p > best_profile || (p == best_profile && current > *best)) {
        best = current;
        best_profile = std::move(p);
      }
      return;
    }
    if (bottlenecked[i]) {
      current[i] = 0;
      rec(i + 1, left);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      current[i] = x;
      rec(i + 1, left - x);
    }
    current[i] = 0;
  };
  rec(0, size);
  return *best;
}

// Literal window semantics: shorter than the window is indeterminate;
// otherwise brokered-fair iff every length-`window` slice holds a CurrFair.
inline fairbroker::TraceClass window_classify(const std::vector<fairbroker::FairnessState>& trace,
                                              int window) {
  using fairbroker::FairnessState;
  using fairbroker::TraceClass;
  const auto w = static_cast<std::size_t>(window);
  if (trace.size() < w) return TraceClass::Indeterminate;
  for (std::size_t start = 0; start + w <= trace.size(); ++start) {
    bool has_fair = false;
    for (std::size_t j = start; j < start + w; ++j) has_fair |= trace[j] == FairnessState::CurrFair;
    if (!has_fair) return TraceClass::Unfair;
  }
  return TraceClass::BrokeredFair;
}

using Q = boost::rational<std::int64_t>;

struct ExactTriple {
  Q phi, mu, tau;
  bool boundary_adjusted = false;
};

// phi, tau, mu computed in exact rationals from the raw ledger counts.
inline ExactTriple exact_triple(long fair, long unsure, long moved, std::optional<long> prev_fair,
                                std::optional<long> prev_unsure, std::optional<long> prev_moved) {
  ExactTriple t;
  t.phi = Q(fair, fair + unsure);
  Q tau(0);
  if (prev_fair) tau = Q(*prev_moved, *prev_fair + *prev_unsure) - Q(moved, fair + unsure);
  if (tau < 0) tau = 0;
  if (t.phi + tau > 1) {
    tau = 1 - t.phi;
    t.boundary_adjusted = true;
  }
  t.tau = tau;
  t.mu = 1 - t.phi - t.tau;
  return t;
}

inline double to_double(const Q& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

}  // namespace oracle
