#include "fairbroker/cloudsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairbroker/errors.hpp"

namespace fairbroker {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::EpochFair:
      return "epoch_fair";
    case PolicyKind::Biased:
      return "biased";
    case PolicyKind::SizeDependentBiased:
      return "size_dependent_biased";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(std::string_view text) {
  if (text == "epoch_fair") return PolicyKind::EpochFair;
  if (text == "biased") return PolicyKind::Biased;
  if (text == "size_dependent_biased") return PolicyKind::SizeDependentBiased;
  throw DomainError("unknown broker policy '" + std::string(text) + "'");
}

BrokerPolicy BrokerPolicy::biased(int favored, double rate) {
  BrokerPolicy p;
  p.kind = PolicyKind::Biased;
  p.favored_supplier = favored;
  p.bias_rate = rate;
  return p;
}

BrokerPolicy BrokerPolicy::size_dependent(int favored, double rate, int threshold) {
  BrokerPolicy p = biased(favored, rate);
  p.kind = PolicyKind::SizeDependentBiased;
  p.size_threshold = threshold;
  return p;
}

void BrokerPolicy::validate(std::size_t supplier_count, int max_x) const {
  if (kind == PolicyKind::EpochFair) return;
  if (!favored_supplier || !bias_rate) {
    throw DomainError(std::string(to_string(kind)) + " policy needs favored_supplier and bias_rate");
  }
  if (*favored_supplier < 0 || static_cast<std::size_t>(*favored_supplier) >= supplier_count) {
    throw DomainError("favored_supplier " + std::to_string(*favored_supplier) + " out of range");
  }
  if (*bias_rate < kMinBiasRate || *bias_rate > kMaxBiasRate) {
    throw DomainError("bias_rate must lie in [0.25, 0.45]");
  }
  if (kind == PolicyKind::SizeDependentBiased) {
    if (!size_threshold) throw DomainError("size_dependent_biased policy needs size_threshold");
    if (*size_threshold < 1 || *size_threshold > max_x) {
      throw DomainError("size_threshold must lie in [1, MAX_X]");
    }
  }
}

void DeficitLedger::record(const Apportionment& a) {
  if (balance.size() != a.suppliers()) balance.assign(a.suppliers(), 0);
  const long n = static_cast<long>(a.suppliers());
  const long total = a.total();
  for (std::size_t i = 0; i < balance.size(); ++i) balance[i] += n * a.counts[i] - total;
}

void DeficitLedger::clear() {
  std::fill(balance.begin(), balance.end(), 0);
  bias_carry = 0.0;
}

namespace {

// Water-fills `amount` over `candidates` without exceeding `room`. Each
// round splits evenly and hands the remainder to the earliest candidates;
// a candidate whose share would reach its room is filled and dropped.
// Returns false (out untouched) when the candidates cannot hold `amount`.
bool spread(int amount, std::vector<int> candidates, const std::vector<int>& room,
            std::vector<int>& out) {
  long capacity = 0;
  for (int i : candidates) capacity += room[i];
  if (capacity < amount) return false;

  std::vector<int> add(out.size(), 0);
  while (amount > 0) {
    const int k = static_cast<int>(candidates.size());
    const int base = amount / k;
    const int rem = amount % k;
    bool filled_any = false;
    for (int j = 0; j < k; ++j) {
      const int i = candidates[j];
      const int share = base + (j < rem ? 1 : 0);
      if (share >= room[i] - add[i]) {
        amount -= room[i] - add[i];
        add[i] = room[i];
        filled_any = true;
      }
    }
    if (filled_any) {
      std::erase_if(candidates, [&](int i) { return add[i] >= room[i]; });
      continue;
    }
    for (int j = 0; j < k; ++j) add[candidates[j]] += base + (j < rem ? 1 : 0);
    amount = 0;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += add[i];
  return true;
}

std::vector<int> room_for(const std::vector<SupplierState>& suppliers, Color color,
                          const BottleneckProfile& bn) {
  std::vector<int> room(suppliers.size(), 0);
  for (std::size_t i = 0; i < suppliers.size(); ++i) {
    if (!bn.flags[i]) room[i] = std::max(0, suppliers[i].remaining_capacity[color.id]);
  }
  return room;
}

std::vector<int> epoch_fair_split(const ProvisioningRequest& request, const BottleneckProfile& bn,
                                  const std::vector<int>& room, const DeficitLedger& ledger) {
  std::vector<int> candidates;
  for (std::size_t i = 0; i < bn.suppliers(); ++i) {
    if (!bn.flags[i]) candidates.push_back(static_cast<int>(i));
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return ledger.balance[a] < ledger.balance[b];
  });
  std::vector<int> out(bn.suppliers(), 0);
  if (candidates.empty() || !spread(request.size, candidates, room, out)) {
    throw UnsatisfiableError("no capacity for request of " + std::to_string(request.size) +
                             " VMs");
  }
  return out;
}

std::vector<int> biased_split(const BrokerPolicy& policy, const ProvisioningRequest& request,
                              const BottleneckProfile& bn, const std::vector<int>& room,
                              double& carry) {
  const int favored = *policy.favored_supplier;
  const double want = *policy.bias_rate * request.size + carry;
  int to_favored = 0;
  double next_carry = carry;
  if (!bn.flags[favored]) {
    const int rounded = static_cast<int>(std::floor(want + 0.5));
    to_favored = std::clamp(rounded, 0, std::min(request.size, room[favored]));
    next_carry = to_favored == rounded ? want - rounded : 0.0;
  }

  std::vector<int> others;
  long others_room = 0;
  for (std::size_t i = 0; i < bn.suppliers(); ++i) {
    if (!bn.flags[i] && static_cast<int>(i) != favored) {
      others.push_back(static_cast<int>(i));
      others_room += room[i];
    }
  }
  int rest = request.size - to_favored;
  if (rest > others_room && !bn.flags[favored]) {
    // Spill onto the favored supplier when the others are full.
    const int spill = std::min<long>(rest - others_room, room[favored] - to_favored);
    to_favored += spill;
    rest -= spill;
  }

  std::vector<int> out(bn.suppliers(), 0);
  out[favored] = to_favored;
  if (rest > 0 && (others.empty() || !spread(rest, others, room, out))) {
    throw UnsatisfiableError("no capacity for request of " + std::to_string(request.size) +
                             " VMs");
  }
  carry = next_carry;
  return out;
}

}  // namespace

ProvisionResult broker_provision(const BrokerPolicy& policy, const ProvisioningRequest& request,
                                 std::vector<SupplierState>& suppliers, DeficitLedger& ledger) {
  if (suppliers.empty()) throw DomainError("broker has no suppliers");
  if (request.size < 1) throw DomainError("request size must be positive");
  if (ledger.balance.size() != suppliers.size()) ledger.balance.assign(suppliers.size(), 0);

  const auto bn = bottleneck_profile(suppliers, request.color, request.cost_target);
  const auto room = room_for(suppliers, request.color, bn);

  const bool use_bias =
      policy.kind == PolicyKind::Biased ||
      (policy.kind == PolicyKind::SizeDependentBiased && request.size > *policy.size_threshold);

  std::vector<int> counts = use_bias ? biased_split(policy, request, bn, room, ledger.bias_carry)
                                     : epoch_fair_split(request, bn, room, ledger);

  ProvisionResult result;
  result.apportionment.counts = counts;
  result.provider_tags.reserve(request.size);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    suppliers[i].remaining_capacity[request.color.id] -= counts[i];
    result.provider_tags.insert(result.provider_tags.end(), counts[i], suppliers[i].id);
  }
  // The biased path keeps its own carry; only fair-mode placements feed the rotation.
  if (!use_bias) ledger.record(result.apportionment);
  return result;
}

void epoch_reset(std::vector<SupplierState>& suppliers) {
  for (auto& s : suppliers) s.remaining_capacity = s.configured_capacity;
}

void epoch_reset(std::vector<SupplierState>& suppliers, DeficitLedger& ledger) {
  epoch_reset(suppliers);
  ledger.clear();
}

Apportionment tally_tags(const std::vector<int>& provider_tags, std::size_t supplier_count) {
  Apportionment a;
  a.counts.assign(supplier_count, 0);
  for (int tag : provider_tags) {
    if (tag < 0 || static_cast<std::size_t>(tag) >= supplier_count) {
      throw DomainError("provider tag " + std::to_string(tag) + " names no supplier");
    }
    ++a.counts[tag];
  }
  return a;
}

std::vector<SupplierState> make_suppliers(const std::vector<SupplierSpec>& specs) {
  if (specs.empty()) throw DomainError("at least one supplier is required");
  std::vector<SupplierState> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out.push_back(make_supplier(static_cast<int>(i), specs[i].capacity, specs[i].unit_cost));
    if (out.back().color_space() != out.front().color_space()) {
      throw DomainError("suppliers disagree on the color space");
    }
  }
  return out;
}

std::vector<SupplierSpec> uniform_suppliers(int n, int capacity, double unit_cost,
                                            std::uint32_t colors) {
  return std::vector<SupplierSpec>(
      n, SupplierSpec{std::vector<int>(colors, capacity), std::vector<double>(colors, unit_cost)});
}

SimulatedBroker::SimulatedBroker(BrokerPolicy policy, std::vector<SupplierState> suppliers)
    : policy_(std::move(policy)), suppliers_(std::move(suppliers)), ledger_(suppliers_.size()) {
  if (suppliers_.empty()) throw DomainError("broker has no suppliers");
}

ProvisionResult SimulatedBroker::provision(const ProvisioningRequest& request) {
  return broker_provision(policy_, request, suppliers_, ledger_);
}

}  // namespace fairbroker
