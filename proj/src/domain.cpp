#include "fairbroker/domain.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "fairbroker/errors.hpp"

namespace fairbroker {

void validate_request(const ProvisioningRequest& request, int max_x, std::uint32_t color_space) {
  if (request.size < 1 || request.size > max_x) {
    throw DomainError("request size " + std::to_string(request.size) + " outside [1, " +
                      std::to_string(max_x) + "]");
  }
  if (request.color.id >= color_space) {
    throw DomainError("color " + std::to_string(request.color.id) + " outside color space of " +
                      std::to_string(color_space));
  }
  if (request.cost_target < 0.0) {
    throw DomainError("negative cost target");
  }
}

int Apportionment::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::size_t BottleneckProfile::available() const {
  std::size_t n = 0;
  for (bool f : flags) n += f ? 0 : 1;
  return n;
}

SupplierState make_supplier(int id, std::vector<int> capacity, std::vector<double> unit_cost) {
  if (capacity.size() != unit_cost.size() || capacity.empty()) {
    throw DomainError("supplier " + std::to_string(id) +
                      ": capacity and unit_cost must cover the same non-empty color space");
  }
  for (int c : capacity) {
    if (c < 0) throw DomainError("supplier " + std::to_string(id) + ": negative capacity");
  }
  SupplierState s;
  s.id = id;
  s.configured_capacity = capacity;
  s.remaining_capacity = std::move(capacity);
  s.unit_cost = std::move(unit_cost);
  return s;
}

bool bottleneck_check(const SupplierState& supplier, Color color, double cost_target) {
  if (color.id >= supplier.color_space()) {
    throw DomainError("color " + std::to_string(color.id) + " unknown to supplier " +
                      std::to_string(supplier.id));
  }
  return supplier.remaining_capacity[color.id] <= 0 || supplier.unit_cost[color.id] > cost_target;
}

BottleneckProfile bottleneck_profile(const std::vector<SupplierState>& suppliers, Color color,
                                     double cost_target) {
  BottleneckProfile p;
  p.flags.reserve(suppliers.size());
  for (const auto& s : suppliers) p.flags.push_back(bottleneck_check(s, color, cost_target));
  return p;
}

Apportionment efficient_fair_reference(int size, const BottleneckProfile& bottlenecks) {
  if (size < 1) throw DomainError("reference apportionment needs size >= 1");
  const auto k = static_cast<int>(bottlenecks.available());
  if (k == 0) throw UnsatisfiableError("every supplier is bottlenecked");

  Apportionment out;
  out.counts.assign(bottlenecks.suppliers(), 0);
  const int base = size / k;
  int remainder = size % k;
  for (std::size_t i = 0; i < bottlenecks.suppliers(); ++i) {
    if (bottlenecks.flags[i]) continue;
    out.counts[i] = base;
    if (remainder > 0) {
      ++out.counts[i];
      --remainder;
    }
  }
  return out;
}

namespace {

void check_comparable(const Apportionment& a, const Apportionment& b) {
  if (a.suppliers() != b.suppliers()) {
    throw DomainError("apportionments cover different supplier counts");
  }
  if (a.total() != b.total()) {
    throw DomainError("apportionments have different totals (" + std::to_string(a.total()) +
                      " vs " + std::to_string(b.total()) + ")");
  }
}

}  // namespace

long max_deviation(const Apportionment& observed, const Apportionment& reference) {
  check_comparable(observed, reference);
  long worst = 0;
  for (std::size_t i = 0; i < observed.suppliers(); ++i) {
    worst = std::max(worst, std::labs(static_cast<long>(observed.counts[i]) - reference.counts[i]));
  }
  return worst;
}

bool is_equitable(const Apportionment& observed, const Apportionment& reference, long tolerance) {
  if (tolerance < 0) throw DomainError("negative equity tolerance");
  return max_deviation(observed, reference) <= tolerance;
}

}  // namespace fairbroker
