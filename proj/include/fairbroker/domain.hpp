#pragma once

#include <cstdint>
#include <vector>

namespace fairbroker {

// A requirement bundle (size class + availability class). Ids are dense in
// [0, color_space).
struct Color {
  std::uint32_t id = 0;

  friend bool operator==(Color, Color) = default;
  friend auto operator<=>(Color, Color) = default;
};

struct ProvisioningRequest {
  int size = 1;             // VMs requested
  Color color{};
  double cost_target = 0.0; // currency per VM
};

// Throws DomainError unless 1 <= size <= max_x and color.id < color_space.
void validate_request(const ProvisioningRequest& request, int max_x, std::uint32_t color_space);

// Per-supplier VM counts for one request. Sum equals the request size.
struct Apportionment {
  std::vector<int> counts;

  int total() const;
  std::size_t suppliers() const { return counts.size(); }

  friend bool operator==(const Apportionment&, const Apportionment&) = default;
};

// flags[i] is true when supplier i cannot take the request's color within
// its cost target.
struct BottleneckProfile {
  std::vector<bool> flags;

  std::size_t suppliers() const { return flags.size(); }
  std::size_t available() const;

  friend bool operator==(const BottleneckProfile&, const BottleneckProfile&) = default;
};

// A simulated supplier cloud. Vectors are indexed by color id.
struct SupplierState {
  int id = 0;
  std::vector<int> configured_capacity;
  std::vector<int> remaining_capacity;
  std::vector<double> unit_cost;

  std::uint32_t color_space() const {
    return static_cast<std::uint32_t>(remaining_capacity.size());
  }
};

SupplierState make_supplier(int id, std::vector<int> capacity, std::vector<double> unit_cost);

// True (bottlenecked) when the supplier has no capacity left for `color` or
// charges more than `cost_target` for it.
bool bottleneck_check(const SupplierState& supplier, Color color, double cost_target);

BottleneckProfile bottleneck_profile(const std::vector<SupplierState>& suppliers, Color color,
                                     double cost_target);

// Integer max-min apportionment over the non-bottlenecked suppliers: each
// gets size / k and the remainder goes one unit each to the lowest indices.
// Throws UnsatisfiableError when every supplier is bottlenecked.
Apportionment efficient_fair_reference(int size, const BottleneckProfile& bottlenecks);

// Per-supplier |observed - reference| <= tolerance. Throws DomainError on
// mismatched lengths or totals.
bool is_equitable(const Apportionment& observed, const Apportionment& reference, long tolerance);

// Largest per-supplier absolute deviation.
long max_deviation(const Apportionment& observed, const Apportionment& reference);

}  // namespace fairbroker
