#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairbroker/domain.hpp"

namespace fairbroker {

enum class PolicyKind { EpochFair, Biased, SizeDependentBiased };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view text);

// Behavioral profile of a simulated broker.
//
// EpochFair spreads each request evenly and hands the remainder to the
// suppliers that are furthest behind this epoch. Biased routes
// round(bias_rate * size) VMs (with a fractional carry) to the favored
// supplier and spreads the rest evenly over the others.
// SizeDependentBiased is EpochFair for size <= size_threshold and Biased
// above it.
struct BrokerPolicy {
  PolicyKind kind = PolicyKind::EpochFair;
  std::optional<int> favored_supplier;
  std::optional<double> bias_rate;
  std::optional<int> size_threshold;

  static BrokerPolicy epoch_fair() { return {}; }
  static BrokerPolicy biased(int favored, double rate);
  static BrokerPolicy size_dependent(int favored, double rate, int threshold);

  // Throws DomainError when the fields required by `kind` are missing or
  // out of range.
  void validate(std::size_t supplier_count, int max_x) const;

  friend bool operator==(const BrokerPolicy&, const BrokerPolicy&) = default;
};

inline constexpr double kMinBiasRate = 0.25;
inline constexpr double kMaxBiasRate = 0.45;

struct ProvisionResult {
  Apportionment apportionment;
  std::vector<int> provider_tags;  // supplier id of every provisioned VM
};

// Per-supplier running balance for the current epoch plus the biased
// policy's fractional carry. balance[i] accumulates n * X_i - X per request,
// so it is zero-sum and negative for suppliers that are behind.
struct DeficitLedger {
  std::vector<long> balance;
  double bias_carry = 0.0;

  explicit DeficitLedger(std::size_t suppliers = 0) : balance(suppliers, 0) {}

  void record(const Apportionment& a);
  void clear();
};

// Apportions `request` according to `policy`, decrements supplier capacity
// and updates the ledger. Throws UnsatisfiableError, leaving all state
// untouched, when the non-bottlenecked suppliers cannot hold the request.
ProvisionResult broker_provision(const BrokerPolicy& policy, const ProvisioningRequest& request,
                                 std::vector<SupplierState>& suppliers, DeficitLedger& ledger);

void epoch_reset(std::vector<SupplierState>& suppliers);
void epoch_reset(std::vector<SupplierState>& suppliers, DeficitLedger& ledger);

// Tally of provider tags back into per-supplier counts.
Apportionment tally_tags(const std::vector<int>& provider_tags, std::size_t supplier_count);

// What the fairness tester is allowed to see of a broker: it can submit
// requests, observe the public state of the underlying suppliers and is told
// when an epoch starts. Ground truth never crosses this interface.
class Broker {
 public:
  virtual ~Broker() = default;

  virtual ProvisionResult provision(const ProvisioningRequest& request) = 0;
  virtual const std::vector<SupplierState>& suppliers() const = 0;
  virtual void begin_epoch() = 0;
};

struct SupplierSpec {
  std::vector<int> capacity;       // per color
  std::vector<double> unit_cost;   // per color

  friend bool operator==(const SupplierSpec&, const SupplierSpec&) = default;
};

std::vector<SupplierState> make_suppliers(const std::vector<SupplierSpec>& specs);

// n identical suppliers over `colors` colors.
std::vector<SupplierSpec> uniform_suppliers(int n, int capacity, double unit_cost,
                                            std::uint32_t colors = 1);

class SimulatedBroker final : public Broker {
 public:
  SimulatedBroker(BrokerPolicy policy, std::vector<SupplierState> suppliers);

  ProvisionResult provision(const ProvisioningRequest& request) override;
  const std::vector<SupplierState>& suppliers() const override { return suppliers_; }
  void begin_epoch() override { epoch_reset(suppliers_, ledger_); }

  const BrokerPolicy& policy() const { return policy_; }
  const DeficitLedger& ledger() const { return ledger_; }

 private:
  BrokerPolicy policy_;
  std::vector<SupplierState> suppliers_;
  DeficitLedger ledger_;
};

}  // namespace fairbroker
