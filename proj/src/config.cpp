#include "fairbroker/config.hpp"

#include <fstream>
#include <sstream>

#include "fairbroker/errors.hpp"

namespace fairbroker {

using nlohmann::json;

namespace {

json verifier_to_json(const VerifierConfig& v) {
  return json{{"max_x", v.max_x},
              {"samples_per_epoch", v.samples_per_epoch},
              {"epoch_length_s", v.epoch_length.count()},
              {"min_fair", v.thresholds.min_fair},
              {"max_unfair", v.thresholds.max_unfair},
              {"equity_tolerance", v.equity_tolerance},
              {"consolidation_period", v.consolidation_period},
              {"window", v.window},
              {"color_space", v.color_space},
              {"cost_target", v.cost_target},
              {"tau_mode", v.tau_mode == TauMode::Trend ? "trend" : "two_epoch"},
              {"isolation_cap", v.isolation_cap},
              {"max_attempt_factor", v.max_attempt_factor}};
}

VerifierConfig verifier_from_json(const json& j) {
  VerifierConfig v;
  v.max_x = j.value("max_x", v.max_x);
  v.samples_per_epoch = j.value("samples_per_epoch", v.samples_per_epoch);
  v.epoch_length = std::chrono::seconds(j.value("epoch_length_s", v.epoch_length.count()));
  v.thresholds.min_fair = j.value("min_fair", v.thresholds.min_fair);
  v.thresholds.max_unfair = j.value("max_unfair", v.thresholds.max_unfair);
  v.equity_tolerance = j.value("equity_tolerance", v.equity_tolerance);
  v.consolidation_period = j.value("consolidation_period", v.consolidation_period);
  v.window = j.value("window", v.window);
  v.color_space = j.value("color_space", v.color_space);
  v.cost_target = j.value("cost_target", v.cost_target);
  const std::string tau = j.value("tau_mode", std::string("two_epoch"));
  if (tau == "trend") {
    v.tau_mode = TauMode::Trend;
  } else if (tau == "two_epoch") {
    v.tau_mode = TauMode::TwoEpoch;
  } else {
    throw ConfigError("unknown tau_mode '" + tau + "'");
  }
  v.isolation_cap = j.value("isolation_cap", v.isolation_cap);
  v.max_attempt_factor = j.value("max_attempt_factor", v.max_attempt_factor);
  return v;
}

json adaptive_to_json(const ControllerState& c) {
  const auto& b = c.bounds;
  return json{{"mode", std::string(to_string(c.mode))},
              {"notch", c.notch},
              {"bounds",
               {{"min_fair", {b.min_fair_lo, b.min_fair_hi}},
                {"max_unfair", {b.max_unfair_lo, b.max_unfair_hi}},
                {"samples", {b.samples_floor, b.samples_cap}},
                {"sample_step", b.sample_step},
                {"correct_streak", b.correct_streak},
                {"epoch_step_s", b.epoch_step.count()},
                {"epoch_cap_s", b.epoch_cap.count()}}}};
}

template <typename T>
void read_pair(const json& j, const char* key, T& lo, T& hi) {
  if (!j.contains(key)) return;
  const auto& p = j.at(key);
  if (!p.is_array() || p.size() != 2) throw ConfigError(std::string(key) + " must be [lo, hi]");
  lo = p[0].get<T>();
  hi = p[1].get<T>();
}

ControllerState adaptive_from_json(const json& j) {
  ControllerState c;
  c.mode = adaptive_mode_from_string(j.value("mode", std::string("off")));
  c.notch = j.value("notch", c.notch);
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    read_pair(b, "min_fair", c.bounds.min_fair_lo, c.bounds.min_fair_hi);
    read_pair(b, "max_unfair", c.bounds.max_unfair_lo, c.bounds.max_unfair_hi);
    read_pair(b, "samples", c.bounds.samples_floor, c.bounds.samples_cap);
    c.bounds.sample_step = b.value("sample_step", c.bounds.sample_step);
    c.bounds.correct_streak = b.value("correct_streak", c.bounds.correct_streak);
    c.bounds.epoch_step = std::chrono::seconds(b.value("epoch_step_s", c.bounds.epoch_step.count()));
    c.bounds.epoch_cap = std::chrono::seconds(b.value("epoch_cap_s", c.bounds.epoch_cap.count()));
  }
  return c;
}

json broker_to_json(const BrokerSpec& b) {
  json j{{"id", b.id},
         {"policy", std::string(to_string(b.policy.kind))},
         {"ground_truth", b.truly_fair ? "fair" : "unfair"}};
  if (b.policy.favored_supplier) j["favored_supplier"] = *b.policy.favored_supplier;
  if (b.policy.bias_rate) j["bias_rate"] = *b.policy.bias_rate;
  if (b.policy.size_threshold) j["size_threshold"] = *b.policy.size_threshold;
  return j;
}

BrokerSpec broker_from_json(const json& j, std::size_t index) {
  BrokerSpec b;
  b.id = j.value("id", "broker-" + std::to_string(index + 1));
  b.policy.kind = policy_kind_from_string(j.value("policy", std::string("epoch_fair")));
  if (j.contains("favored_supplier")) b.policy.favored_supplier = j.at("favored_supplier").get<int>();
  if (j.contains("bias_rate")) b.policy.bias_rate = j.at("bias_rate").get<double>();
  if (j.contains("size_threshold")) b.policy.size_threshold = j.at("size_threshold").get<int>();
  const std::string truth =
      j.value("ground_truth", std::string(b.policy.kind == PolicyKind::EpochFair ? "fair" : "unfair"));
  if (truth != "fair" && truth != "unfair") {
    throw ConfigError("ground_truth must be 'fair' or 'unfair'");
  }
  b.truly_fair = truth == "fair";
  return b;
}

}  // namespace

json to_json(const ExperimentSpec& spec) {
  json suppliers = json::array();
  for (const auto& s : spec.suppliers) {
    suppliers.push_back({{"capacity", s.capacity}, {"unit_cost", s.unit_cost}});
  }
  json brokers = json::array();
  for (const auto& b : spec.brokers) brokers.push_back(broker_to_json(b));
  return json{{"suppliers", suppliers},
              {"verifier", verifier_to_json(spec.verifier)},
              {"adaptive", adaptive_to_json(spec.adaptive)},
              {"brokers", brokers},
              {"seeds", spec.seeds},
              {"verdict_point", spec.verdict_point},
              {"warmup_epochs", spec.warmup_epochs},
              {"threads", spec.threads}};
}

ExperimentSpec spec_from_json(const json& j) {
  try {
    ExperimentSpec spec;
    if (j.contains("population") && !j.contains("brokers")) {
      const auto& p = j.at("population");
      spec = reference_population(p.value("seed", std::uint64_t{1}), p.value("fair", 15),
                              p.value("biased", 15));
    } else {
      spec = reference_population(1, 0, 0);
    }
    if (j.contains("suppliers")) {
      spec.suppliers.clear();
      for (const auto& s : j.at("suppliers")) {
        spec.suppliers.push_back(
            {s.at("capacity").get<std::vector<int>>(), s.at("unit_cost").get<std::vector<double>>()});
      }
    }
    if (j.contains("verifier")) spec.verifier = verifier_from_json(j.at("verifier"));
    if (j.contains("adaptive")) spec.adaptive = adaptive_from_json(j.at("adaptive"));
    if (j.contains("brokers")) {
      spec.brokers.clear();
      const auto& arr = j.at("brokers");
      for (std::size_t i = 0; i < arr.size(); ++i) spec.brokers.push_back(broker_from_json(arr[i], i));
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    spec.verdict_point = j.value("verdict_point", spec.verdict_point);
    spec.warmup_epochs = j.value("warmup_epochs", spec.warmup_epochs);
    spec.threads = j.value("threads", spec.threads);
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  return spec_from_json(read_json(path));
}

json to_json(const Manifest& m) {
  json j{{"command", m.command}, {"spec", to_json(m.spec)}};
  if (!m.sample_sizes.empty()) j["sample_sizes"] = m.sample_sizes;
  if (!m.broker_id.empty()) j["broker"] = m.broker_id;
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.sample_sizes = j.value("sample_sizes", std::vector<long>{});
    m.broker_id = j.value("broker", std::string{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  if (!j.contains("spec")) throw ConfigError("manifest has no spec");
  m.spec = spec_from_json(j.at("spec"));
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_json(path));
}

void write_manifest(const Manifest& m, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto path = out_dir / "manifest.json";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << to_json(m).dump(2) << '\n';
}

}  // namespace fairbroker
