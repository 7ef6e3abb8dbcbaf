#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbroker/harness.hpp"

namespace fairbroker {

// JSON schema (every key optional; defaults give the standard 5-supplier setup):
//
//   {
//     "suppliers": [{"capacity": [1000], "unit_cost": [1.0]}, ...],
//     "verifier": {"max_x": 50, "samples_per_epoch": 50, "epoch_length_s": 3600,
//                  "min_fair": 0.6, "max_unfair": 0.2, "equity_tolerance": 1,
//                  "consolidation_period": 0, "window": 4, "color_space": 1,
//                  "cost_target": 1.0, "tau_mode": "two_epoch" | "trend",
//                  "isolation_cap": 2, "max_attempt_factor": 4},
//     "adaptive": {"mode": "off" | "paper-ivc" | "paper-vb", "notch": 0.02,
//                  "bounds": {"min_fair": [0.5, 0.95], "max_unfair": [0.05, 0.5],
//                             "samples": [10, 200], "sample_step": 5,
//                             "correct_streak": 5, "epoch_step_s": 900,
//                             "epoch_cap_s": 14400}},
//     "brokers": [{"id": "broker-1", "policy": "epoch_fair" | "biased" |
//                  "size_dependent_biased", "favored_supplier": 0,
//                  "bias_rate": 0.3, "size_threshold": 40,
//                  "ground_truth": "fair" | "unfair"}, ...],
//     "population": {"fair": 15, "biased": 15, "seed": 1},  // used when "brokers" is absent
//     "seeds": [1, 2, 3],
//     "verdict_point": 0.5,
//     "warmup_epochs": 1,
//     "threads": 1
//   }
//
// ground_truth defaults to "fair" for epoch_fair and "unfair" otherwise.

nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

// Throws ConfigError with the path on unreadable or malformed input.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct Manifest {
  std::string command;  // experiment | sweep | verify
  ExperimentSpec spec;
  std::vector<long> sample_sizes;  // sweep only
  std::string broker_id;           // verify only
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& m, const std::filesystem::path& out_dir);

}  // namespace fairbroker
