#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairbroker/adaptive.hpp"
#include "fairbroker/cloudsim.hpp"
#include "fairbroker/verifier.hpp"

namespace fairbroker {

struct BrokerSpec {
  std::string id;
  BrokerPolicy policy;
  bool truly_fair = true;  // ground truth; never handed to the verifier

  friend bool operator==(const BrokerSpec&, const BrokerSpec&) = default;
};

struct ExperimentSpec {
  std::vector<BrokerSpec> brokers;
  std::vector<SupplierSpec> suppliers;
  VerifierConfig verifier{};
  // mode Off disables feedback. Thresholds, sample count and epoch length
  // start from `verifier`; notch, mode and bounds come from here.
  ControllerState adaptive{.mode = AdaptiveMode::Off};
  std::vector<std::uint64_t> seeds{1};
  double verdict_point = 0.5;
  int warmup_epochs = 1;
  int threads = 1;  // not part of the result; replay may use any value

  // Throws ConfigError; runs before any simulation.
  void validate() const;
};

// 15 epoch-fair and 15 biased brokers over five 1000-VM suppliers with
// MAX_X 50, 50 samples per epoch and MinFair/MaxUnfair 0.6/0.2. Bias rates are
// uniform in [0.25, 0.45] and favored suppliers uniform, both drawn from
// `population_seed`.
ExperimentSpec reference_population(std::uint64_t population_seed, int fair = 15, int biased = 15);

struct ReportRow {
  std::string broker_id;
  std::uint64_t seed = 0;
  bool truly_fair = true;
  long samples = 0;  // samples per epoch used for this cell
  long vms_provisioned = 0;
  double fq = 0.0;
  bool decision = false;
};

struct ConfusionMatrix {
  long true_fair_predicted_fair = 0;
  long true_fair_predicted_unfair = 0;
  long true_unfair_predicted_fair = 0;
  long true_unfair_predicted_unfair = 0;

  void add(bool truly_fair, bool decided_fair);
  void merge(const ConfusionMatrix& other);
  long total() const;
  long errors() const { return true_fair_predicted_unfair + true_unfair_predicted_fair; }
  long false_positives() const { return true_unfair_predicted_fair; }
  long false_negatives() const { return true_fair_predicted_unfair; }
  double accuracy() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ExperimentResult {
  std::vector<ReportRow> rows;  // seed-major, brokers in registration order
  ConfusionMatrix confusion;
  std::vector<ConfusionMatrix> per_seed;  // parallel to spec.seeds
};

// Audits one broker under one seed: warm-up epochs, then the verdict epoch
// up to spec.verdict_point.
ReportRow run_cell(const ExperimentSpec& spec, std::size_t broker_index, std::uint64_t seed,
                   const VerifierConfig& verifier);

ExperimentResult run_experiment(const ExperimentSpec& spec);

struct SweepPoint {
  long samples_per_epoch = 0;
  double accuracy = 0.0;
};

// run_experiment per sample size, each with its own derived seeds. Throws
// ConfigError for fewer than two sizes.
std::vector<SweepPoint> sweep_cost_accuracy(const ExperimentSpec& spec,
                                            const std::vector<long>& sample_sizes);

// results.csv: broker_id,ground_truth,samples,vms_provisioned,fq,decision
// confusion.csv: ground_truth,predicted_fair,predicted_unfair
// Throws std::runtime_error naming the path when a file cannot be written.
void emit_reports(const ExperimentResult& result, const std::filesystem::path& out_dir);
// sweep.csv: samples_per_epoch,accuracy
void emit_sweep(const std::vector<SweepPoint>& sweep, const std::filesystem::path& out_dir);

std::string results_csv(const ExperimentResult& result);
std::string confusion_csv(const ConfusionMatrix& confusion);
std::string sweep_csv(const std::vector<SweepPoint>& sweep);

}  // namespace fairbroker
