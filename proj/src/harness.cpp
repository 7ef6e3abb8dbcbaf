#include "fairbroker/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <thread>

#include "fairbroker/errors.hpp"
#include "fairbroker/random.hpp"

namespace fairbroker {

void ExperimentSpec::validate() const {
  if (brokers.empty()) throw ConfigError("experiment needs at least one broker");
  if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
  if (!(verdict_point > 0.0 && verdict_point <= 1.0)) {
    throw ConfigError("verdict_point must lie in (0, 1]");
  }
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
  if (adaptive.notch <= 0.0) throw ConfigError("adaptive notch must be positive");
  verifier.validate();
  try {
    const auto suppliers_state = make_suppliers(suppliers);
    if (suppliers_state.front().color_space() < verifier.color_space) {
      throw ConfigError("suppliers define fewer colors than verifier.color_space");
    }
    for (const auto& b : brokers) b.policy.validate(suppliers.size(), verifier.max_x);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentSpec reference_population(std::uint64_t population_seed, int fair, int biased) {
  ExperimentSpec spec;
  spec.suppliers = uniform_suppliers(5, 1000, 1.0);
  spec.verifier.max_x = 50;
  spec.verifier.samples_per_epoch = 50;
  spec.verifier.thresholds = {0.6, 0.2};
  Rng rng(mix_seed(population_seed, 0xB40CE5));
  int id = 1;
  for (int i = 0; i < fair; ++i) {
    spec.brokers.push_back({fmt::format("broker-{}", id++), BrokerPolicy::epoch_fair(), true});
  }
  for (int i = 0; i < biased; ++i) {
    const auto favored = static_cast<int>(rng.uniform_int(0, 4));
    const double rate = rng.uniform_real(kMinBiasRate, kMaxBiasRate);
    spec.brokers.push_back(
        {fmt::format("broker-{}", id++), BrokerPolicy::biased(favored, rate), false});
  }
  return spec;
}

void ConfusionMatrix::add(bool truly_fair, bool decided_fair) {
  if (truly_fair) {
    ++(decided_fair ? true_fair_predicted_fair : true_fair_predicted_unfair);
  } else {
    ++(decided_fair ? true_unfair_predicted_fair : true_unfair_predicted_unfair);
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& o) {
  true_fair_predicted_fair += o.true_fair_predicted_fair;
  true_fair_predicted_unfair += o.true_fair_predicted_unfair;
  true_unfair_predicted_fair += o.true_unfair_predicted_fair;
  true_unfair_predicted_unfair += o.true_unfair_predicted_unfair;
}

long ConfusionMatrix::total() const {
  return true_fair_predicted_fair + true_fair_predicted_unfair + true_unfair_predicted_fair +
         true_unfair_predicted_unfair;
}

double ConfusionMatrix::accuracy() const {
  const long n = total();
  return n == 0 ? 0.0 : static_cast<double>(n - errors()) / static_cast<double>(n);
}

ReportRow run_cell(const ExperimentSpec& spec, std::size_t broker_index, std::uint64_t seed,
                   const VerifierConfig& verifier) {
  const BrokerSpec& b = spec.brokers.at(broker_index);
  SimulatedBroker broker(b.policy, make_suppliers(spec.suppliers));
  Rng rng(mix_seed(seed, broker_index));

  FairnessAuditor auditor(verifier);
  for (int e = 0; e < spec.warmup_epochs; ++e) auditor.run_epoch(broker, rng);
  auditor.run_partial_epoch(broker, rng, spec.verdict_point);
  const FairnessVerdict v = auditor.verdict();

  ReportRow row;
  row.broker_id = b.id;
  row.seed = seed;
  row.truly_fair = b.truly_fair;
  row.samples = verifier.samples_per_epoch;
  row.vms_provisioned = auditor.vms_provisioned();
  row.fq = v.fq;
  row.decision = v.decision;
  return row;
}

namespace {

// All brokers of one seed in registration order, threading the controller.
std::vector<ReportRow> run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  ControllerState controller = spec.adaptive;
  controller.thresholds = spec.verifier.thresholds;
  controller.samples_per_epoch = spec.verifier.samples_per_epoch;
  controller.epoch_length = spec.verifier.epoch_length;

  std::vector<ReportRow> rows;
  rows.reserve(spec.brokers.size());
  for (std::size_t i = 0; i < spec.brokers.size(); ++i) {
    VerifierConfig cfg = spec.verifier;
    if (controller.mode != AdaptiveMode::Off) {
      cfg.thresholds = controller.thresholds;
      cfg.samples_per_epoch = controller.samples_per_epoch;
      cfg.epoch_length = controller.epoch_length;
      cfg.consolidation_period = std::min(cfg.consolidation_period, cfg.samples_per_epoch);
    }
    rows.push_back(run_cell(spec, i, seed, cfg));
    controller = apply_feedback(controller, classify_feedback(rows.back().truly_fair,
                                                              rows.back().decision));
  }
  return rows;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::vector<ReportRow>> per_seed(spec.seeds.size());

  const auto workers = static_cast<std::size_t>(std::max(1, spec.threads));
  if (workers == 1 || spec.seeds.size() == 1) {
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) per_seed[s] = run_seed(spec, spec.seeds[s]);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < spec.seeds.size(); s += workers) {
          per_seed[s] = run_seed(spec, spec.seeds[s]);
        }
      });
    }
  }

  ExperimentResult result;
  for (auto& rows : per_seed) {
    ConfusionMatrix cm;
    for (auto& r : rows) {
      cm.add(r.truly_fair, r.decision);
      result.rows.push_back(std::move(r));
    }
    result.confusion.merge(cm);
    result.per_seed.push_back(cm);
  }
  return result;
}

std::vector<SweepPoint> sweep_cost_accuracy(const ExperimentSpec& spec,
                                            const std::vector<long>& sample_sizes) {
  if (sample_sizes.size() < 2) throw ConfigError("a sweep needs at least two sample sizes");
  for (long s : sample_sizes) {
    if (s < 1) throw ConfigError("sample sizes must be positive");
  }
  std::vector<SweepPoint> out;
  for (long samples : sample_sizes) {
    ExperimentSpec run = spec;
    run.verifier.samples_per_epoch = samples;
    run.verifier.consolidation_period = 0;
    for (auto& seed : run.seeds) seed = mix_seed(seed, static_cast<std::uint64_t>(samples));
    out.push_back({samples, run_experiment(run).confusion.accuracy()});
  }
  return out;
}

std::string results_csv(const ExperimentResult& result) {
  std::string out = "broker_id,ground_truth,samples,vms_provisioned,fq,decision\n";
  for (const auto& r : result.rows) {
    out += fmt::format("{},{},{},{},{:.6f},{}\n", r.broker_id, r.truly_fair ? "fair" : "unfair",
                       r.samples, r.vms_provisioned, r.fq, r.decision ? "Fair" : "Unfair");
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& c) {
  return fmt::format(
      "ground_truth,predicted_fair,predicted_unfair\nfair,{},{}\nunfair,{},{}\n",
      c.true_fair_predicted_fair, c.true_fair_predicted_unfair, c.true_unfair_predicted_fair,
      c.true_unfair_predicted_unfair);
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
  std::string out = "samples_per_epoch,accuracy\n";
  for (const auto& p : sweep) out += fmt::format("{},{:.6f}\n", p.samples_per_epoch, p.accuracy);
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

}  // namespace

void emit_reports(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_file(out_dir / "results.csv", results_csv(result));
  write_file(out_dir / "confusion.csv", confusion_csv(result.confusion));
}

void emit_sweep(const std::vector<SweepPoint>& sweep, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_file(out_dir / "sweep.csv", sweep_csv(sweep));
}

}  // namespace fairbroker
