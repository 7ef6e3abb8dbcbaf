// fairbroker: audit simulated cloud brokers for operational fairness.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "fairbroker/commands.hpp"
#include "fairbroker/errors.hpp"

namespace fb = fairbroker;

namespace {

struct Overrides {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::optional<long> samples;
  std::optional<double> verdict_point;
  std::optional<std::string> adaptive;
  std::optional<int> threads;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON); defaults to the 30-broker reference population")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seeds, "Seed list, e.g. --seed 1 2 3");
  cmd->add_option("--samples", o.samples, "Samples per epoch")->check(CLI::PositiveNumber);
  cmd->add_option("--verdict-point", o.verdict_point, "Fraction of the epoch elapsed at verdict")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--adaptive", o.adaptive, "off | paper-ivc | paper-vb")
      ->check(CLI::IsMember({"off", "paper-ivc", "paper-vb"}));
  cmd->add_option("--threads", o.threads, "Worker threads across seeds")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
}

fb::ExperimentSpec build_spec(const Overrides& o) {
  fb::ExperimentSpec spec =
      o.config.empty() ? fb::reference_population(1) : fb::load_experiment_spec(o.config);
  if (!o.seeds.empty()) spec.seeds = o.seeds;
  if (o.samples) spec.verifier.samples_per_epoch = *o.samples;
  if (o.verdict_point) spec.verdict_point = *o.verdict_point;
  if (o.adaptive) spec.adaptive.mode = fb::adaptive_mode_from_string(*o.adaptive);
  if (o.threads) spec.threads = *o.threads;
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic fairness auditing of simulated cloud brokers"};
  app.require_subcommand(1);

  Overrides verify_o, experiment_o, sweep_o;
  std::string broker_id;
  std::vector<long> sizes{5, 10, 25, 50, 100, 200};
  std::string manifest_path;
  std::string replay_out = "replay";

  auto* verify = app.add_subcommand("verify", "Audit one broker and print its verdict");
  add_common(verify, verify_o);
  verify->add_option("--broker", broker_id, "Broker id from the config (default: first)");

  auto* experiment = app.add_subcommand("experiment", "Audit a broker population");
  add_common(experiment, experiment_o);

  auto* sweep = app.add_subcommand("sweep", "Accuracy versus samples per epoch");
  add_common(sweep, sweep_o);
  sweep->add_option("--sizes", sizes, "Samples-per-epoch values to sweep");

  auto* replay = app.add_subcommand("replay", "Re-run a manifest.json bit-exactly");
  replay->add_option("manifest", manifest_path, "manifest.json from an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory");

  auto* dump = app.add_subcommand("default-config", "Print the default experiment config as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dump) {
      std::cout << fb::to_json(fb::reference_population(1)).dump(2) << '\n';
      return 0;
    }
    fb::Manifest manifest;
    std::string out;
    if (*verify) {
      manifest = {"verify", build_spec(verify_o), {}, broker_id};
      out = verify_o.out;
    } else if (*experiment) {
      manifest = {"experiment", build_spec(experiment_o), {}, {}};
      out = experiment_o.out;
    } else if (*sweep) {
      manifest = {"sweep", build_spec(sweep_o), sizes, {}};
      out = sweep_o.out;
    } else {
      manifest = fb::load_manifest(manifest_path);
      out = replay_out;
    }
    fb::execute(manifest, out, std::cout);
  } catch (const fb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
