#include "fairbroker/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

#include "fairbroker/errors.hpp"

namespace fairbroker {

std::string verify_csv(const std::string& broker_id, const FairnessVerdict& v,
                       const std::set<int>& isolated) {
  std::string sizes;
  for (int s : isolated) {
    if (!sizes.empty()) sizes += ';';
    sizes += std::to_string(s);
  }
  return fmt::format(
      "broker_id,fq,uq,phi,mu,tau,trace,decision,isolated_sizes\n"
      "{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{}\n",
      broker_id, v.fq, v.uq, v.triple.phi, v.triple.mu, v.triple.tau, to_string(v.trace_class),
      v.decision ? "Fair" : "Unfair", sizes);
}

namespace {

void run_verify(const Manifest& m, const std::filesystem::path& out_dir, std::ostream& summary) {
  const ExperimentSpec& spec = m.spec;
  spec.validate();
  auto it = std::find_if(spec.brokers.begin(), spec.brokers.end(),
                         [&](const BrokerSpec& b) { return b.id == m.broker_id; });
  if (!m.broker_id.empty() && it == spec.brokers.end()) {
    throw ConfigError("no broker with id '" + m.broker_id + "'");
  }
  if (m.broker_id.empty()) it = spec.brokers.begin();
  const auto index = static_cast<std::size_t>(it - spec.brokers.begin());

  std::filesystem::create_directories(out_dir);
  std::ofstream audit_file(out_dir / "audit.csv", std::ios::binary | std::ios::trunc);
  if (!audit_file) throw std::runtime_error("cannot write " + (out_dir / "audit.csv").string());
  AuditLog log(audit_file);

  SimulatedBroker broker(it->policy, make_suppliers(spec.suppliers));
  Rng rng(mix_seed(spec.seeds.front(), index));
  FairnessAuditor auditor(spec.verifier, &log);
  for (int e = 0; e < spec.warmup_epochs; ++e) auditor.run_epoch(broker, rng);
  auditor.run_partial_epoch(broker, rng, spec.verdict_point);
  const FairnessVerdict v = auditor.verdict();
  const std::set<int> isolated = v.decision ? std::set<int>{} : auditor.isolate_unfair_sizes();

  std::ofstream f(out_dir / "verdict.csv", std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + (out_dir / "verdict.csv").string());
  f << verify_csv(it->id, v, isolated);

  summary << fmt::format("{}: decision={} fq={:.3f} phi={:.3f} mu={:.3f} tau={:.3f} trace={}\n",
                         it->id, v.decision ? "Fair" : "Unfair", v.fq, v.triple.phi, v.triple.mu,
                         v.triple.tau, to_string(v.trace_class));
  if (!isolated.empty()) {
    summary << "unfairness isolated to request sizes:";
    for (int s : isolated) summary << ' ' << s;
    summary << '\n';
  }
}

}  // namespace

void execute(const Manifest& manifest, const std::filesystem::path& out_dir, std::ostream& summary) {
  if (manifest.command == "experiment") {
    const auto result = run_experiment(manifest.spec);
    emit_reports(result, out_dir);
    const auto& c = result.confusion;
    summary << fmt::format("evaluated {} (broker, seed) cells: accuracy {:.3f}, {} false positives, "
                           "{} false negatives\n",
                           c.total(), c.accuracy(), c.false_positives(), c.false_negatives());
  } else if (manifest.command == "sweep") {
    const auto sweep = sweep_cost_accuracy(manifest.spec, manifest.sample_sizes);
    emit_sweep(sweep, out_dir);
    for (const auto& p : sweep) {
      summary << fmt::format("samples/epoch {:>5}: accuracy {:.3f}\n", p.samples_per_epoch, p.accuracy);
    }
  } else if (manifest.command == "verify") {
    run_verify(manifest, out_dir, summary);
  } else {
    throw ConfigError("unknown manifest command '" + manifest.command + "'");
  }
  write_manifest(manifest, out_dir);
}

}  // namespace fairbroker
