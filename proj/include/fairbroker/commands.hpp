#pragma once

#include <filesystem>
#include <ostream>

#include "fairbroker/config.hpp"

namespace fairbroker {

// Executes a manifest (experiment, sweep or verify), writes its output files
// plus manifest.json into `out_dir` and prints a short summary. `replay`
// is this function applied to a loaded manifest.
void execute(const Manifest& manifest, const std::filesystem::path& out_dir, std::ostream& summary);

// verdict.csv for the verify command.
std::string verify_csv(const std::string& broker_id, const FairnessVerdict& v,
                       const std::set<int>& isolated);

}  // namespace fairbroker
