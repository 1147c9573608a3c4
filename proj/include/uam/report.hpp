#pragma once

// Full-pipeline analysis and report generation, plus the command-line
// driver. The JSON report is canonical and byte-stable for identical
// inputs and flags; markdown and CSV renderings are pure projections.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uam/model.hpp"

namespace uam::report {

using json = nlohmann::ordered_json;

// FNV-1a 64-bit over the raw model file bytes; hex string with prefix.
std::string input_digest(const std::string& bytes);

struct Options {
  std::uint64_t seed = 42;
  std::uint64_t trials = 0;  // 0 = skip the Monte Carlo cross-check
  double ambient_c = 25.0;
  std::optional<mission::FailureScenario> failure;
};

// Everything the report needs, derived once from the model.
struct Analysis {
  std::vector<Violation> validation;
  std::vector<fha::ComplianceRow> compliance;
  battery::SizingResult main_pack;
  battery::SizingResult push_pack;
  // worst per-pack figures from the exhaustive single-failure sweep
  double worst_main_peak_w = 0.0;
  double worst_main_energy_wh = 0.0;
  double worst_push_energy_wh = 0.0;
  mission::SimResult nominal;  // with sized capacities bound
  mission::EtpResult etp;
  double energy_at_etp_wh = 0.0;      // relevant main pack, flight 3
  double reserve_endurance_min = 0.0;  // at the ETP failure state, 90 kW
  std::vector<std::string> infeasible;  // sweep scenarios that failed
};

Analysis analyze(const model::Model& m);

// Builds the canonical JSON report. `digest` ties the report to its input.
json build_report(const model::Model& m, const Analysis& a, const Options& opts,
                  const std::string& input_path, const std::string& digest);

std::string render_markdown(const json& report);
std::string render_csv(const json& report);  // compliance + sizing summary rows

// CLI driver; argv-style arguments without the program name. Returns the
// exit status: 0 pass, 1 verdict fail, 2 input error, 3 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uam::report
