#ifndef BELLSIM_IO_HPP
#define BELLSIM_IO_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellsim/analysis.hpp"
#include "bellsim/harness.hpp"

// File formats: behavior JSON, JSON Lines trial logs, report JSON and the
// flat CSV summaries. All outputs are deterministic functions of their
// inputs; no timestamps anywhere.

namespace bellsim::io {

// Behavior files: {"p": {"x,y,a,b": probability, ...}} with keys like
// "+1,-1,1,2". Loader enforces exactly the 16 cells and the Behavior
// invariants.
nlohmann::json behavior_to_json(const Behavior& b);
Behavior behavior_from_json(const nlohmann::json& j);
Behavior load_behavior(const std::filesystem::path& path);
void save_behavior(const std::filesystem::path& path, const Behavior& b);

nlohmann::json record_to_json(const TrialRecord& r);
TrialRecord record_from_json(const nlohmann::json& j);

// Hash scope: everything in the config except output paths.
nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
std::string config_hash(const RunConfig& c);

struct TrialLog {
  nlohmann::json header;
  std::vector<TrialRecord> records;
};

// JSON Lines: a header line {"config": ..., "config_hash": ...} followed by
// one record per line.
void write_trial_log(const std::filesystem::path& path, const RunConfig& c,
                     std::span<const TrialRecord> records);
// Malformed lines are reported with their 1-based line number.
TrialLog read_trial_log(const std::filesystem::path& path);

nlohmann::json report_to_json(const RunReport& r);
std::string report_csv_header();
std::string report_csv_row(const RunReport& r);
void write_trajectory_csv(const std::filesystem::path& path,
                          const MartingaleTrajectory& traj);

}  // namespace bellsim::io

#endif  // BELLSIM_IO_HPP
