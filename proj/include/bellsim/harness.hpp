#ifndef BELLSIM_HARNESS_HPP
#define BELLSIM_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellsim/analysis.hpp"
#include "bellsim/record.hpp"
#include "bellsim/rng.hpp"
#include "bellsim/strategy.hpp"

// Executes trials: tosses independent fair coins for settings, queries the
// strategy, selects outcomes, records TrialRecords. The harness owns the
// coins; strategies never see them before committing.

namespace bellsim {

struct StrategySpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

struct RunConfig {
  std::int64_t n_trials = 1;
  std::uint64_t setting_seed = 0;
  std::uint64_t strategy_seed = 1;
  StrategySpec strategy;
  RunMode mode = RunMode::sequential;
  std::vector<double> azuma_thresholds{0.1};
  // When set, the trial log is appended line by line as trials run.
  std::optional<std::filesystem::path> log_path;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Builds a strategy from its config spec. Unknown names and malformed
// params throw std::invalid_argument.
Strategy make_strategy(const StrategySpec& spec, std::uint64_t seed);

// One fair coin per wing: each of the 4 pairs has probability 1/4.
std::pair<Setting, Setting> toss_settings(RngStream& setting_stream);

// Test probe: receives "respond" / "toss" markers in execution order.
using TrialProbe = std::function<void(std::string_view)>;

// One trial. For LHV strategies the counterfactual table is committed
// BEFORE the settings are tossed (the delayed choice); for nonlocal
// strategies the settings are tossed first and handed to the responder.
TrialRecord run_trial(Strategy& strategy, const History& history,
                      std::int64_t trial_index, RngStream& setting_stream,
                      RunMode mode, const TrialProbe& probe = nullptr);

struct RunOutcome {
  std::vector<TrialRecord> records;
  RunReport report;
  MartingaleTrajectory trajectory;
};

// Executes the configured run. Sequential mode feeds the growing history to
// the strategy; galaxy mode runs every trial with empty history and rejects
// memoryful strategies.
RunOutcome run_experiment(const RunConfig& config);

}  // namespace bellsim

#endif  // BELLSIM_HARNESS_HPP
