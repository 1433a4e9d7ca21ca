#include "bellsim/harness.hpp"

#include <fstream>

#include "bellsim/io.hpp"

namespace bellsim {

void RunConfig::validate() const {
  if (n_trials < 1)
    throw std::invalid_argument("n_trials must be >= 1, got " +
                                std::to_string(n_trials));
  if (strategy.name.empty())
    throw std::invalid_argument("strategy.name must be set");
  for (double t : azuma_thresholds)
    if (!(t >= 0.0))
      throw std::invalid_argument("azuma_thresholds entries must be >= 0");
}

namespace {

CounterfactualTable table_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument(
        "table must be a 4-element array over {-1,1}");
  return CounterfactualTable{Outcome(j[0].get<int>()), Outcome(j[1].get<int>()),
                             Outcome(j[2].get<int>()), Outcome(j[3].get<int>())};
}

AngleSet angles_from_params(const nlohmann::json& params) {
  if (params.contains("preset")) {
    auto preset = params.at("preset").get<std::string>();
    if (preset != "preset-chsh")
      throw std::invalid_argument("unknown angle preset: " + preset);
    return AngleSet::preset_chsh();
  }
  if (params.contains("angles_deg")) {
    const auto& a = params.at("angles_deg");
    if (!a.is_array() || a.size() != 4)
      throw std::invalid_argument("angles_deg must be [a1,a2,b1,b2] degrees");
    return AngleSet::from_degrees(a[0].get<double>(), a[1].get<double>(),
                                  a[2].get<double>(), a[3].get<double>());
  }
  throw std::invalid_argument(
      "quantum strategy needs params.preset or params.angles_deg");
}

}  // namespace

Strategy make_strategy(const StrategySpec& spec, std::uint64_t seed) {
  const auto& p = spec.params;
  if (spec.name == "constant") {
    if (!p.contains("table"))
      throw std::invalid_argument("constant strategy needs params.table");
    return constant_strategy(table_from_json(p.at("table")));
  }
  if (spec.name == "iid-random") {
    if (!p.contains("weights"))
      throw std::invalid_argument("iid-random strategy needs params.weights");
    const auto& w = p.at("weights");
    if (!w.is_array() || w.size() != 16)
      throw std::invalid_argument("params.weights must have 16 entries");
    std::array<double, 16> weights;
    for (std::size_t i = 0; i < 16; ++i) weights[i] = w[i].get<double>();
    return iid_random_strategy(weights, seed);
  }
  if (spec.name == "time-periodic") {
    if (!p.contains("tables"))
      throw std::invalid_argument("time-periodic strategy needs params.tables");
    std::vector<CounterfactualTable> tables;
    for (const auto& tj : p.at("tables")) tables.push_back(table_from_json(tj));
    return time_periodic_strategy(std::move(tables));
  }
  if (spec.name == "greedy-memory") return greedy_memory_strategy();
  if (spec.name == "nonlocal-cheat") {
    if (p.contains("behavior"))
      return nonlocal_cheat_strategy(io::behavior_from_json(p.at("behavior")),
                                     seed);
    if (p.contains("behavior_file"))
      return nonlocal_cheat_strategy(
          io::load_behavior(p.at("behavior_file").get<std::string>()), seed);
    throw std::invalid_argument(
        "nonlocal-cheat strategy needs params.behavior or params.behavior_file");
  }
  if (spec.name == "quantum") return quantum_sampler(angles_from_params(p), seed);
  throw std::invalid_argument("unknown strategy: " + spec.name);
}

std::pair<Setting, Setting> toss_settings(RngStream& setting_stream) {
  int a = setting_stream.coin();
  int b = setting_stream.coin();
  return {Setting(a), Setting(b)};
}

TrialRecord run_trial(Strategy& strategy, const History& history,
                      std::int64_t trial_index, RngStream& setting_stream,
                      RunMode mode, const TrialProbe& probe) {
  if (is_lhv(strategy)) {
    auto& lhv = *std::get<std::unique_ptr<LhvStrategy>>(strategy);
    // Delayed choice: the table is committed before the coins exist.
    if (probe) probe("respond");
    CounterfactualTable table = lhv.respond(trial_index, history);
    if (probe) probe("toss");
    auto [a, b] = toss_settings(setting_stream);
    auto [x, y] = select_outcomes(table, a, b);
    return TrialRecord{trial_index, a, b, x, y, mode, StrategyClass::lhv,
                       table};
  }
  auto& nl = *std::get<std::unique_ptr<NonlocalStrategy>>(strategy);
  if (probe) probe("toss");
  auto [a, b] = toss_settings(setting_stream);
  if (probe) probe("respond");
  auto [x, y] = nl.respond(trial_index, history, a, b);
  return TrialRecord{trial_index, a, b, x, y, mode, nl.strategy_class(),
                     std::nullopt};
}

RunOutcome run_experiment(const RunConfig& config) {
  config.validate();
  Strategy strategy = make_strategy(config.strategy, config.strategy_seed);
  if (config.mode == RunMode::galaxy && !strategy_memoryless(strategy))
    throw std::invalid_argument(
        "galaxy mode requires a memoryless strategy; '" +
        std::string(strategy_name(strategy)) + "' uses history");

  RngStream setting_stream(config.setting_seed, "harness/settings");
  std::ofstream log;
  std::string hash = io::config_hash(config);
  if (config.log_path) {
    log.open(*config.log_path, std::ios::app);
    if (!log)
      throw std::runtime_error("cannot open trial log " +
                               config.log_path->string());
    nlohmann::json header{{"config", io::config_to_json(config)},
                          {"config_hash", hash}};
    log << header.dump() << '\n';
  }

  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(config.n_trials));
  const History empty_history;
  for (std::int64_t k = 0; k < config.n_trials; ++k) {
    const History& visible =
        config.mode == RunMode::sequential ? records : empty_history;
    TrialRecord r = run_trial(strategy, visible, k, setting_stream,
                              config.mode);
    if (log.is_open()) log << io::record_to_json(r).dump() << '\n';
    records.push_back(std::move(r));
  }

  ReportContext ctx{config.mode,
                    std::string(strategy_name(strategy)),
                    strategy_class(strategy),
                    config.setting_seed,
                    config.strategy_seed,
                    hash,
                    config.azuma_thresholds};
  AnalysisResult ar = analyze(records, ctx);
  return RunOutcome{std::move(records), std::move(ar.report),
                    std::move(ar.trajectory)};
}

}  // namespace bellsim
