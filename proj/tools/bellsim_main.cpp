#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bellsim/harness.hpp"
#include "bellsim/io.hpp"

namespace fs = std::filesystem;
using namespace bellsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonlocal = 1;  // check-behavior only
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

nlohmann::json table_json_from_string(const std::string& s) {
  auto vals = parse_csv_doubles(s);
  if (vals.size() != 4)
    throw CLI::ValidationError("--table", "expected 4 comma-separated values");
  nlohmann::json t = nlohmann::json::array();
  for (double v : vals) t.push_back(static_cast<int>(v));
  return t;
}

struct RunFlags {
  std::string config_file;
  std::string strategy;
  std::int64_t n_trials = -1;
  std::int64_t setting_seed = -1;
  std::int64_t strategy_seed = -1;
  std::string mode;
  std::string angles;   // "preset-chsh" or "a1,a2,b1,b2" in degrees
  std::string table;    // "x1,x2,y1,y2"
  std::string tables;   // semicolon-separated tables for time-periodic
  std::string weights;  // 16 comma-separated weights for iid-random
  std::string behavior_file;
  std::string out_dir = "out";
  bool trajectory = false;
};

RunConfig resolve_config(const RunFlags& f) {
  RunConfig cfg;
  if (!f.config_file.empty()) cfg = io::load_config(f.config_file);
  if (f.n_trials >= 0) cfg.n_trials = f.n_trials;
  if (f.setting_seed >= 0)
    cfg.setting_seed = static_cast<std::uint64_t>(f.setting_seed);
  if (f.strategy_seed >= 0)
    cfg.strategy_seed = static_cast<std::uint64_t>(f.strategy_seed);
  if (!f.mode.empty()) cfg.mode = run_mode_from_string(f.mode);
  if (!f.strategy.empty()) {
    cfg.strategy.name = f.strategy;
    cfg.strategy.params = nlohmann::json::object();
  }
  auto& params = cfg.strategy.params;
  if (!f.table.empty()) params["table"] = table_json_from_string(f.table);
  if (!f.tables.empty()) {
    nlohmann::json tables = nlohmann::json::array();
    std::stringstream ss(f.tables);
    std::string item;
    while (std::getline(ss, item, ';'))
      tables.push_back(table_json_from_string(item));
    params["tables"] = tables;
  }
  if (!f.weights.empty()) params["weights"] = parse_csv_doubles(f.weights);
  if (!f.behavior_file.empty()) params["behavior_file"] = f.behavior_file;
  if (!f.angles.empty()) {
    params.erase("preset");
    params.erase("angles_deg");
    if (f.angles.find(',') == std::string::npos)
      params["preset"] = f.angles;
    else
      params["angles_deg"] = parse_csv_doubles(f.angles);
  }
  return cfg;
}

void write_outputs(const fs::path& out_dir, const RunOutcome& out,
                   bool trajectory) {
  fs::create_directories(out_dir);
  std::ofstream rep(out_dir / "report.json");
  rep << io::report_to_json(out.report).dump(2) << '\n';
  std::ofstream csv(out_dir / "summary.csv");
  csv << io::report_csv_header() << '\n'
      << io::report_csv_row(out.report) << '\n';
  if (trajectory)
    io::write_trajectory_csv(out_dir / "trajectory.csv", out.trajectory);
}

int cmd_run(const RunFlags& flags) {
  RunConfig cfg;
  try {
    cfg = resolve_config(flags);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    fs::create_directories(flags.out_dir);
    fs::path log_path = fs::path(flags.out_dir) / "trial_log.jsonl";
    fs::remove(log_path);
    cfg.log_path = log_path;
    RunOutcome out = run_experiment(cfg);
    write_outputs(flags.out_dir, out, flags.trajectory);
    std::cout << "bell_statistic: " << out.report.bell.value << " +- "
              << out.report.bell.stderr_value << "  (T_n "
              << out.report.martingale_t_n << ")\n"
              << "outputs: " << flags.out_dir << '\n';
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_analyze(const std::string& log_file, const std::string& out_dir,
                bool trajectory) {
  try {
    io::TrialLog log = io::read_trial_log(log_file);
    ReportContext ctx;
    if (!log.header.is_null() && log.header.contains("config")) {
      RunConfig cfg = io::config_from_json(log.header.at("config"));
      ctx.strategy_name = cfg.strategy.name;
      ctx.setting_seed = cfg.setting_seed;
      ctx.strategy_seed = cfg.strategy_seed;
      ctx.mode = cfg.mode;
      ctx.azuma_thresholds = cfg.azuma_thresholds;
      ctx.config_hash = log.header.value("config_hash", "");
    }
    if (!log.records.empty()) {
      ctx.mode = log.records.front().mode;
      ctx.strategy_class = log.records.front().strategy_class;
    }
    AnalysisResult ar = analyze(log.records, ctx);
    std::cout << io::report_to_json(ar.report).dump(2) << '\n';
    if (!out_dir.empty()) {
      write_outputs(out_dir, RunOutcome{{}, ar.report, ar.trajectory},
                    trajectory);
    }
    return kExitOk;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_check_behavior(const std::string& file, double tol) {
  Behavior b = uniform_behavior();
  try {
    b = io::load_behavior(file);
  } catch (const std::exception& e) {
    std::cerr << "invalid behavior: " << e.what() << '\n';
    return kExitConfig;
  }
  bool ns = no_signalling_check(b, tol);
  if (!ns) {
    std::cout << "no-signalling: FAIL\n";
    return kExitConfig;
  }
  try {
    PolytopeVerdict v = local_polytope_member(b, tol);
    if (v.is_local) {
      std::cout << "no-signalling: pass; local: yes\n";
      return kExitOk;
    }
    std::ostringstream facet;
    facet.precision(5);
    facet << std::fixed << v.facet->value;
    std::cout << "no-signalling: pass; local: NO (facet " << facet.str()
              << " > 2)\n";
    return kExitNonlocal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

struct DemoRow {
  std::string label;
  RunConfig cfg;
};

int cmd_demo(std::int64_t n, const std::string& out_dir) {
  std::vector<DemoRow> rows;
  {
    RunConfig c;
    c.strategy = {"constant", {{"table", {1, 1, 1, 1}}}};
    rows.push_back({"constant-lhv", c});
  }
  {
    RunConfig c;
    c.strategy = {"time-periodic",
                  {{"tables", {{1, 1, 1, 1}, {-1, -1, -1, -1}, {1, -1, 1, -1}}}}};
    rows.push_back({"periodic-lhv", c});
  }
  {
    RunConfig c;
    c.strategy = {"greedy-memory", nlohmann::json::object()};
    rows.push_back({"greedy-memory-lhv", c});
  }
  {
    RunConfig c;
    c.strategy = {"quantum", {{"preset", "preset-chsh"}}};
    rows.push_back({"quantum-preset", c});
  }
  try {
    fs::create_directories(out_dir);
    std::printf("%-20s %12s %12s %14s %8s\n", "strategy", "bell", "stderr",
                "azuma-log-bnd", "class");
    bool wide = false;
    for (auto& row : rows) {
      row.cfg.n_trials = n;
      row.cfg.setting_seed = 20021125;
      row.cfg.strategy_seed = 42;
      fs::path log = fs::path(out_dir) / (row.label + ".jsonl");
      fs::remove(log);
      row.cfg.log_path = log;
      RunOutcome out = run_experiment(row.cfg);
      double t_pos = std::max(out.report.martingale_t_n, 0.0);
      std::printf("%-20s %12.4f %12.4f %14.1f %8s\n", row.label.c_str(),
                  out.report.bell.value, out.report.bell.stderr_value,
                  azuma_log_bound(n, t_pos),
                  std::string(to_string(out.report.strategy_class)).c_str());
      io::write_trajectory_csv(fs::path(out_dir) / (row.label + "-trajectory.csv"),
                               out.trajectory);
      if (4.0 * out.report.bell.stderr_value > 0.25) wide = true;
    }
    if (wide)
      std::cout << "note: confidence intervals are wide at n=" << n
                << "; increase --n for a sharp comparison\n";
    std::cout << "trajectories written to " << out_dir << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-type delayed-choice experiment arena"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "execute a configured experiment");
  run->add_option("--config", rf.config_file, "JSON config file");
  run->add_option("--strategy", rf.strategy,
                  "constant | iid-random | time-periodic | greedy-memory | "
                  "nonlocal-cheat | quantum");
  run->add_option("--n", rf.n_trials, "number of trials");
  run->add_option("--setting-seed", rf.setting_seed, "harness coin seed");
  run->add_option("--strategy-seed", rf.strategy_seed, "strategy stream seed");
  run->add_option("--mode", rf.mode, "sequential | galaxy");
  run->add_option("--angles", rf.angles,
                  "preset-chsh or a1,a2,b1,b2 in degrees (quantum)");
  run->add_option("--table", rf.table, "x1,x2,y1,y2 over {-1,1} (constant)");
  run->add_option("--tables", rf.tables,
                  "semicolon-separated tables (time-periodic)");
  run->add_option("--weights", rf.weights, "16 weights (iid-random)");
  run->add_option("--behavior", rf.behavior_file,
                  "behavior JSON (nonlocal-cheat)");
  run->add_option("--out", rf.out_dir, "output directory");
  run->add_flag("--trajectory", rf.trajectory, "also dump trajectory.csv");

  std::string analyze_log, analyze_out;
  bool analyze_traj = false;
  auto* an = app.add_subcommand("analyze", "recompute a report from a log");
  an->add_option("log", analyze_log, "trial log (JSON Lines)")->required();
  an->add_option("--out", analyze_out, "output directory");
  an->add_flag("--trajectory", analyze_traj, "also dump trajectory.csv");

  std::string check_file;
  double check_tol = 1e-9;
  auto* ck = app.add_subcommand(
      "check-behavior", "no-signalling and local-polytope verdicts");
  ck->add_option("file", check_file, "behavior JSON file")->required();
  ck->add_option("--tol", check_tol, "feasibility tolerance");

  std::int64_t demo_n = 100000;
  std::string demo_out = "demo-out";
  auto* dm = app.add_subcommand("demo",
                                "run the canonical strategy quartet");
  dm->add_option("--n", demo_n, "trials per strategy");
  dm->add_option("--out", demo_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (run->parsed()) return cmd_run(rf);
  if (an->parsed()) return cmd_analyze(analyze_log, analyze_out, analyze_traj);
  if (ck->parsed()) return cmd_check_behavior(check_file, check_tol);
  if (dm->parsed()) return cmd_demo(demo_n, demo_out);
  return kExitConfig;
}
