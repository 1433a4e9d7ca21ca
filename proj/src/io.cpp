#include "bellsim/io.hpp"

#include <fstream>
#include <sstream>

#include "bellsim/rng.hpp"

namespace bellsim::io {

namespace {

std::string cell_key(int x, int y, int a, int b) {
  std::ostringstream os;
  os << (x > 0 ? "+1" : "-1") << ',' << (y > 0 ? "+1" : "-1") << ',' << a << ','
     << b;
  return os.str();
}

}  // namespace

nlohmann::json behavior_to_json(const Behavior& b) {
  nlohmann::json p = nlohmann::json::object();
  for (int xi = 0; xi < 2; ++xi)
    for (int yi = 0; yi < 2; ++yi)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          p[cell_key(2 * xi - 1, 2 * yi - 1, ai + 1, bi + 1)] =
              b.raw()[xi][yi][ai][bi];
  return nlohmann::json{{"p", p}};
}

Behavior behavior_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("p") || !j.at("p").is_object())
    throw std::invalid_argument("behavior JSON must be an object with key \"p\"");
  const auto& p = j.at("p");
  Behavior::Table t{};
  std::size_t seen = 0;
  for (int xi = 0; xi < 2; ++xi) {
    for (int yi = 0; yi < 2; ++yi) {
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          std::string key = cell_key(2 * xi - 1, 2 * yi - 1, ai + 1, bi + 1);
          if (!p.contains(key))
            throw std::invalid_argument("behavior JSON missing cell p." + key);
          if (!p.at(key).is_number())
            throw std::invalid_argument("behavior JSON p." + key +
                                        " is not a number");
          t[xi][yi][ai][bi] = p.at(key).get<double>();
          ++seen;
        }
      }
    }
  }
  if (p.size() != seen)
    throw std::invalid_argument("behavior JSON has unexpected extra keys in p");
  return Behavior(t);  // throws if invariants fail
}

Behavior load_behavior(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open behavior file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("behavior file " + path.string() + ": " +
                                e.what());
  }
  return behavior_from_json(j);
}

void save_behavior(const std::filesystem::path& path, const Behavior& b) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write behavior file " + path.string());
  out << behavior_to_json(b).dump(2) << '\n';
}

nlohmann::json record_to_json(const TrialRecord& r) {
  nlohmann::json j{{"trial_index", r.trial_index}, {"a", r.a.value()},
                   {"b", r.b.value()},             {"x", r.x.value()},
                   {"y", r.y.value()},             {"mode", to_string(r.mode)},
                   {"strategy_class", to_string(r.strategy_class)}};
  if (r.table)
    j["table"] = {r.table->x1.value(), r.table->x2.value(),
                  r.table->y1.value(), r.table->y2.value()};
  return j;
}

TrialRecord record_from_json(const nlohmann::json& j) {
  TrialRecord r{j.at("trial_index").get<std::int64_t>(),
                Setting(j.at("a").get<int>()),
                Setting(j.at("b").get<int>()),
                Outcome(j.at("x").get<int>()),
                Outcome(j.at("y").get<int>()),
                run_mode_from_string(j.at("mode").get<std::string>()),
                strategy_class_from_string(
                    j.at("strategy_class").get<std::string>()),
                std::nullopt};
  if (j.contains("table")) {
    const auto& t = j.at("table");
    r.table = CounterfactualTable{Outcome(t.at(0).get<int>()),
                                  Outcome(t.at(1).get<int>()),
                                  Outcome(t.at(2).get<int>()),
                                  Outcome(t.at(3).get<int>())};
  }
  return r;
}

nlohmann::json config_to_json(const RunConfig& c) {
  return nlohmann::json{
      {"n_trials", c.n_trials},
      {"setting_seed", c.setting_seed},
      {"strategy_seed", c.strategy_seed},
      {"mode", to_string(c.mode)},
      {"strategy", {{"name", c.strategy.name}, {"params", c.strategy.params}}},
      {"azuma_thresholds", c.azuma_thresholds}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("n_trials")) c.n_trials = j.at("n_trials").get<std::int64_t>();
  if (j.contains("setting_seed"))
    c.setting_seed = j.at("setting_seed").get<std::uint64_t>();
  if (j.contains("strategy_seed"))
    c.strategy_seed = j.at("strategy_seed").get<std::uint64_t>();
  if (j.contains("mode"))
    c.mode = run_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("strategy")) {
    const auto& s = j.at("strategy");
    c.strategy.name = s.at("name").get<std::string>();
    if (s.contains("params")) c.strategy.params = s.at("params");
  }
  if (j.contains("azuma_thresholds"))
    c.azuma_thresholds = j.at("azuma_thresholds").get<std::vector<double>>();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config file " + path.string() + ": " +
                                e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const RunConfig& c) {
  // nlohmann objects dump with sorted keys, so this is canonical.
  std::uint64_t h = detail::fnv1a64(config_to_json(c).dump());
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_trial_log(const std::filesystem::path& path, const RunConfig& c,
                     std::span<const TrialRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trial log " + path.string());
  nlohmann::json header{{"config", config_to_json(c)},
                        {"config_hash", config_hash(c)}};
  out << header.dump() << '\n';
  for (const TrialRecord& r : records) out << record_to_json(r).dump() << '\n';
}

TrialLog read_trial_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trial log " + path.string());
  TrialLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("trial log " + path.string() + " line " +
                                  std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (lineno == 1 && j.contains("config")) {
        log.header = j;
        continue;
      }
      log.records.push_back(record_from_json(j));
    } catch (const std::exception& e) {
      throw std::invalid_argument("trial log " + path.string() + " line " +
                                  std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      std::string key = std::to_string(ai + 1) + std::to_string(bi + 1);
      counts[key] = {{"n", r.counts.n[ai][bi]},
                     {"n_equal", r.counts.n_equal[ai][bi]}};
    }
  }
  nlohmann::json azuma = nlohmann::json::array();
  for (const auto& a : r.azuma)
    azuma.push_back({{"threshold", a.threshold},
                     {"log_bound", a.log_bound},
                     {"bound", a.bound}});
  nlohmann::json polytope{{"tolerance", r.polytope_tol},
                          {"note", r.polytope_note}};
  if (r.polytope) {
    polytope["is_local"] = r.polytope->is_local;
    if (r.polytope->weights)
      polytope["weights"] = *r.polytope->weights;
    if (r.polytope->facet)
      polytope["facet"] = {{"signs", r.polytope->facet->signs},
                           {"value", r.polytope->facet->value}};
  }
  return nlohmann::json{
      {"n_trials", r.n_trials},
      {"mode", to_string(r.mode)},
      {"strategy", r.strategy_name},
      {"strategy_class", to_string(r.strategy_class)},
      {"setting_seed", r.setting_seed},
      {"strategy_seed", r.strategy_seed},
      {"config_hash", r.config_hash},
      {"counts", counts},
      {"estimated_behavior", behavior_to_json(r.estimated)},
      {"bell_statistic", {{"value", r.bell.value},
                          {"stderr", r.bell.stderr_value}}},
      {"martingale", {{"final_s", r.martingale_final_s},
                      {"t_n", r.martingale_t_n},
                      {"max_s", r.martingale_max_s}}},
      {"azuma", azuma},
      {"polytope", polytope}};
}

std::string report_csv_header() {
  return "config_hash,strategy,strategy_class,mode,n_trials,bell_value,"
         "bell_stderr,t_n,max_s,polytope_local";
}

std::string report_csv_row(const RunReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << r.config_hash << ',' << r.strategy_name << ','
     << to_string(r.strategy_class) << ',' << to_string(r.mode) << ','
     << r.n_trials << ',' << r.bell.value << ',' << r.bell.stderr_value << ','
     << r.martingale_t_n << ',' << r.martingale_max_s << ','
     << (r.polytope ? (r.polytope->is_local ? "yes" : "no") : "n/a");
  return os.str();
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const MartingaleTrajectory& traj) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write trajectory " + path.string());
  out << "trial_index,s_n\n";
  for (std::size_t k = 0; k < traj.s.size(); ++k)
    out << k << ',' << traj.s[k] << '\n';
}

}  // namespace bellsim::io
