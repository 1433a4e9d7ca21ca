#include <doctest.h>

#include <cmath>

#include "bellsim/harness.hpp"
#include "bellsim/strategy.hpp"

using namespace bellsim;

namespace {

CounterfactualTable tbl(int x1, int x2, int y1, int y2) {
  return CounterfactualTable{Outcome(x1), Outcome(x2), Outcome(y1),
                             Outcome(y2)};
}

// Run an LHV strategy against fair coins and return the empirical Bell
// statistic.
BellEstimate run_lhv(std::unique_ptr<LhvStrategy> s, std::int64_t n,
                     std::uint64_t setting_seed) {
  Strategy strategy = std::move(s);
  RngStream coins(setting_seed, "harness/settings");
  History history;
  history.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k)
    history.push_back(
        run_trial(strategy, history, k, coins, RunMode::sequential));
  return bell_statistic(history);
}

}  // namespace

TEST_CASE("constant strategy always answers with its table") {
  auto s = constant_strategy(tbl(1, 1, 1, 1));
  History empty;
  for (int k = 0; k < 10; ++k) {
    auto t = s->respond(k, empty);
    CHECK(t == tbl(1, 1, 1, 1));
    CHECK(equality_count(t) == 4);
  }
  CHECK(s->memoryless());
}

TEST_CASE("constant strategy reaches the deterministic Bell value -2") {
  BellEstimate est = run_lhv(constant_strategy(tbl(1, 1, 1, 1)), 1000, 5);
  CHECK(est.value == -2.0);
}

TEST_CASE("iid-random rejects invalid weights") {
  std::array<double, 16> w{};
  w[0] = 0.5;  // sums to 0.5
  CHECK_THROWS_AS(iid_random_strategy(w, 1), std::invalid_argument);
  w[0] = 1.5;
  w[1] = -0.5;
  CHECK_THROWS_AS(iid_random_strategy(w, 1), std::invalid_argument);
}

TEST_CASE("iid-random with uniform weights hits each table ~1/16") {
  std::array<double, 16> w;
  w.fill(1.0 / 16.0);
  auto s = iid_random_strategy(w, 99);
  History empty;
  int counts[16] = {};
  const int n = 160000;
  for (int k = 0; k < n; ++k) ++counts[s->respond(k, empty).index()];
  // 4 sigma multinomial band around n/16.
  double sigma = std::sqrt(n * (1.0 / 16.0) * (15.0 / 16.0));
  for (int c : counts) CHECK(std::abs(c - n / 16.0) < 4.0 * sigma);
}

TEST_CASE("iid-random point mass behaves as the constant strategy") {
  std::array<double, 16> w{};
  w[tbl(1, -1, -1, 1).index()] = 1.0;
  auto s = iid_random_strategy(w, 7);
  History empty;
  for (int k = 0; k < 50; ++k) CHECK(s->respond(k, empty) == tbl(1, -1, -1, 1));
}

TEST_CASE("iid-random stays under the Bell bound") {
  std::array<double, 16> w;
  w.fill(1.0 / 16.0);
  BellEstimate est = run_lhv(iid_random_strategy(w, 12), 100000, 8);
  CHECK(est.value <= 4.0 * est.stderr_value);
}

TEST_CASE("time-periodic cycles through its tables") {
  auto s = time_periodic_strategy({tbl(1, 1, 1, 1), tbl(-1, -1, -1, -1)});
  History empty;
  CHECK(s->respond(0, empty) == tbl(1, 1, 1, 1));
  CHECK(s->respond(1, empty) == tbl(-1, -1, -1, -1));
  CHECK(s->respond(2, empty) == tbl(1, 1, 1, 1));
  CHECK_THROWS_AS(time_periodic_strategy({}), std::invalid_argument);
}

TEST_CASE("alternating all-equal tables give Bell value -2") {
  BellEstimate est = run_lhv(
      time_periodic_strategy({tbl(1, 1, 1, 1), tbl(-1, -1, -1, -1)}), 100000,
      17);
  CHECK(est.value == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("periodic strategies stay under the Bell bound") {
  // Time dependence buys nothing against fresh fair coins.
  std::vector<CounterfactualTable> tables;
  auto all = all_tables();
  for (int period = 1; period <= 5; ++period) {
    tables.clear();
    for (int k = 0; k < period; ++k)
      tables.push_back(all[static_cast<std::size_t>((3 * k + 1) % 16)]);
    BellEstimate est =
        run_lhv(time_periodic_strategy(tables), 100000,
                static_cast<std::uint64_t>(100 + period));
    CHECK(est.value <= 4.0 * est.stderr_value);
  }
}

TEST_CASE("memory_adaptive with a history-blind rule equals constant") {
  auto rule = [](const History&) { return tbl(-1, 1, -1, 1); };
  auto s = memory_adaptive_strategy("blind", rule);
  History h;
  CHECK(s->respond(0, h) == tbl(-1, 1, -1, 1));
  CHECK_FALSE(s->memoryless());
}

TEST_CASE("greedy memory strategy cannot beat the Bell bound") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    BellEstimate est = run_lhv(greedy_memory_strategy(), 100000, seed);
    CHECK(est.value <= 4.0 * est.stderr_value);
  }
}

TEST_CASE("nonlocal cheat reproduces its target behavior") {
  Behavior target = quantum_behavior(AngleSet::preset_chsh());
  Strategy s = nonlocal_cheat_strategy(target, 21);
  RngStream coins(33, "harness/settings");
  History records;
  const std::int64_t n = 1000000;
  records.reserve(n);
  for (std::int64_t k = 0; k < n; ++k)
    records.push_back(run_trial(s, records, k, coins, RunMode::sequential));

  BehaviorEstimate est = estimate_behavior(records);
  for (int xi = 0; xi < 2; ++xi) {
    for (int yi = 0; yi < 2; ++yi) {
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          double p = target.raw()[xi][yi][ai][bi];
          double n_ab = static_cast<double>(est.counts.n[ai][bi]);
          double sigma = std::sqrt(p * (1.0 - p) / n_ab);
          CHECK(std::abs(est.behavior.raw()[xi][yi][ai][bi] - p) <=
                4.0 * sigma + 1e-12);
        }
      }
    }
  }

  BellEstimate bell = bell_statistic(records);
  CHECK(std::abs(bell.value - 0.4142136) <= 4.0 * bell.stderr_value);
  CHECK(records.front().strategy_class == StrategyClass::nonlocal);
}

TEST_CASE("nonlocal cheat on the uniform behavior lands near -1") {
  Strategy s = nonlocal_cheat_strategy(uniform_behavior(), 4);
  RngStream coins(5, "harness/settings");
  History records;
  for (std::int64_t k = 0; k < 100000; ++k)
    records.push_back(run_trial(s, records, k, coins, RunMode::sequential));
  BellEstimate est = bell_statistic(records);
  CHECK(std::abs(est.value - (-1.0)) <= 4.0 * est.stderr_value);
}

TEST_CASE("nonlocal cheat on the PR box reaches +1") {
  Strategy s = nonlocal_cheat_strategy(pr_box_behavior(), 6);
  RngStream coins(7, "harness/settings");
  History records;
  for (std::int64_t k = 0; k < 100000; ++k)
    records.push_back(run_trial(s, records, k, coins, RunMode::sequential));
  BellEstimate est = bell_statistic(records);
  // P(=|12) = 1 and the other three are 0, exactly, per trial.
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantum sampler is classified quantum and violates the bound") {
  Strategy s = quantum_sampler(AngleSet::preset_chsh(), 10);
  CHECK(strategy_class(s) == StrategyClass::quantum);
  CHECK(strategy_memoryless(s));
  RngStream coins(11, "harness/settings");
  History records;
  for (std::int64_t k = 0; k < 200000; ++k)
    records.push_back(run_trial(s, records, k, coins, RunMode::sequential));
  BellEstimate est = bell_statistic(records);
  CHECK(std::abs(est.value - (std::sqrt(2.0) - 1.0)) <=
        4.0 * est.stderr_value);
  CHECK(records.front().strategy_class == StrategyClass::quantum);

  // No-signalling at the sample level: X marginal is 1/2 regardless of b.
  for (int bi = 0; bi < 2; ++bi) {
    std::int64_t n_b = 0, x_plus = 0;
    for (const auto& r : records) {
      if (r.b.value() != bi + 1) continue;
      ++n_b;
      if (r.x.value() == 1) ++x_plus;
    }
    double sigma = std::sqrt(0.25 / static_cast<double>(n_b));
    CHECK(std::abs(static_cast<double>(x_plus) / n_b - 0.5) <= 4.0 * sigma);
  }
}

TEST_CASE("quantum sampler with equal angles forced to (1,1) is perfectly correlated") {
  Strategy s = quantum_sampler(AngleSet::from_degrees(30, 0, 30, 0), 13);
  auto& nl = *std::get<std::unique_ptr<NonlocalStrategy>>(s);
  History empty;
  for (int k = 0; k < 1000; ++k) {
    auto [x, y] = nl.respond(k, empty, Setting(1), Setting(1));
    CHECK(x == y);
  }
}

TEST_CASE("strategy streams are decoupled from the harness coin stream") {
  // Same setting seed, different strategy seeds: identical setting sequence.
  auto settings_for = [](std::uint64_t strategy_seed) {
    std::array<double, 16> w;
    w.fill(1.0 / 16.0);
    Strategy s = iid_random_strategy(w, strategy_seed);
    RngStream coins(123, "harness/settings");
    std::vector<int> out;
    History records;
    for (std::int64_t k = 0; k < 200; ++k) {
      auto r = run_trial(s, records, k, coins, RunMode::sequential);
      out.push_back(r.a.value() * 10 + r.b.value());
      records.push_back(r);
    }
    return out;
  };
  CHECK(settings_for(1) == settings_for(999));
}
