#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bellsim/analysis.hpp"
#include "bellsim/harness.hpp"

using namespace bellsim;

namespace {

TrialRecord rec(std::int64_t k, int a, int b, int x, int y) {
  return TrialRecord{k,          Setting(a),        Setting(b),
                     Outcome(x), Outcome(y),        RunMode::sequential,
                     StrategyClass::lhv, std::nullopt};
}

// Random point of the no-signalling polytope: a convex mixture of the 16
// local deterministic vertices and the 8 PR-box variants.
Behavior random_no_signalling(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double w[24];
  for (double& v : w) v = u(gen);
  // Half the draws lean hard on one PR box so both verdicts get exercised.
  if (u(gen) < 0.5) w[16 + static_cast<int>(u(gen) * 8.0)] *= 50.0;
  double sum = 0.0;
  for (double v : w) sum += v;
  Behavior::Table t{};
  auto tables = all_tables();
  for (int i = 0; i < 16; ++i) {
    const auto& dt = tables[static_cast<std::size_t>(i)];
    for (int ai = 0; ai < 2; ++ai)
      for (int bi = 0; bi < 2; ++bi)
        t[(dt.x(Setting(ai + 1)).value() + 1) / 2]
         [(dt.y(Setting(bi + 1)).value() + 1) / 2][ai][bi] += w[i] / sum;
  }
  // PR variants: x*y = s_ab with s_ab = e_a f_b g except on (2,2) where a
  // minus sign enters; parameterized by (e1,e2,f1,f2) sign flips.
  for (int v = 0; v < 8; ++v) {
    double weight = w[16 + v] / sum;
    int ex = (v & 1) ? -1 : 1, ey = (v & 2) ? -1 : 1, g = (v & 4) ? -1 : 1;
    for (int ai = 0; ai < 2; ++ai) {
      for (int bi = 0; bi < 2; ++bi) {
        int want = g * (ai == 0 ? 1 : ex) * (bi == 0 ? 1 : ey) *
                   ((ai == 1 && bi == 1) ? -1 : 1);
        for (int xi = 0; xi < 2; ++xi)
          for (int yi = 0; yi < 2; ++yi)
            if ((2 * xi - 1) * (2 * yi - 1) == want)
              t[xi][yi][ai][bi] += 0.5 * weight;
      }
    }
  }
  return Behavior(t);
}

bool facet_rule_local(const Behavior& b, double tol) {
  for (const auto& f : chsh_facets(b))
    if (f.value > 2.0 + tol) return false;
  return true;
}

}  // namespace

TEST_CASE("estimate_behavior on a handcrafted 4-record log") {
  std::vector<TrialRecord> r{rec(0, 1, 1, 1, 1), rec(1, 1, 2, 1, 1),
                             rec(2, 2, 1, 1, 1), rec(3, 2, 2, 1, 1)};
  BehaviorEstimate est = estimate_behavior(r);
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b)
      CHECK(est.behavior.p(Outcome(1), Outcome(1), Setting(a), Setting(b)) ==
            1.0);
  CHECK(est.counts.total() == 4);
}

TEST_CASE("estimate_behavior names every missing setting pair") {
  std::vector<TrialRecord> r{rec(0, 1, 1, 1, 1)};
  try {
    estimate_behavior(r);
    FAIL("expected InsufficientDataError");
  } catch (const InsufficientDataError& e) {
    CHECK(e.missing_pairs() ==
          std::vector<std::pair<int, int>>{{1, 2}, {2, 1}, {2, 2}});
    CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
  }
}

TEST_CASE("estimate_behavior is permutation invariant") {
  std::mt19937_64 gen(5);
  Strategy s = nonlocal_cheat_strategy(quantum_behavior(AngleSet::preset_chsh()), 3);
  RngStream coins(4, "harness/settings");
  History r;
  for (std::int64_t k = 0; k < 2000; ++k)
    r.push_back(run_trial(s, r, k, coins, RunMode::sequential));
  BehaviorEstimate before = estimate_behavior(r);
  std::shuffle(r.begin(), r.end(), gen);
  BehaviorEstimate after = estimate_behavior(r);
  for (int xi = 0; xi < 2; ++xi)
    for (int yi = 0; yi < 2; ++yi)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          CHECK(before.behavior.raw()[xi][yi][ai][bi] ==
                after.behavior.raw()[xi][yi][ai][bi]);
}

TEST_CASE("bell_statistic on an 8-record hand-computed log") {
  // Two records per pair; equality only on the (1,2) pair.
  std::vector<TrialRecord> r{rec(0, 1, 2, 1, 1),  rec(1, 1, 2, -1, -1),
                             rec(2, 1, 1, 1, -1), rec(3, 1, 1, -1, 1),
                             rec(4, 2, 1, 1, -1), rec(5, 2, 1, 1, -1),
                             rec(6, 2, 2, -1, 1), rec(7, 2, 2, 1, -1)};
  BellEstimate est = bell_statistic(r);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.stderr_value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("martingale increments take the documented values") {
  auto z = [](const TrialRecord& r) {
    auto traj = martingale_statistic(std::vector<TrialRecord>{r});
    return traj.final_s;
  };
  CHECK(z(rec(0, 1, 2, 1, 1)) == 4.0);
  CHECK(z(rec(0, 1, 1, 1, 1)) == -4.0);
  CHECK(z(rec(0, 2, 2, 1, -1)) == 0.0);
}

TEST_CASE("martingale trajectory bookkeeping") {
  std::vector<TrialRecord> r{rec(0, 1, 2, 1, 1), rec(1, 1, 2, 1, 1),
                             rec(2, 1, 1, 1, 1)};
  auto traj = martingale_statistic(r);
  CHECK(traj.s == std::vector<double>{0.0, 4.0, 8.0, 4.0});
  CHECK(traj.final_s == 4.0);
  CHECK(traj.max_s == 8.0);
  CHECK(traj.t_n == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("mean martingale increment estimates bell_lhs") {
  // E[Z] = sum_ab (1/4)(+-4) P(=|ab) = bell_lhs under fair coins.
  Behavior target = quantum_behavior(AngleSet::preset_chsh());
  Strategy s = nonlocal_cheat_strategy(target, 61);
  RngStream coins(62, "harness/settings");
  History r;
  const std::int64_t n = 1000000;
  r.reserve(n);
  for (std::int64_t k = 0; k < n; ++k)
    r.push_back(run_trial(s, r, k, coins, RunMode::sequential));
  auto traj = martingale_statistic(r);
  // Var(Z) <= 16, so 4 sigma of T_n is at most 16/sqrt(n).
  CHECK(std::abs(traj.t_n - bell_lhs(target)) <= 16.0 / std::sqrt(n));
}

TEST_CASE("azuma_bound closed form") {
  CHECK(azuma_bound(1, 0.0) == 1.0);
  CHECK(azuma_bound(123456, 0.0) == 1.0);
  CHECK(azuma_bound(10000, 0.1) == doctest::Approx(std::exp(-3.125)).epsilon(1e-12));
  CHECK(azuma_bound(10000, 0.1) == doctest::Approx(0.04394).epsilon(1e-3));
  // At the quantum value the bound underflows; the log form stays finite.
  CHECK(azuma_log_bound(1000000, 0.414) ==
        doctest::Approx(-1000000 * 0.414 * 0.414 / 32.0).epsilon(1e-12));
  CHECK(azuma_bound(1000000, 0.414) == 0.0);
  CHECK_THROWS_AS(azuma_bound(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(azuma_bound(10, -0.1), std::invalid_argument);
}

TEST_CASE("chsh_facets on reference behaviors") {
  for (const auto& f : chsh_facets(uniform_behavior()))
    CHECK(f.value == doctest::Approx(0.0).epsilon(1e-12));

  auto qf = chsh_facets(quantum_behavior(AngleSet::preset_chsh()));
  double qmax = std::max_element(qf.begin(), qf.end(),
                                 [](auto& l, auto& r) { return l.value < r.value; })
                    ->value;
  CHECK(qmax == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

  auto pf = chsh_facets(pr_box_behavior());
  double pmax = std::max_element(pf.begin(), pf.end(),
                                 [](auto& l, auto& r) { return l.value < r.value; })
                    ->value;
  CHECK(pmax == doctest::Approx(4.0).epsilon(1e-12));

  // Each facet has an odd number of minus signs.
  for (const auto& f : qf) {
    int prod = f.signs[0] * f.signs[1] * f.signs[2] * f.signs[3];
    CHECK(prod == -1);
  }
}

TEST_CASE("local_polytope_member accepts the uniform behavior with a sound certificate") {
  PolytopeVerdict v = local_polytope_member(uniform_behavior(), 1e-9);
  CHECK(v.is_local);
  REQUIRE(v.weights.has_value());
  double sum = 0.0;
  auto tables = all_tables();
  Behavior::Table reproduced{};
  for (int i = 0; i < 16; ++i) {
    double w = (*v.weights)[static_cast<std::size_t>(i)];
    CHECK(w >= -1e-12);
    sum += w;
    const auto& t = tables[static_cast<std::size_t>(i)];
    for (int ai = 0; ai < 2; ++ai)
      for (int bi = 0; bi < 2; ++bi)
        reproduced[(t.x(Setting(ai + 1)).value() + 1) / 2]
                  [(t.y(Setting(bi + 1)).value() + 1) / 2][ai][bi] += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  for (int xi = 0; xi < 2; ++xi)
    for (int yi = 0; yi < 2; ++yi)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          CHECK(reproduced[xi][yi][ai][bi] ==
                doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("every deterministic table is a polytope vertex (boundary is local)") {
  auto tables = all_tables();
  for (const auto& t : tables) {
    Behavior::Table p{};
    for (int ai = 0; ai < 2; ++ai)
      for (int bi = 0; bi < 2; ++bi)
        p[(t.x(Setting(ai + 1)).value() + 1) / 2]
         [(t.y(Setting(bi + 1)).value() + 1) / 2][ai][bi] = 1.0;
    PolytopeVerdict v = local_polytope_member(Behavior(p), 1e-9);
    CHECK(v.is_local);
  }
}

TEST_CASE("quantum preset and PR box are certified nonlocal") {
  PolytopeVerdict q =
      local_polytope_member(quantum_behavior(AngleSet::preset_chsh()), 1e-9);
  CHECK_FALSE(q.is_local);
  REQUIRE(q.facet.has_value());
  CHECK(q.facet->value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

  PolytopeVerdict pr = local_polytope_member(pr_box_behavior(), 1e-9);
  CHECK_FALSE(pr.is_local);
  REQUIRE(pr.facet.has_value());
  CHECK(pr.facet->value == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("local_polytope_member rejects signalling input") {
  Behavior::Table t{};
  t[1][1][0][0] = 0.9;
  t[0][0][0][0] = 0.1;
  t[1][1][0][1] = 0.5;
  t[0][0][0][1] = 0.5;
  for (int bi = 0; bi < 2; ++bi) {
    t[1][1][1][bi] = 0.5;
    t[0][0][1][bi] = 0.5;
  }
  CHECK_THROWS_AS(local_polytope_member(Behavior(t), 1e-9), SignallingError);
}

TEST_CASE("LP verdict agrees with the facet rule on random no-signalling behaviors") {
  std::mt19937_64 gen(2024);
  int nonlocal_seen = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Behavior b = random_no_signalling(gen);
    REQUIRE(no_signalling_check(b, 1e-9));
    PolytopeVerdict v = local_polytope_member(b, 1e-9);
    CHECK(v.is_local == facet_rule_local(b, 1e-9));
    if (!v.is_local) {
      ++nonlocal_seen;
      CHECK(v.facet->value > 2.0 + 1e-9);
    }
  }
  CHECK(nonlocal_seen > 0);  // the generator must exercise both verdicts
}

TEST_CASE("white-noise mixture crosses the local boundary at 1/sqrt(2)") {
  Behavior q = quantum_behavior(AngleSet::preset_chsh());
  Behavior u = uniform_behavior();
  CHECK(local_polytope_member(mix_behaviors(q, u, 0.70), 1e-9).is_local);
  CHECK_FALSE(local_polytope_member(mix_behaviors(q, u, 0.72), 1e-9).is_local);
  CHECK(local_polytope_member(mix_behaviors(q, u, 1.0 / std::sqrt(2.0) - 1e-7),
                              1e-9)
            .is_local);
}

TEST_CASE("analyze produces a coherent report") {
  RunConfig cfg;
  cfg.n_trials = 20000;
  cfg.setting_seed = 91;
  cfg.strategy_seed = 92;
  cfg.strategy = {"quantum", {{"preset", "preset-chsh"}}};
  RunOutcome out = run_experiment(cfg);
  const RunReport& r = out.report;
  CHECK(r.n_trials == 20000);
  CHECK(r.counts.total() == 20000);
  CHECK(r.strategy_class == StrategyClass::quantum);
  CHECK(std::abs(r.bell.value - 0.4142136) <= 4.0 * r.bell.stderr_value);
  REQUIRE(r.polytope.has_value());
  CHECK_FALSE(r.polytope->is_local);
  REQUIRE(!r.azuma.empty());
  CHECK(r.azuma.front().threshold == 0.1);
}
