#include "bellsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bellsim {

namespace {

std::string format_pairs(const std::vector<std::pair<int, int>>& pairs) {
  std::ostringstream os;
  os << "no records for setting pair(s):";
  for (auto [a, b] : pairs) os << " (" << a << "," << b << ")";
  return os.str();
}

// s(a,b) from the Bell functional: +1 for (1,2), -1 otherwise.
int pair_sign(Setting a, Setting b) {
  return (a.value() == 1 && b.value() == 2) ? 1 : -1;
}

}  // namespace

InsufficientDataError::InsufficientDataError(
    std::vector<std::pair<int, int>> missing)
    : std::runtime_error(format_pairs(missing)), missing_(std::move(missing)) {}

std::int64_t CellCounts::total() const {
  std::int64_t t = 0;
  for (const auto& row : n) t += row[0] + row[1];
  return t;
}

BehaviorEstimate estimate_behavior(std::span<const TrialRecord> records) {
  CellCounts c;
  for (const TrialRecord& r : records) {
    int ai = r.a.value() - 1, bi = r.b.value() - 1;
    ++c.n[ai][bi];
    if (r.x == r.y) ++c.n_equal[ai][bi];
    ++c.cells[(r.x.value() + 1) / 2][(r.y.value() + 1) / 2][ai][bi];
  }
  std::vector<std::pair<int, int>> missing;
  for (int ai = 0; ai < 2; ++ai)
    for (int bi = 0; bi < 2; ++bi)
      if (c.n[ai][bi] == 0) missing.emplace_back(ai + 1, bi + 1);
  if (!missing.empty()) throw InsufficientDataError(std::move(missing));

  Behavior::Table p{};
  for (int xi = 0; xi < 2; ++xi)
    for (int yi = 0; yi < 2; ++yi)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          p[xi][yi][ai][bi] = static_cast<double>(c.cells[xi][yi][ai][bi]) /
                              static_cast<double>(c.n[ai][bi]);
  return BehaviorEstimate{Behavior(p), c};
}

BellEstimate bell_statistic(std::span<const TrialRecord> records) {
  BehaviorEstimate est = estimate_behavior(records);
  double value = 0.0, var = 0.0;
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      double n_ab = static_cast<double>(est.counts.n[ai][bi]);
      double p_eq = static_cast<double>(est.counts.n_equal[ai][bi]) / n_ab;
      value += pair_sign(Setting(ai + 1), Setting(bi + 1)) * p_eq;
      var += p_eq * (1.0 - p_eq) / n_ab;
    }
  }
  return BellEstimate{value, std::sqrt(var)};
}

MartingaleTrajectory martingale_statistic(
    std::span<const TrialRecord> records) {
  MartingaleTrajectory traj;
  traj.s.reserve(records.size() + 1);
  traj.s.push_back(0.0);
  double s = 0.0, max_s = 0.0;
  for (const TrialRecord& r : records) {
    double z = (r.x == r.y) ? 4.0 * pair_sign(r.a, r.b) : 0.0;
    s += z;
    max_s = std::max(max_s, s);
    traj.s.push_back(s);
  }
  traj.final_s = s;
  traj.max_s = max_s;
  traj.t_n = records.empty() ? 0.0 : s / static_cast<double>(records.size());
  return traj;
}

double azuma_log_bound(std::int64_t n, double t) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  return -static_cast<double>(n) * t * t / 32.0;
}

double azuma_bound(std::int64_t n, double t) {
  return std::exp(azuma_log_bound(n, t));
}

std::array<std::array<double, 2>, 2> correlators(const Behavior& b) {
  std::array<std::array<double, 2>, 2> e{};
  for (int ai = 0; ai < 2; ++ai)
    for (int bi = 0; bi < 2; ++bi)
      for (int xi = 0; xi < 2; ++xi)
        for (int yi = 0; yi < 2; ++yi)
          e[ai][bi] += (2 * xi - 1) * (2 * yi - 1) *
                       b.raw()[xi][yi][ai][bi];
  return e;
}

std::array<FacetCertificate, 8> chsh_facets(const Behavior& b) {
  auto e = correlators(b);
  std::array<FacetCertificate, 8> out;
  std::size_t k = 0;
  for (int mask = 0; mask < 16; ++mask) {
    std::array<int, 4> signs;
    int prod = 1;
    for (int i = 0; i < 4; ++i) {
      signs[i] = (mask & (1 << i)) ? -1 : 1;
      prod *= signs[i];
    }
    if (prod != -1) continue;
    double value = signs[0] * e[0][0] + signs[1] * e[0][1] +
                   signs[2] * e[1][0] + signs[3] * e[1][1];
    out[k++] = FacetCertificate{signs, value};
  }
  return out;
}

namespace {

// Phase-I dense simplex with Bland's rule: minimize the sum of artificial
// variables subject to A w + s = b, w, s >= 0. Feasible iff the optimum
// is ~0. Tiny instance: 17 rows, 16 structural columns.
struct PhaseOneResult {
  double objective;
  std::array<double, 16> weights;
};

PhaseOneResult solve_phase_one(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const double eps = 1e-12;

  // Tableau: [A | I | b] with the reduced-cost row appended.
  Eigen::MatrixXd t(m + 1, n + m + 1);
  t.setZero();
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = b;
  // Artificial basis has cost 1; canonicalize the cost row.
  for (int j = 0; j < n; ++j) t(m, j) = -a.col(j).sum();
  t(m, n + m) = -b.sum();

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  for (int iter = 0; iter < 10000; ++iter) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        double ratio = t(i, n + m) / t(i, enter);
        if (ratio < best_ratio - eps ||
            (ratio < best_ratio + eps &&
             (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0)
      throw LpNumericalError("phase-I LP unbounded (should be impossible)");
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[leave] = enter;
  }

  PhaseOneResult res;
  res.objective = -t(m, n + m);
  res.weights.fill(0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n)
      res.weights[static_cast<std::size_t>(basis[i])] =
          std::max(0.0, t(i, n + m));
  return res;
}

}  // namespace

PolytopeVerdict local_polytope_member(const Behavior& behavior, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!no_signalling_check(behavior, tol))
    throw SignallingError("signalling behavior: marginals depend on the remote setting");

  // 16 cell constraints + normalization over the 16 deterministic tables.
  auto tables = all_tables();
  Eigen::MatrixXd a(17, 16);
  Eigen::VectorXd b(17);
  int row = 0;
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      for (int xi = 0; xi < 2; ++xi) {
        for (int yi = 0; yi < 2; ++yi) {
          for (int ti = 0; ti < 16; ++ti) {
            const auto& t = tables[static_cast<std::size_t>(ti)];
            bool hit = t.x(Setting(ai + 1)).value() == 2 * xi - 1 &&
                       t.y(Setting(bi + 1)).value() == 2 * yi - 1;
            a(row, ti) = hit ? 1.0 : 0.0;
          }
          b(row) = behavior.raw()[xi][yi][ai][bi];
          ++row;
        }
      }
    }
  }
  a.row(16).setOnes();
  b(16) = 1.0;

  PhaseOneResult res = solve_phase_one(a, b);
  if (res.objective <= tol) {
    // Renormalize and confirm the certificate reproduces the cells.
    double sum = 0.0;
    for (double w : res.weights) sum += w;
    if (sum > 0.0)
      for (double& w : res.weights) w /= sum;
    return PolytopeVerdict{true, res.weights, std::nullopt};
  }

  auto facets = chsh_facets(behavior);
  const FacetCertificate* worst = &facets[0];
  for (const auto& f : facets)
    if (f.value > worst->value) worst = &f;
  if (worst->value > 2.0 + tol)
    return PolytopeVerdict{false, std::nullopt, *worst};
  throw LpNumericalError(
      "LP infeasible (phase-I objective " + std::to_string(res.objective) +
      ") but no CHSH facet exceeds 2; numerical failure");
}

Behavior project_no_signalling(const Behavior& b, double* clamped_mass) {
  auto e = correlators(b);
  // Setting-averaged local expectations.
  double mx[2] = {}, my[2] = {};
  for (int s = 0; s < 2; ++s) {
    for (int other = 0; other < 2; ++other) {
      for (int xi = 0; xi < 2; ++xi)
        for (int yi = 0; yi < 2; ++yi) {
          mx[s] += 0.5 * (2 * xi - 1) * b.raw()[xi][yi][s][other];
          my[s] += 0.5 * (2 * yi - 1) * b.raw()[xi][yi][other][s];
        }
    }
  }
  double clamped = 0.0;
  Behavior::Table t{};
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      double sum = 0.0;
      for (int xi = 0; xi < 2; ++xi) {
        for (int yi = 0; yi < 2; ++yi) {
          int x = 2 * xi - 1, y = 2 * yi - 1;
          double p = 0.25 * (1.0 + x * mx[ai] + y * my[bi] + x * y * e[ai][bi]);
          if (p < 0.0) {
            clamped -= p;
            p = 0.0;
          }
          t[xi][yi][ai][bi] = p;
          sum += p;
        }
      }
      for (int xi = 0; xi < 2; ++xi)
        for (int yi = 0; yi < 2; ++yi) t[xi][yi][ai][bi] /= sum;
    }
  }
  if (clamped_mass) *clamped_mass = clamped;
  return Behavior(t);
}

AnalysisResult analyze(std::span<const TrialRecord> records,
                       const ReportContext& ctx) {
  BehaviorEstimate est = estimate_behavior(records);
  BellEstimate bell = bell_statistic(records);
  MartingaleTrajectory traj = martingale_statistic(records);

  RunReport rep{
      static_cast<std::int64_t>(records.size()),
      ctx.mode,
      ctx.strategy_name,
      ctx.strategy_class,
      ctx.setting_seed,
      ctx.strategy_seed,
      ctx.config_hash,
      est.counts,
      est.behavior,
      bell,
      traj.final_s,
      traj.t_n,
      traj.max_s,
      {},
      0.0,
      std::nullopt,
      ""};

  const std::int64_t n = rep.n_trials;
  for (double th : ctx.azuma_thresholds)
    rep.azuma.push_back(
        AzumaCertificate{th, azuma_log_bound(n, th), azuma_bound(n, th)});

  // Finite-n estimates signal slightly; the verdict is computed on their
  // no-signalling projection with a tolerance widened to the sampling scale.
  std::int64_t n_min = est.counts.n[0][0];
  for (const auto& r : est.counts.n)
    n_min = std::min({n_min, r[0], r[1]});
  double clamped = 0.0;
  Behavior projected = project_no_signalling(est.behavior, &clamped);
  rep.polytope_tol =
      std::max({1e-9, 5.0 * std::sqrt(0.5 / static_cast<double>(n_min)),
                10.0 * clamped});
  try {
    rep.polytope = local_polytope_member(projected, rep.polytope_tol);
    rep.polytope_note =
        rep.polytope->is_local
            ? "no-signalling projection of the estimate is local at tolerance"
            : "no-signalling projection of the estimate violates a CHSH facet";
  } catch (const SignallingError& e) {
    rep.polytope_note = std::string("skipped: ") + e.what();
  } catch (const LpNumericalError&) {
    rep.polytope_note =
        "indeterminate: estimate straddles the local boundary at tolerance";
  }
  return AnalysisResult{std::move(rep), std::move(traj)};
}

}  // namespace bellsim
