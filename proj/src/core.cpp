#include "bellsim/core.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace bellsim {

int CounterfactualTable::index() const {
  int idx = 0;
  if (x1.value() == 1) idx |= 8;
  if (x2.value() == 1) idx |= 4;
  if (y1.value() == 1) idx |= 2;
  if (y2.value() == 1) idx |= 1;
  return idx;
}

CounterfactualTable CounterfactualTable::from_index(int idx) {
  if (idx < 0 || idx > 15)
    throw std::invalid_argument("table index out of range: " +
                                std::to_string(idx));
  auto bit = [idx](int mask) { return Outcome((idx & mask) ? 1 : -1); };
  return CounterfactualTable{bit(8), bit(4), bit(2), bit(1)};
}

std::array<CounterfactualTable, 16> all_tables() {
  return []<std::size_t... I>(std::index_sequence<I...>) {
    return std::array<CounterfactualTable, 16>{
        CounterfactualTable::from_index(static_cast<int>(I))...};
  }(std::make_index_sequence<16>{});
}

AngleSet AngleSet::from_degrees(double a1, double a2, double b1, double b2) {
  constexpr double rad = std::numbers::pi / 180.0;
  AngleSet s{a1 * rad, a2 * rad, b1 * rad, b2 * rad};
  for (double v : {s.a1, s.a2, s.b1, s.b2})
    if (!std::isfinite(v)) throw std::invalid_argument("angle not finite");
  return s;
}

AngleSet AngleSet::preset_chsh() {
  return from_degrees(0.0, 135.0, 67.5, 22.5);
}

Behavior::Behavior(const Table& p) : p_(p) {
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      double sum = 0.0;
      for (int xi = 0; xi < 2; ++xi) {
        for (int yi = 0; yi < 2; ++yi) {
          double v = p_[xi][yi][ai][bi];
          if (!std::isfinite(v) || v < -kEntryTol || v > 1.0 + kEntryTol)
            throw std::invalid_argument(
                "behavior entry out of [0,1]: p(" + std::to_string(2 * xi - 1) +
                "," + std::to_string(2 * yi - 1) + "|" + std::to_string(ai + 1) +
                "," + std::to_string(bi + 1) + ") = " + std::to_string(v));
          sum += v;
        }
      }
      if (std::abs(sum - 1.0) > kNormTol)
        throw std::invalid_argument(
            "behavior context (" + std::to_string(ai + 1) + "," +
            std::to_string(bi + 1) + ") sums to " + std::to_string(sum));
    }
  }
}

double Behavior::p_equal(Setting a, Setting b) const {
  return p(Outcome(1), Outcome(1), a, b) + p(Outcome(-1), Outcome(-1), a, b);
}

int equality_count(const CounterfactualTable& t) {
  int n = 0;
  n += t.x1 == t.y1;
  n += t.x2 == t.y1;
  n += t.x2 == t.y2;
  n += t.x1 == t.y2;
  return n;
}

int delta(const CounterfactualTable& t) {
  return (t.x1 == t.y2) - (t.x1 == t.y1) - (t.x2 == t.y1) - (t.x2 == t.y2);
}

std::pair<Outcome, Outcome> select_outcomes(const CounterfactualTable& t,
                                            Setting a, Setting b) {
  return {t.x(a), t.y(b)};
}

double bell_lhs(const Behavior& b) {
  const Setting s1(1), s2(2);
  return b.p_equal(s1, s2) - b.p_equal(s1, s1) - b.p_equal(s2, s1) -
         b.p_equal(s2, s2);
}

Behavior quantum_behavior(const AngleSet& angles) {
  Behavior::Table p{};
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      double c = std::cos(2.0 * (angles.alpha(Setting(ai + 1)) -
                                 angles.beta(Setting(bi + 1))));
      for (int xi = 0; xi < 2; ++xi) {
        for (int yi = 0; yi < 2; ++yi) {
          int x = 2 * xi - 1, y = 2 * yi - 1;
          p[xi][yi][ai][bi] = 0.25 * (1.0 + x * y * c);
        }
      }
    }
  }
  return Behavior(p);
}

Behavior uniform_behavior() {
  Behavior::Table p{};
  for (auto& px : p)
    for (auto& py : px)
      for (auto& pa : py) pa = {0.25, 0.25};
  return Behavior(p);
}

Behavior pr_box_behavior() {
  Behavior::Table p{};
  for (int ai = 0; ai < 2; ++ai) {
    for (int bi = 0; bi < 2; ++bi) {
      int want = (ai == 0 && bi == 1) ? 1 : -1;
      for (int xi = 0; xi < 2; ++xi) {
        for (int yi = 0; yi < 2; ++yi) {
          int x = 2 * xi - 1, y = 2 * yi - 1;
          p[xi][yi][ai][bi] = (x * y == want) ? 0.5 : 0.0;
        }
      }
    }
  }
  return Behavior(p);
}

Behavior mix_behaviors(const Behavior& b1, const Behavior& b2, double v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument("mixture weight must be in [0,1]");
  Behavior::Table p{};
  for (int xi = 0; xi < 2; ++xi)
    for (int yi = 0; yi < 2; ++yi)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          p[xi][yi][ai][bi] = v * b1.raw()[xi][yi][ai][bi] +
                              (1.0 - v) * b2.raw()[xi][yi][ai][bi];
  return Behavior(p);
}

bool no_signalling_check(const Behavior& b, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (int v = 0; v < 2; ++v) {
    Outcome o(2 * v - 1);
    for (int s = 1; s <= 2; ++s) {
      // X marginal must not depend on b.
      double mx1 = b.p(o, Outcome(1), Setting(s), Setting(1)) +
                   b.p(o, Outcome(-1), Setting(s), Setting(1));
      double mx2 = b.p(o, Outcome(1), Setting(s), Setting(2)) +
                   b.p(o, Outcome(-1), Setting(s), Setting(2));
      if (std::abs(mx1 - mx2) > tol) return false;
      // Y marginal must not depend on a.
      double my1 = b.p(Outcome(1), o, Setting(1), Setting(s)) +
                   b.p(Outcome(-1), o, Setting(1), Setting(s));
      double my2 = b.p(Outcome(1), o, Setting(2), Setting(s)) +
                   b.p(Outcome(-1), o, Setting(2), Setting(s));
      if (std::abs(my1 - my2) > tol) return false;
    }
  }
  return true;
}

}  // namespace bellsim
