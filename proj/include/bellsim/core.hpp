#ifndef BELLSIM_CORE_HPP
#define BELLSIM_CORE_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

// Settings, outcomes, counterfactual tables and behaviors for the 2x2x2
// Bell scenario, plus the parity / delta / Bell-functional computations.

namespace bellsim {

inline constexpr double kEntryTol = 1e-12;  // per-entry probability range
inline constexpr double kNormTol = 1e-9;    // per-context normalization

// Polarizer setting label, exactly 1 or 2.
class Setting {
 public:
  explicit Setting(int value) : value_(value) {
    if (value != 1 && value != 2)
      throw std::invalid_argument("Setting must be 1 or 2, got " +
                                  std::to_string(value));
  }
  int value() const { return value_; }
  friend bool operator==(Setting, Setting) = default;

 private:
  int value_;
};

// Measurement result, exactly -1 or +1.
class Outcome {
 public:
  explicit Outcome(int value) : value_(value) {
    if (value != -1 && value != 1)
      throw std::invalid_argument("Outcome must be -1 or +1, got " +
                                  std::to_string(value));
  }
  int value() const { return value_; }
  friend bool operator==(Outcome, Outcome) = default;

 private:
  int value_;
};

// The quadruple (X1, X2, Y1, Y2) of potential outcomes under each local
// setting. Exists independently of any actually chosen setting pair.
struct CounterfactualTable {
  Outcome x1, x2, y1, y2;

  Outcome x(Setting a) const { return a.value() == 1 ? x1 : x2; }
  Outcome y(Setting b) const { return b.value() == 1 ? y1 : y2; }

  friend bool operator==(const CounterfactualTable&,
                         const CounterfactualTable&) = default;

  // Index in 0..15, bit order (x1, x2, y1, y2), bit set means +1.
  int index() const;
  static CounterfactualTable from_index(int idx);
};

// Enumeration order for the 16 deterministic tables.
std::array<CounterfactualTable, 16> all_tables();

// Polarizer orientations in radians. CLI and config files speak degrees.
struct AngleSet {
  double a1, a2, b1, b2;

  static AngleSet from_degrees(double a1, double a2, double b1, double b2);
  // The canonical violating geometry (0, 135, 67.5, 22.5 degrees).
  static AngleSet preset_chsh();

  double alpha(Setting a) const { return a.value() == 1 ? a1 : a2; }
  double beta(Setting b) const { return b.value() == 1 ? b1 : b2; }
};

// The 16 conditional probabilities p(x,y|a,b), validated on construction:
// entries in [0,1] within kEntryTol, each context normalized within kNormTol.
class Behavior {
 public:
  // Entries indexed [xi][yi][ai][bi] with xi = (x+1)/2, ai = a-1.
  using Table = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

  explicit Behavior(const Table& p);

  double p(Outcome x, Outcome y, Setting a, Setting b) const {
    return p_[(x.value() + 1) / 2][(y.value() + 1) / 2][a.value() - 1]
             [b.value() - 1];
  }
  // Probability that X = Y in context (a, b).
  double p_equal(Setting a, Setting b) const;

  const Table& raw() const { return p_; }

 private:
  Table p_;
};

// |{(i,j) : X_i = Y_j}| over the four square edges; always 0, 2 or 4.
int equality_count(const CounterfactualTable& t);

// 1{X1=Y2} - 1{X1=Y1} - 1{X2=Y1} - 1{X2=Y2}; always 0 or -2.
int delta(const CounterfactualTable& t);

// (X_a, Y_b) read from the table. The left component depends only on a.
std::pair<Outcome, Outcome> select_outcomes(const CounterfactualTable& t,
                                            Setting a, Setting b);

// P(X=Y|12) - P(X=Y|11) - P(X=Y|21) - P(X=Y|22).
double bell_lhs(const Behavior& b);

// Photon-pair model with uniform +-1 marginals:
// p(x,y|a,b) = (1 + x*y*cos 2(alpha_a - beta_b)) / 4.
Behavior quantum_behavior(const AngleSet& angles);

// p(x,y|a,b) = 1/4 for all cells.
Behavior uniform_behavior();

// The PR-box variant aligned with the Bell functional: X = Y exactly in
// context (1,2) and never elsewhere, with uniform marginals. Saturates a
// CHSH facet at 4 while remaining no-signalling.
Behavior pr_box_behavior();

// Mixture v*b1 + (1-v)*b2.
Behavior mix_behaviors(const Behavior& b1, const Behavior& b2, double v);

// True iff both wings' outcome marginals are independent of the remote
// setting, within tol per marginal.
bool no_signalling_check(const Behavior& b, double tol);

}  // namespace bellsim

#endif  // BELLSIM_CORE_HPP
