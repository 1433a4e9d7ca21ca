#ifndef BELLSIM_ANALYSIS_HPP
#define BELLSIM_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellsim/core.hpp"
#include "bellsim/record.hpp"

// Turns trial logs into estimates and certificates: conditional-probability
// estimators, the Bell statistic, the supermartingale statistic with its
// exponential tail bound, and local-polytope membership with no-signalling
// screening.

namespace bellsim {

// Thrown when some setting pair never occurs in the records.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(std::vector<std::pair<int, int>> missing);
  const std::vector<std::pair<int, int>>& missing_pairs() const {
    return missing_;
  }

 private:
  std::vector<std::pair<int, int>> missing_;
};

// Thrown by local_polytope_member when the input behavior signals.
class SignallingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// LP failed in a way that is neither "feasible" nor a certified violation.
class LpNumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellCounts {
  // Indexed [a-1][b-1].
  std::array<std::array<std::int64_t, 2>, 2> n{};
  std::array<std::array<std::int64_t, 2>, 2> n_equal{};
  // Full per-cell counts, indexed [(x+1)/2][(y+1)/2][a-1][b-1].
  std::array<std::array<std::array<std::array<std::int64_t, 2>, 2>, 2>, 2>
      cells{};
  std::int64_t total() const;
};

struct BehaviorEstimate {
  Behavior behavior;
  CellCounts counts;
};

struct BellEstimate {
  double value;
  double stderr_value;
};

struct MartingaleTrajectory {
  std::vector<double> s;  // S_0 .. S_n
  double final_s;
  double t_n;    // S_n / n
  double max_s;  // max_k S_k
};

struct AzumaCertificate {
  double threshold;
  double log_bound;  // -n t^2 / 32
  double bound;      // exp(log_bound); 0 on underflow
};

struct FacetCertificate {
  std::array<int, 4> signs;  // coefficients of (E11, E12, E21, E22)
  double value;
};

// Membership certificate: either weights over the 16 deterministic tables
// reproducing the behavior, or a violated CHSH facet.
struct PolytopeVerdict {
  bool is_local;
  std::optional<std::array<double, 16>> weights;
  std::optional<FacetCertificate> facet;
};

struct RunReport {
  std::int64_t n_trials;
  RunMode mode;
  std::string strategy_name;
  StrategyClass strategy_class;
  std::uint64_t setting_seed;
  std::uint64_t strategy_seed;
  std::string config_hash;
  CellCounts counts;
  Behavior estimated;
  BellEstimate bell;
  double martingale_final_s;
  double martingale_t_n;
  double martingale_max_s;
  std::vector<AzumaCertificate> azuma;
  // Polytope screening of the estimated behavior. The tolerance is widened
  // to the sampling scale (5 sigma of the worst cell) so finite-n noise does
  // not flip verdicts.
  double polytope_tol;
  std::optional<PolytopeVerdict> polytope;
  std::string polytope_note;
};

struct AnalysisResult {
  RunReport report;
  MartingaleTrajectory trajectory;
};

// p-hat(x,y|a,b) = count / N_ab. Throws InsufficientDataError if any
// setting pair is unobserved.
BehaviorEstimate estimate_behavior(std::span<const TrialRecord> records);

// P-hat(=|12) - P-hat(=|11) - P-hat(=|21) - P-hat(=|22), with the stderr of
// four independent binomial cells.
BellEstimate bell_statistic(std::span<const TrialRecord> records);

// S_n = sum Z_k, Z_k = 4 * 1{x=y} * s(a,b), s(1,2) = +1 else -1. Under any
// LHV strategy with fresh fair coins this is a supermartingale.
MartingaleTrajectory martingale_statistic(std::span<const TrialRecord> records);

// Upper bound exp(-n t^2 / 32) on Pr{S_n >= n t} for increments in [-4, 4].
double azuma_bound(std::int64_t n, double t);
double azuma_log_bound(std::int64_t n, double t);

// Correlators E_ab = sum x*y*p(x,y|a,b), indexed [a-1][b-1].
std::array<std::array<double, 2>, 2> correlators(const Behavior& b);

// The 8 CHSH combinations +-E11 +- E12 +- E21 +- E22 with an odd number of
// minus signs; each is at most 2 on the local polytope.
std::array<FacetCertificate, 8> chsh_facets(const Behavior& b);

// Linear feasibility over the 16 deterministic tables. Requires the input
// to pass no_signalling_check at tol.
PolytopeVerdict local_polytope_member(const Behavior& b, double tol);

// Nearest no-signalling behavior preserving the correlators and the
// setting-averaged marginals. Entries clamped into [0,1] pick up an error
// mass reported via clamped_mass (0 for already-valid projections).
Behavior project_no_signalling(const Behavior& b,
                               double* clamped_mass = nullptr);

struct ReportContext {
  RunMode mode = RunMode::sequential;
  std::string strategy_name;
  StrategyClass strategy_class = StrategyClass::lhv;
  std::uint64_t setting_seed = 0;
  std::uint64_t strategy_seed = 0;
  std::string config_hash;
  std::vector<double> azuma_thresholds{0.1};
};

AnalysisResult analyze(std::span<const TrialRecord> records,
                       const ReportContext& ctx);

}  // namespace bellsim

#endif  // BELLSIM_ANALYSIS_HPP
