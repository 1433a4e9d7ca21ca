#ifndef BELLSIM_STRATEGY_HPP
#define BELLSIM_STRATEGY_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "bellsim/core.hpp"
#include "bellsim/record.hpp"

// Strategy contracts and the built-in library of responders.
//
// An LhvStrategy commits a full counterfactual table per trial knowing only
// the trial index, the history and its own randomness; the current trial's
// settings are not in its signature, so locality cannot be broken by
// construction. A NonlocalStrategy sees both settings and is labelled as
// locality-violating in every report.

namespace bellsim {

class LhvStrategy {
 public:
  virtual ~LhvStrategy() = default;
  virtual std::string_view name() const = 0;
  // Required for galaxy mode, where labs share no history.
  virtual bool memoryless() const { return false; }
  virtual CounterfactualTable respond(std::int64_t trial_index,
                                      const History& history) = 0;
};

class NonlocalStrategy {
 public:
  virtual ~NonlocalStrategy() = default;
  virtual std::string_view name() const = 0;
  // Quantum samplers are still nonlocal under this contract (they cannot
  // furnish counterfactual tables) but reports label them "quantum".
  virtual StrategyClass strategy_class() const { return StrategyClass::nonlocal; }
  virtual bool memoryless() const { return false; }
  virtual std::pair<Outcome, Outcome> respond(std::int64_t trial_index,
                                              const History& history,
                                              Setting a, Setting b) = 0;
};

using Strategy =
    std::variant<std::unique_ptr<LhvStrategy>, std::unique_ptr<NonlocalStrategy>>;

// Always answers with the given table.
std::unique_ptr<LhvStrategy> constant_strategy(const CounterfactualTable& table);

// Samples a table i.i.d. from 16 weights (indexed per
// CounterfactualTable::from_index) on a private seeded stream.
std::unique_ptr<LhvStrategy> iid_random_strategy(
    const std::array<double, 16>& weights, std::uint64_t seed);

// Cycles through the given tables, trial k -> tables[k mod period].
std::unique_ptr<LhvStrategy> time_periodic_strategy(
    std::vector<CounterfactualTable> tables);

// Applies an arbitrary history-dependent rule.
std::unique_ptr<LhvStrategy> memory_adaptive_strategy(
    std::string name, std::function<CounterfactualTable(const History&)> rule);

// The shipped adversary: picks the table maximizing the expected next-trial
// Bell-statistic increment under the empirical past setting frequencies.
std::unique_ptr<LhvStrategy> greedy_memory_strategy();

// Samples (x, y) from the target behavior at the ACTUAL settings; this is
// what knowing the remote setting buys.
std::unique_ptr<NonlocalStrategy> nonlocal_cheat_strategy(const Behavior& target,
                                                          std::uint64_t seed);

// Samples from quantum_behavior(angles) at the actual settings.
std::unique_ptr<NonlocalStrategy> quantum_sampler(const AngleSet& angles,
                                                  std::uint64_t seed);

bool is_lhv(const Strategy& s);
std::string_view strategy_name(const Strategy& s);
StrategyClass strategy_class(const Strategy& s);
bool strategy_memoryless(const Strategy& s);

}  // namespace bellsim

#endif  // BELLSIM_STRATEGY_HPP
