#ifndef BELLSIM_RECORD_HPP
#define BELLSIM_RECORD_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bellsim/core.hpp"

namespace bellsim {

enum class RunMode { sequential, galaxy };
enum class StrategyClass { lhv, nonlocal, quantum };

std::string_view to_string(RunMode m);
std::string_view to_string(StrategyClass c);
RunMode run_mode_from_string(std::string_view s);
StrategyClass strategy_class_from_string(std::string_view s);

// One trial's observed quadruple plus provenance. The table field is
// logged for LHV runs only and enables counterfactual replay.
struct TrialRecord {
  std::int64_t trial_index;
  Setting a, b;
  Outcome x, y;
  RunMode mode;
  StrategyClass strategy_class;
  std::optional<CounterfactualTable> table;
};

// All past trials, both wings visible. Memory strategies may read it;
// freedom is enforced by the harness, not by the strategy.
using History = std::vector<TrialRecord>;

}  // namespace bellsim

#endif  // BELLSIM_RECORD_HPP
