#include "bellsim/record.hpp"

#include <stdexcept>
#include <string>

namespace bellsim {

std::string_view to_string(RunMode m) {
  return m == RunMode::sequential ? "sequential" : "galaxy";
}

std::string_view to_string(StrategyClass c) {
  switch (c) {
    case StrategyClass::lhv: return "lhv";
    case StrategyClass::nonlocal: return "nonlocal";
    case StrategyClass::quantum: return "quantum";
  }
  throw std::logic_error("bad StrategyClass");
}

RunMode run_mode_from_string(std::string_view s) {
  if (s == "sequential") return RunMode::sequential;
  if (s == "galaxy") return RunMode::galaxy;
  throw std::invalid_argument("unknown run mode: " + std::string(s));
}

StrategyClass strategy_class_from_string(std::string_view s) {
  if (s == "lhv") return StrategyClass::lhv;
  if (s == "nonlocal") return StrategyClass::nonlocal;
  if (s == "quantum") return StrategyClass::quantum;
  throw std::invalid_argument("unknown strategy class: " + std::string(s));
}

}  // namespace bellsim
