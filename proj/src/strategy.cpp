#include "bellsim/strategy.hpp"

#include <cmath>
#include <numeric>

#include "bellsim/rng.hpp"

namespace bellsim {

namespace {

class ConstantStrategy final : public LhvStrategy {
 public:
  explicit ConstantStrategy(const CounterfactualTable& t) : table_(t) {}
  std::string_view name() const override { return "constant"; }
  bool memoryless() const override { return true; }
  CounterfactualTable respond(std::int64_t, const History&) override {
    return table_;
  }

 private:
  CounterfactualTable table_;
};

class IidRandomStrategy final : public LhvStrategy {
 public:
  IidRandomStrategy(const std::array<double, 16>& weights, std::uint64_t seed)
      : weights_(weights), rng_(seed, "strategy/iid-random") {
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0))
        throw std::invalid_argument("iid-random weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kNormTol)
      throw std::invalid_argument("iid-random weights must sum to 1, got " +
                                  std::to_string(sum));
  }
  std::string_view name() const override { return "iid-random"; }
  bool memoryless() const override { return true; }
  CounterfactualTable respond(std::int64_t, const History&) override {
    return CounterfactualTable::from_index(
        static_cast<int>(rng_.sample_discrete(weights_)));
  }

 private:
  std::array<double, 16> weights_;
  RngStream rng_;
};

class TimePeriodicStrategy final : public LhvStrategy {
 public:
  explicit TimePeriodicStrategy(std::vector<CounterfactualTable> tables)
      : tables_(std::move(tables)) {
    if (tables_.empty())
      throw std::invalid_argument("time-periodic needs at least one table");
  }
  std::string_view name() const override { return "time-periodic"; }
  bool memoryless() const override { return true; }
  CounterfactualTable respond(std::int64_t trial_index,
                              const History&) override {
    return tables_[static_cast<std::size_t>(trial_index) % tables_.size()];
  }

 private:
  std::vector<CounterfactualTable> tables_;
};

class MemoryAdaptiveStrategy final : public LhvStrategy {
 public:
  MemoryAdaptiveStrategy(std::string name,
                         std::function<CounterfactualTable(const History&)> rule)
      : name_(std::move(name)), rule_(std::move(rule)) {}
  std::string_view name() const override { return name_; }
  CounterfactualTable respond(std::int64_t, const History& h) override {
    return rule_(h);
  }

 private:
  std::string name_;
  std::function<CounterfactualTable(const History&)> rule_;
};

// Tracks empirical setting-pair frequencies incrementally and plays the
// table with the highest expected next-trial increment of S_n.
class GreedyMemoryStrategy final : public LhvStrategy {
 public:
  std::string_view name() const override { return "greedy-memory"; }
  CounterfactualTable respond(std::int64_t, const History& h) override {
    for (; seen_ < h.size(); ++seen_) {
      const TrialRecord& r = h[seen_];
      ++counts_[r.a.value() - 1][r.b.value() - 1];
    }
    // Laplace-smoothed frequencies so early trials are not degenerate.
    double n = 4.0;
    for (auto& row : counts_) n += row[0] + row[1];
    double best_score = -1e18;
    int best = 0;
    for (int idx = 0; idx < 16; ++idx) {
      auto t = CounterfactualTable::from_index(idx);
      double score = 0.0;
      for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
          double f = (counts_[ai][bi] + 1.0) / n;
          int sign = (ai == 0 && bi == 1) ? 1 : -1;
          bool eq = t.x(Setting(ai + 1)) == t.y(Setting(bi + 1));
          score += f * sign * (eq ? 1.0 : 0.0);
        }
      }
      if (score > best_score) {
        best_score = score;
        best = idx;
      }
    }
    return CounterfactualTable::from_index(best);
  }

 private:
  std::size_t seen_ = 0;
  double counts_[2][2] = {{0, 0}, {0, 0}};
};

class BehaviorSampler : public NonlocalStrategy {
 public:
  BehaviorSampler(const Behavior& target, std::uint64_t seed,
                  std::string_view stream_name)
      : target_(target), rng_(seed, stream_name) {}
  bool memoryless() const override { return true; }
  std::pair<Outcome, Outcome> respond(std::int64_t, const History&, Setting a,
                                      Setting b) override {
    // Cell order: (+1,+1), (+1,-1), (-1,+1), (-1,-1).
    const double w[4] = {
        target_.p(Outcome(1), Outcome(1), a, b),
        target_.p(Outcome(1), Outcome(-1), a, b),
        target_.p(Outcome(-1), Outcome(1), a, b),
        target_.p(Outcome(-1), Outcome(-1), a, b)};
    std::size_t cell = rng_.sample_discrete(w);
    return {Outcome(cell < 2 ? 1 : -1), Outcome(cell % 2 == 0 ? 1 : -1)};
  }

 private:
  Behavior target_;
  RngStream rng_;
};

class NonlocalCheatStrategy final : public BehaviorSampler {
 public:
  NonlocalCheatStrategy(const Behavior& target, std::uint64_t seed)
      : BehaviorSampler(target, seed, "strategy/nonlocal-cheat") {}
  std::string_view name() const override { return "nonlocal-cheat"; }
};

class QuantumSampler final : public BehaviorSampler {
 public:
  QuantumSampler(const AngleSet& angles, std::uint64_t seed)
      : BehaviorSampler(quantum_behavior(angles), seed, "strategy/quantum") {}
  std::string_view name() const override { return "quantum"; }
  StrategyClass strategy_class() const override { return StrategyClass::quantum; }
};

}  // namespace

std::unique_ptr<LhvStrategy> constant_strategy(const CounterfactualTable& table) {
  return std::make_unique<ConstantStrategy>(table);
}

std::unique_ptr<LhvStrategy> iid_random_strategy(
    const std::array<double, 16>& weights, std::uint64_t seed) {
  return std::make_unique<IidRandomStrategy>(weights, seed);
}

std::unique_ptr<LhvStrategy> time_periodic_strategy(
    std::vector<CounterfactualTable> tables) {
  return std::make_unique<TimePeriodicStrategy>(std::move(tables));
}

std::unique_ptr<LhvStrategy> memory_adaptive_strategy(
    std::string name, std::function<CounterfactualTable(const History&)> rule) {
  return std::make_unique<MemoryAdaptiveStrategy>(std::move(name),
                                                  std::move(rule));
}

std::unique_ptr<LhvStrategy> greedy_memory_strategy() {
  return std::make_unique<GreedyMemoryStrategy>();
}

std::unique_ptr<NonlocalStrategy> nonlocal_cheat_strategy(const Behavior& target,
                                                          std::uint64_t seed) {
  return std::make_unique<NonlocalCheatStrategy>(target, seed);
}

std::unique_ptr<NonlocalStrategy> quantum_sampler(const AngleSet& angles,
                                                  std::uint64_t seed) {
  return std::make_unique<QuantumSampler>(angles, seed);
}

bool is_lhv(const Strategy& s) {
  return std::holds_alternative<std::unique_ptr<LhvStrategy>>(s);
}

std::string_view strategy_name(const Strategy& s) {
  return std::visit([](const auto& p) { return p->name(); }, s);
}

StrategyClass strategy_class(const Strategy& s) {
  if (is_lhv(s)) return StrategyClass::lhv;
  return std::get<std::unique_ptr<NonlocalStrategy>>(s)->strategy_class();
}

bool strategy_memoryless(const Strategy& s) {
  return std::visit([](const auto& p) { return p->memoryless(); }, s);
}

}  // namespace bellsim
