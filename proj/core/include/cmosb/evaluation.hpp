#pragma once

#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "cmosb/metrics.hpp"
#include "cmosb/sbo.hpp"

namespace cmosb::objectives {

// Stable 64-bit digest of the decoded hyperparameters.
std::uint64_t config_hash(const fed::TrainingConfig& config);

// Seed of one evaluation: experiment seed mixed with the config digest.
std::uint64_t evaluation_seed(std::uint64_t experiment_seed, const fed::TrainingConfig& config);

struct Evaluation {
  ObjectiveVector objectives;
  bool feasible = true;  // false: training failed, objectives are the upper bounds
  std::string error;
};

// One SBO run at the derived seed. Failures map to (1, z_cost, 1).
Evaluation evaluate_solution(const fed::TrainingConfig& config, const fed::TrainingContext& ctx,
                             std::uint64_t experiment_seed, double z_cost);

// Memoizing evaluator shared by concurrent workers. Each distinct config is
// trained exactly once; concurrent requests for the same config wait on the
// first one.
class SolutionEvaluator {
 public:
  SolutionEvaluator(std::shared_ptr<const fed::TrainingContext> ctx, std::uint64_t experiment_seed,
                    double z_cost);

  Evaluation evaluate(const fed::TrainingConfig& config);

  std::size_t evaluations() const;  // distinct trainings started
  std::size_t requests() const;
  const fed::TrainingContext& context() const { return *ctx_; }
  std::uint64_t experiment_seed() const { return seed_; }
  double z_cost() const { return z_cost_; }

 private:
  using Key = std::tuple<int, int, int, double, double, double, bool, bool>;
  static Key key_of(const fed::TrainingConfig& c);

  std::shared_ptr<const fed::TrainingContext> ctx_;
  std::uint64_t seed_;
  double z_cost_;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_future<Evaluation>> cache_;
  std::size_t requests_ = 0;
};

}  // namespace cmosb::objectives
