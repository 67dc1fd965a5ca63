#include "cmosb/evaluation.hpp"

#include <bit>
#include <exception>

#include "cmosb/error.hpp"
#include "cmosb/random.hpp"

namespace cmosb::objectives {

std::uint64_t config_hash(const fed::TrainingConfig& c) {
  std::uint64_t h = mix64(0xc0f1);
  const auto fold = [&h](std::uint64_t v) { h = mix64(h ^ mix64(v)); };
  fold(static_cast<std::uint64_t>(c.federated_rounds));
  fold(static_cast<std::uint64_t>(c.local_rounds));
  fold(static_cast<std::uint64_t>(c.max_depth));
  fold(std::bit_cast<std::uint64_t>(c.subsample));
  fold(std::bit_cast<std::uint64_t>(c.purity_threshold));
  fold(std::bit_cast<std::uint64_t>(c.learning_rate));
  fold(c.complete_secure ? 1 : 0);
  fold(c.purity_defense ? 1 : 0);
  return h;
}

std::uint64_t evaluation_seed(std::uint64_t experiment_seed, const fed::TrainingConfig& config) {
  return derive_seed(experiment_seed, {config_hash(config)});
}

Evaluation evaluate_solution(const fed::TrainingConfig& config, const fed::TrainingContext& ctx,
                             std::uint64_t experiment_seed, double z_cost) {
  Evaluation out;
  try {
    out.objectives = fed::sbo_train(config, ctx, evaluation_seed(experiment_seed, config)).objectives;
    if (!out.objectives.finite()) throw MetricError("non-finite objective");
  } catch (const std::exception& e) {
    out.objectives = {1.0, z_cost, 1.0};
    out.feasible = false;
    out.error = e.what();
  }
  return out;
}

SolutionEvaluator::SolutionEvaluator(std::shared_ptr<const fed::TrainingContext> ctx,
                                     std::uint64_t experiment_seed, double z_cost)
    : ctx_(std::move(ctx)), seed_(experiment_seed), z_cost_(z_cost) {
  if (!ctx_) throw ParameterError("evaluator: no training context");
}

SolutionEvaluator::Key SolutionEvaluator::key_of(const fed::TrainingConfig& c) {
  return {c.federated_rounds, c.local_rounds,  c.max_depth,       c.subsample,
          c.purity_threshold, c.learning_rate, c.complete_secure, c.purity_defense};
}

Evaluation SolutionEvaluator::evaluate(const fed::TrainingConfig& config) {
  std::promise<Evaluation> promise;
  std::shared_future<Evaluation> future;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    ++requests_;
    auto [it, inserted] = cache_.try_emplace(key_of(config));
    if (inserted) {
      it->second = promise.get_future().share();
      owner = true;
    }
    future = it->second;
  }
  if (owner) promise.set_value(evaluate_solution(config, *ctx_, seed_, z_cost_));
  return future.get();
}

std::size_t SolutionEvaluator::evaluations() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::size_t SolutionEvaluator::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

}  // namespace cmosb::objectives
