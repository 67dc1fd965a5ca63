#include "cmosb/cmosb.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "cmosb/error.hpp"

namespace cmosb::moo {

GenomeLayout sbo_layout() { return {{4, 4, 3}, 3}; }

double decode_real(double gene, GeneRange range) {
  return std::clamp(range.lo + gene * (range.hi - range.lo), range.lo, range.hi);
}

fed::TrainingConfig decode(const Genome& genome, const DecodeOptions& options) {
  const auto layout = sbo_layout();
  if (genome.bits.size() != layout.bit_count() || genome.reals.size() != layout.real_count)
    throw ParameterError("decode: genome does not match the SBO layout");
  fed::TrainingConfig c;
  c.federated_rounds = 1 + static_cast<int>(field_value(genome, layout, 0));
  c.local_rounds = 1 + static_cast<int>(field_value(genome, layout, 1));
  c.max_depth = 1 + static_cast<int>(field_value(genome, layout, 2));
  c.subsample = decode_real(genome.reals[0], kSubsampleRange);
  c.purity_threshold =
      decode_real(genome.reals[1], options.binary_campaign ? kBinaryPurityRange : kPurityRange);
  c.learning_rate = decode_real(genome.reals[2], kLearningRateRange);
  c.complete_secure = options.complete_secure;
  c.purity_defense = true;
  return c;
}

SboProblem::SboProblem(std::shared_ptr<objectives::SolutionEvaluator> evaluator,
                       DecodeOptions options, std::size_t workers)
    : evaluator_(std::move(evaluator)), options_(options), workers_(std::max<std::size_t>(1, workers)) {
  if (!evaluator_) throw ParameterError("sbo problem: no evaluator");
}

std::vector<Objectives> SboProblem::evaluate(std::span<const Genome> genomes) {
  std::vector<fed::TrainingConfig> configs;
  configs.reserve(genomes.size());
  for (const auto& g : genomes) configs.push_back(decode(g, options_));
  std::vector<Objectives> out(genomes.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto v = evaluator_->evaluate(configs[i]).objectives.values();
      out[i].assign(v.begin(), v.end());
    }
  };
  const std::size_t n = std::min(workers_, configs.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
  }
  return out;
}

std::vector<Baseline> baselines() {
  const auto make = [](int n_f, int d, double eta) {
    fed::TrainingConfig c;
    c.federated_rounds = n_f;
    c.local_rounds = 0;
    c.max_depth = d;
    c.learning_rate = eta;
    c.subsample = 0.8;
    c.purity_threshold = 1.0;
    c.purity_defense = false;
    c.complete_secure = true;
    return c;
  };
  return {{"Fate", make(5, 3, 0.3)}, {"Emperical", make(10, 5, 0.3)}, {"VF2Boost", make(20, 7, 0.1)}};
}

}  // namespace cmosb::moo
