#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "cmosb/evaluation.hpp"
#include "cmosb/moo.hpp"
#include "cmosb/sbo.hpp"

namespace cmosb::moo {

struct GeneRange {
  double lo;
  double hi;
};

inline constexpr GeneRange kSubsampleRange{0.1, 1.0};
inline constexpr GeneRange kPurityRange{0.1, 1.0};
inline constexpr GeneRange kBinaryPurityRange{0.7, 1.0};
inline constexpr GeneRange kLearningRateRange{0.01, 0.3};

struct DecodeOptions {
  bool binary_campaign = false;  // p decoded into [0.7, 1.0]
  bool complete_secure = true;    // as for the baselines
};

// Bits: n_f (4), n_l (4), d (3); reals: r, p, eta.
GenomeLayout sbo_layout();

// Binary fields decode to lo + unsigned value; real genes map affinely onto
// their range and are clamped.
fed::TrainingConfig decode(const Genome& genome, const DecodeOptions& options = {});

double decode_real(double gene, GeneRange range);

// SBO hyperparameter search as an NSGA-II problem. Genomes of one batch are
// decoded, trained on `workers` threads and returned in input order.
class SboProblem final : public Problem {
 public:
  SboProblem(std::shared_ptr<objectives::SolutionEvaluator> evaluator, DecodeOptions options,
             std::size_t workers);

  GenomeLayout layout() const override { return sbo_layout(); }
  std::size_t objective_count() const override { return objectives::ObjectiveVector::kSize; }
  std::vector<Objectives> evaluate(std::span<const Genome> genomes) override;

  const DecodeOptions& options() const { return options_; }
  objectives::SolutionEvaluator& evaluator() { return *evaluator_; }

 private:
  std::shared_ptr<objectives::SolutionEvaluator> evaluator_;
  DecodeOptions options_;
  std::size_t workers_;
};

struct Baseline {
  std::string name;
  fed::TrainingConfig config;
};

// Undefended reference configurations: Fate, Emperical, VF2Boost.
std::vector<Baseline> baselines();

}  // namespace cmosb::moo
