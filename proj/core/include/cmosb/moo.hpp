#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cmosb/metrics.hpp"
#include "cmosb/random.hpp"

namespace cmosb::moo {

using Objectives = std::vector<double>;

// Mixed genome: a bit string split into unsigned fields (MSB first) followed
// by real genes normalized to [0, 1].
struct GenomeLayout {
  std::vector<int> bit_fields;
  std::size_t real_count = 0;

  std::size_t bit_count() const;
};

struct Genome {
  std::vector<std::uint8_t> bits;
  std::vector<double> reals;

  friend bool operator==(const Genome&, const Genome&) = default;
};

// Unsigned integer of bit field `field`, MSB first.
std::uint32_t field_value(const Genome& genome, const GenomeLayout& layout, std::size_t field);

Genome random_genome(const GenomeLayout& layout, Rng& rng);

// a <= b everywhere and a < b somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

// Fronts of indices into `points`, best first; each front in ascending index order.
std::vector<std::vector<std::size_t>> fast_non_dominated_sort(const std::vector<Objectives>& points);

// Crowding distance of each member of `front` (indices into `points`), in front order.
std::vector<double> crowding_distance(const std::vector<Objectives>& points,
                                      std::span<const std::size_t> front);

struct GAConfig {
  std::size_t population = 20;
  int generations = 40;
  double crossover_binary = 0.9;
  double crossover_sbx = 0.9;
  double mutation_bitflip = 0.1;  // per offspring genome
  double mutation_polynomial = 0.1;  // per real gene
  double eta_c = 2.0;
  double eta_m = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// SBX children of (x1, x2) for spread draw u in [0, 1), before clamping.
std::pair<double, double> sbx_pair(double x1, double x2, double u, double eta_c);

// Polynomial mutation of x in [0, 1] for draw u in [0, 1).
double polynomial_mutation(double x, double u, double eta_m);

// Offspring for consecutive parent pairs; count equals parents.size() (even).
std::vector<Genome> variation(std::span<const Genome> parents, const GenomeLayout& layout,
                              const GAConfig& config, Rng& rng);

// Binary tournament on (rank ascending, crowding descending); returns picks.
std::vector<std::size_t> tournament_selection(std::span<const int> rank,
                                              std::span<const double> crowding, std::size_t count,
                                              Rng& rng);

struct PenaltyTerm {
  std::size_t objective = 0;
  double bound = 0.0;  // phi
  double alpha = 0.0;
};

// eps_i + alpha_i * max(0, eps_i - phi_i) for every term; other objectives untouched.
Objectives apply_penalty(std::span<const double> raw, std::span<const PenaltyTerm> terms);

// Bounds on the SBO objectives; utility is unconstrained unless phi_u is set.
struct Constraints {
  double phi_p = 0.6;
  double phi_c = 100.0;
  double alpha_p = 20.0;
  double alpha_c = 20.0;
  bool constrain_utility = false;
  double phi_u = 1.0;
  double alpha_u = 0.0;
  bool enabled = true;

  void validate() const;
  std::vector<PenaltyTerm> terms() const;  // empty when disabled
  static Constraints none() {
    Constraints c;
    c.enabled = false;
    return c;
  }
};

objectives::ObjectiveVector apply_constraint_penalty(const objectives::ObjectiveVector& raw,
                                                     const Constraints& constraints);

// Exact Lebesgue measure dominated by `points` and bounded by `reference`,
// by recursive slicing. Points not strictly better than `reference` in every
// objective contribute nothing; `clipped` counts those lying beyond it.
double hypervolume(const std::vector<Objectives>& points, std::span<const double> reference,
                   std::size_t* clipped = nullptr);

// Non-dominated members of `points` (indices, ascending).
std::vector<std::size_t> pareto_front(const std::vector<Objectives>& points);

// Hypervolume of the non-dominated subset after dividing objective i by scale[i];
// the reference point becomes reference[i] / scale[i].
double normalized_hypervolume(const std::vector<Objectives>& points, std::span<const double> reference,
                              std::span<const double> scale, std::size_t* clipped = nullptr);

class Problem {
 public:
  virtual ~Problem() = default;
  virtual GenomeLayout layout() const = 0;
  virtual std::size_t objective_count() const = 0;
  // Raw objectives of each genome, in input order.
  virtual std::vector<Objectives> evaluate(std::span<const Genome> genomes) = 0;
};

struct Solution {
  Genome genome;
  Objectives raw;
  Objectives penalized;
  int rank = 0;
  double crowding = 0.0;
};

struct ArchiveEntry {
  int generation = 0;
  Genome genome;
  Objectives raw;
};

struct HypervolumeSettings {
  Objectives reference;  // z
  Objectives scale;      // empty: divide by z
};

struct RunResult {
  std::vector<Solution> population;      // final survivors
  std::vector<std::size_t> front;        // rank-0 members of `population`
  std::vector<ArchiveEntry> archive;     // every evaluation, raw
  std::vector<double> hypervolume_trace;  // archive front, generations 0..T
  std::size_t clipped_points = 0;        // archive points beyond z in the last trace entry
};

// Archive entries of generations <= `generation`.
std::vector<Objectives> archive_objectives(std::span<const ArchiveEntry> archive, int generation);

// Constrained NSGA-II: penalized objectives drive survival and selection,
// the archive and reported front keep raw values.
RunResult cmosb_run(const GAConfig& config, std::span<const PenaltyTerm> penalties, Problem& problem,
                    const HypervolumeSettings& hv);

}  // namespace cmosb::moo
