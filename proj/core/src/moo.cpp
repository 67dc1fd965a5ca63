#include "cmosb/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cmosb/error.hpp"

namespace cmosb::moo {

std::size_t GenomeLayout::bit_count() const {
  return static_cast<std::size_t>(std::accumulate(bit_fields.begin(), bit_fields.end(), 0));
}

std::uint32_t field_value(const Genome& genome, const GenomeLayout& layout, std::size_t field) {
  std::size_t start = 0;
  for (std::size_t f = 0; f < field; ++f) start += static_cast<std::size_t>(layout.bit_fields[f]);
  std::uint32_t v = 0;
  for (int b = 0; b < layout.bit_fields[field]; ++b)
    v = (v << 1) | genome.bits[start + static_cast<std::size_t>(b)];
  return v;
}

Genome random_genome(const GenomeLayout& layout, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Genome g;
  g.bits.resize(layout.bit_count());
  for (auto& b : g.bits) b = coin(rng) ? 1 : 0;
  g.reals.resize(layout.real_count);
  for (auto& r : g.reals) r = unit(rng);
  return g;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> fast_non_dominated_sort(const std::vector<Objectives>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> counter(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(points[p], points[q]))
        dominated[p].push_back(q);
      else if (dominates(points[q], points[p]))
        ++counter[p];
    }
    if (counter[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current)
      for (std::size_t q : dominated[p])
        if (--counter[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<Objectives>& points,
                                      std::span<const std::size_t> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t m = points[front[0]].size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[front[a]][k] < points[front[b]][k];
    });
    const double lo = points[front[order.front()]][k];
    const double hi = points[front[order.back()]][k];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    if (!(hi > lo)) continue;
    for (std::size_t i = 1; i + 1 < n; ++i)
      dist[order[i]] += (points[front[order[i + 1]]][k] - points[front[order[i - 1]]][k]) / (hi - lo);
  }
  return dist;
}

void GAConfig::validate() const {
  const auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ParameterError(std::string("ga config: ") + name + " must be in [0, 1]");
  };
  if (population < 2 || population % 2 != 0)
    throw ParameterError("ga config: population must be even and at least 2");
  if (generations < 0) throw ParameterError("ga config: generations must be non-negative");
  prob(crossover_binary, "crossover_binary");
  prob(crossover_sbx, "crossover_sbx");
  prob(mutation_bitflip, "mutation_bitflip");
  prob(mutation_polynomial, "mutation_polynomial");
  if (!(eta_c >= 0.0)) throw ParameterError("ga config: eta_c must be non-negative");
  if (!(eta_m >= 0.0)) throw ParameterError("ga config: eta_m must be non-negative");
}

std::pair<double, double> sbx_pair(double x1, double x2, double u, double eta_c) {
  const double e = 1.0 / (eta_c + 1.0);
  const double beta = u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
  return {0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
          0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)};
}

double polynomial_mutation(double x, double u, double eta_m) {
  const double e = 1.0 / (eta_m + 1.0);
  const double delta = u < 0.5 ? std::pow(2.0 * u, e) - 1.0 : 1.0 - std::pow(2.0 * (1.0 - u), e);
  return std::clamp(x + delta, 0.0, 1.0);
}

std::vector<Genome> variation(std::span<const Genome> parents, const GenomeLayout& layout,
                              const GAConfig& config, Rng& rng) {
  if (parents.size() % 2 != 0) throw ParameterError("variation: parent count must be even");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t bits = layout.bit_count();
  const double bit_rate = bits == 0 ? 0.0 : 1.0 / static_cast<double>(bits);

  std::vector<Genome> out;
  out.reserve(parents.size());
  for (std::size_t i = 0; i < parents.size(); i += 2) {
    Genome a = parents[i];
    Genome b = parents[i + 1];
    if (bits >= 2 && unit(rng) < config.crossover_binary) {
      std::uniform_int_distribution<std::size_t> cut(1, bits - 1);
      const std::size_t at = cut(rng);
      for (std::size_t k = at; k < bits; ++k) std::swap(a.bits[k], b.bits[k]);
    }
    for (std::size_t k = 0; k < layout.real_count; ++k) {
      if (unit(rng) < config.crossover_sbx) {
        auto [c1, c2] = sbx_pair(a.reals[k], b.reals[k], unit(rng), config.eta_c);
        a.reals[k] = std::clamp(c1, 0.0, 1.0);
        b.reals[k] = std::clamp(c2, 0.0, 1.0);
      }
    }
    for (Genome* child : {&a, &b}) {
      if (unit(rng) < config.mutation_bitflip)
        for (auto& bit : child->bits)
          if (unit(rng) < bit_rate) bit ^= 1;
      for (auto& r : child->reals)
        if (unit(rng) < config.mutation_polynomial) r = polynomial_mutation(r, unit(rng), config.eta_m);
    }
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<std::size_t> tournament_selection(std::span<const int> rank,
                                              std::span<const double> crowding, std::size_t count,
                                              Rng& rng) {
  if (rank.empty()) throw ParameterError("tournament_selection: empty population");
  std::uniform_int_distribution<std::size_t> pick(0, rank.size() - 1);
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    const bool a_wins = rank[a] != rank[b] ? rank[a] < rank[b] : crowding[a] >= crowding[b];
    out.push_back(a_wins ? a : b);
  }
  return out;
}

Objectives apply_penalty(std::span<const double> raw, std::span<const PenaltyTerm> terms) {
  Objectives out(raw.begin(), raw.end());
  for (const auto& t : terms) out[t.objective] += t.alpha * std::max(0.0, raw[t.objective] - t.bound);
  return out;
}

void Constraints::validate() const {
  if (phi_p < 0 || phi_c < 0 || alpha_p < 0 || alpha_c < 0 || phi_u < 0 || alpha_u < 0)
    throw ParameterError("constraints: bounds and penalty coefficients must be non-negative");
}

std::vector<PenaltyTerm> Constraints::terms() const {
  using objectives::ObjectiveVector;
  if (!enabled) return {};
  std::vector<PenaltyTerm> out{{ObjectiveVector::kPrivacy, phi_p, alpha_p},
                               {ObjectiveVector::kCost, phi_c, alpha_c}};
  if (constrain_utility) out.push_back({ObjectiveVector::kUtility, phi_u, alpha_u});
  return out;
}

objectives::ObjectiveVector apply_constraint_penalty(const objectives::ObjectiveVector& raw,
                                                     const Constraints& constraints) {
  const auto v = raw.values();
  const auto terms = constraints.terms();
  return objectives::ObjectiveVector::from(apply_penalty(v, terms));
}

std::vector<Objectives> archive_objectives(std::span<const ArchiveEntry> archive, int generation) {
  std::vector<Objectives> out;
  for (const auto& e : archive)
    if (e.generation <= generation) out.push_back(e.raw);
  return out;
}

namespace {

void rank_population(std::vector<Solution>& pop) {
  std::vector<Objectives> pts;
  pts.reserve(pop.size());
  for (const auto& s : pop) pts.push_back(s.penalized);
  const auto fronts = fast_non_dominated_sort(pts);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    const auto cd = crowding_distance(pts, fronts[f]);
    for (std::size_t i = 0; i < fronts[f].size(); ++i) {
      pop[fronts[f][i]].rank = static_cast<int>(f);
      pop[fronts[f][i]].crowding = cd[i];
    }
  }
}

// Elitist truncation: whole fronts first, the splitting front by crowding.
std::vector<Solution> survive(std::vector<Solution> merged, std::size_t n) {
  rank_population(merged);
  std::vector<std::size_t> order(merged.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (merged[a].rank != merged[b].rank) return merged[a].rank < merged[b].rank;
    return merged[a].crowding > merged[b].crowding;
  });
  std::vector<Solution> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n && i < order.size(); ++i) out.push_back(std::move(merged[order[i]]));
  return out;
}

std::vector<Solution> make_solutions(std::vector<Genome> genomes, std::vector<Objectives> raw,
                                     std::span<const PenaltyTerm> penalties) {
  if (raw.size() != genomes.size()) throw ParameterError("cmosb_run: evaluator returned wrong count");
  std::vector<Solution> out(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    out[i].genome = std::move(genomes[i]);
    out[i].penalized = apply_penalty(raw[i], penalties);
    out[i].raw = std::move(raw[i]);
  }
  return out;
}

}  // namespace

RunResult cmosb_run(const GAConfig& config, std::span<const PenaltyTerm> penalties, Problem& problem,
                    const HypervolumeSettings& hv) {
  config.validate();
  const auto layout = problem.layout();
  if (hv.reference.size() != problem.objective_count())
    throw ParameterError("cmosb_run: reference point dimension mismatch");
  const Objectives scale = hv.scale.empty() ? hv.reference : hv.scale;
  Rng rng(derive_seed(config.seed, {0x6a}));
  RunResult result;

  const auto record = [&](int generation, const std::vector<Solution>& sols) {
    for (const auto& s : sols) result.archive.push_back({generation, s.genome, s.raw});
    std::size_t clipped = 0;
    result.hypervolume_trace.push_back(normalized_hypervolume(
        archive_objectives(result.archive, generation), hv.reference, scale, &clipped));
    result.clipped_points = clipped;
  };

  std::vector<Genome> init;
  for (std::size_t i = 0; i < config.population; ++i) init.push_back(random_genome(layout, rng));
  auto raw = problem.evaluate(init);
  auto pop = make_solutions(std::move(init), std::move(raw), penalties);
  rank_population(pop);
  record(0, pop);

  for (int t = 1; t <= config.generations; ++t) {
    std::vector<int> rank;
    std::vector<double> crowd;
    for (const auto& s : pop) {
      rank.push_back(s.rank);
      crowd.push_back(s.crowding);
    }
    std::vector<Genome> parents;
    for (std::size_t i : tournament_selection(rank, crowd, config.population, rng))
      parents.push_back(pop[i].genome);
    auto children = variation(parents, layout, config, rng);
    auto child_raw = problem.evaluate(children);
    auto offspring = make_solutions(std::move(children), std::move(child_raw), penalties);
    record(t, offspring);
    for (auto& s : offspring) pop.push_back(std::move(s));
    pop = survive(std::move(pop), config.population);
  }

  for (std::size_t i = 0; i < pop.size(); ++i)
    if (pop[i].rank == 0) result.front.push_back(i);
  result.population = std::move(pop);
  return result;
}

}  // namespace cmosb::moo
