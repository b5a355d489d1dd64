#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lfc/ofc.h"

namespace lfc {

struct EpConfig {
  int population_size = 50;
  int generations = 300;
  double f_min = -10.0;
  double f_max = 10.0;
  int tournament_q = 10;
  double mutation_scale = 0.1;
  double mutation_floor = 1e-4;  // lower clamp on the normalized fitness
  std::uint64_t rng_seed = 42;
  double penalty = 1e12;  // J_max for unstable gains
  int threads = 1;        // fitness evaluation workers; results do not depend on it

  /// Throws ValidationError on population_size < 2, tournament_q < 1,
  /// f_min >= f_max, negative mutation_scale, etc.
  void Validate() const;
};

struct Individual {
  VectorXd genes;
  VectorXd sigmas;
  double fitness = 0.0;
};

using FitnessFn = std::function<double(const VectorXd&)>;
using EpRng = std::mt19937_64;

/// Genes uniform in [f_min, f_max]; sigmas = mutation_scale·(f_max − f_min).
std::vector<Individual> Initialize(const EpConfig& config, int dimension,
                                   const FitnessFn& fitness, EpRng& rng);

/// Population statistics that drive the mutation scale.
struct PopulationStats {
  double best = 0.0;
  double mean = 0.0;
  double worst = 0.0;
};
PopulationStats Statistics(const std::vector<Individual>& population);

/// Draws an offspring's genes without evaluating it. Each gene moves by
/// sigma_i·sqrt(φ)·N(0, 1), φ = (fitness − best)/(worst − best) clamped to
/// [mutation_floor, 1], then is clamped to the bounds. A uniform population
/// (worst == best) mutates at full sigma.
Individual MutateGenes(const Individual& parent, const PopulationStats& stats,
                       const EpConfig& config, EpRng& rng);

/// MutateGenes followed by evaluation.
Individual Mutate(const Individual& parent, const PopulationStats& stats,
                  const EpConfig& config, const FitnessFn& fitness, EpRng& rng);

/// Tournament over `pool` (parents followed by offspring). Returns the
/// pool indices of the survivors in rank order: most wins first, then
/// lower fitness, then lower index. The lowest-fitness entry always
/// survives.
std::vector<int> TournamentSelect(const std::vector<Individual>& pool,
                                  const EpConfig& config, EpRng& rng);

struct EpGeneration {
  int generation = 0;
  double best = 0.0;   // best-so-far
  double mean = 0.0;   // of the surviving population
  double worst = 0.0;
};

struct EpResult {
  Individual best;
  std::vector<EpGeneration> trace;
  std::optional<std::string> warning;
};

/// Generic driver: initialize → (mutate all → tournament) × generations.
EpResult RunEp(int dimension, const FitnessFn& fitness, const EpConfig& config);

struct EpGainResult {
  GainMatrix gain;
  double cost = 0.0;
  std::vector<EpGeneration> trace;
  std::optional<std::string> warning;
};

/// Searches u = F·w gains (m×q, genes row-major) minimizing GainCost.
EpGainResult RunEp(const PredictionForm& pred, const TransformedCost& cost,
                   const EpConfig& config);

}  // namespace lfc
