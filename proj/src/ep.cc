#include "lfc/ep.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace lfc {

void EpConfig::Validate() const {
  if (population_size < 2) throw ValidationError("ep: population_size must be >= 2");
  if (generations < 0) throw ValidationError("ep: generations must be >= 0");
  if (tournament_q < 1) throw ValidationError("ep: tournament_q must be >= 1");
  if (!(f_min < f_max)) throw ValidationError("ep: f_min must be < f_max");
  if (!(mutation_scale >= 0.0)) {
    throw ValidationError("ep: mutation_scale must be >= 0");
  }
  if (!(mutation_floor >= 0.0 && mutation_floor <= 1.0)) {
    throw ValidationError("ep: mutation_floor must lie in [0, 1]");
  }
  if (!(penalty > 0.0)) throw ValidationError("ep: penalty must be > 0");
  if (threads < 1) throw ValidationError("ep: threads must be >= 1");
}

namespace {

// Fitness calls are independent, so any split over workers gives the same
// numbers.
void Evaluate(std::vector<Individual>& batch, const FitnessFn& fitness,
              int threads) {
  const int n = static_cast<int>(batch.size());
  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (Individual& ind : batch) ind.fitness = fitness(ind.genes);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        batch[i].fitness = fitness(batch[i].genes);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

int BestIndex(const std::vector<Individual>& pool) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(pool.size()); ++i) {
    if (pool[i].fitness < pool[best].fitness) best = i;
  }
  return best;
}

}  // namespace

std::vector<Individual> Initialize(const EpConfig& config, int dimension,
                                   const FitnessFn& fitness, EpRng& rng) {
  config.Validate();
  if (dimension < 1) throw ValidationError("ep: dimension must be >= 1");
  std::uniform_real_distribution<double> gene(config.f_min, config.f_max);
  const double sigma = config.mutation_scale * (config.f_max - config.f_min);
  std::vector<Individual> population(config.population_size);
  for (Individual& ind : population) {
    ind.genes.resize(dimension);
    for (int i = 0; i < dimension; ++i) ind.genes(i) = gene(rng);
    ind.sigmas = VectorXd::Constant(dimension, sigma);
  }
  Evaluate(population, fitness, config.threads);
  return population;
}

PopulationStats Statistics(const std::vector<Individual>& population) {
  if (population.empty()) throw ValidationError("ep: empty population");
  PopulationStats s;
  s.best = s.worst = population.front().fitness;
  double sum = 0.0;
  for (const Individual& ind : population) {
    s.best = std::min(s.best, ind.fitness);
    s.worst = std::max(s.worst, ind.fitness);
    sum += ind.fitness;
  }
  s.mean = sum / static_cast<double>(population.size());
  return s;
}

Individual MutateGenes(const Individual& parent, const PopulationStats& stats,
                       const EpConfig& config, EpRng& rng) {
  // Fitness normalized over the population range: the current best moves
  // least, the worst at full sigma. The floor keeps the leader searching.
  const double span = stats.worst - stats.best;
  double ratio = span > 0.0 ? (parent.fitness - stats.best) / span : 1.0;
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) ratio = 1.0;
  ratio = std::clamp(ratio, config.mutation_floor, 1.0);
  const double factor = std::sqrt(ratio);

  Individual child = parent;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < child.genes.size(); ++i) {
    // Always draw, so the stream position depends only on the gene count.
    const double z = normal(rng);
    const double step = parent.sigmas(i) * factor * z;
    child.genes(i) = std::clamp(parent.genes(i) + step, config.f_min, config.f_max);
  }
  return child;
}

Individual Mutate(const Individual& parent, const PopulationStats& stats,
                  const EpConfig& config, const FitnessFn& fitness, EpRng& rng) {
  Individual child = MutateGenes(parent, stats, config, rng);
  child.fitness = fitness(child.genes);
  return child;
}

std::vector<int> TournamentSelect(const std::vector<Individual>& pool,
                                  const EpConfig& config, EpRng& rng) {
  const int size = static_cast<int>(pool.size());
  const int keep = config.population_size;
  if (size < keep) throw ValidationError("ep: pool smaller than population");

  std::vector<int> wins(size, 0);
  const bool all_pairs = config.tournament_q >= size - 1;
  std::uniform_int_distribution<int> pick(0, size - 2);
  for (int i = 0; i < size; ++i) {
    if (all_pairs) {
      for (int j = 0; j < size; ++j) {
        if (j != i && pool[i].fitness <= pool[j].fitness) ++wins[i];
      }
      continue;
    }
    for (int k = 0; k < config.tournament_q; ++k) {
      int j = pick(rng);
      if (j >= i) ++j;  // skip self
      if (pool[i].fitness <= pool[j].fitness) ++wins[i];
    }
  }

  std::vector<int> order(size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (wins[a] != wins[b]) return wins[a] > wins[b];
    if (pool[a].fitness != pool[b].fitness) return pool[a].fitness < pool[b].fitness;
    return a < b;
  });
  order.resize(keep);

  const int best = BestIndex(pool);
  if (std::find(order.begin(), order.end(), best) == order.end()) {
    order.back() = best;
  }
  return order;
}

EpResult RunEp(int dimension, const FitnessFn& fitness, const EpConfig& config) {
  config.Validate();
  EpRng rng(config.rng_seed);
  std::vector<Individual> population = Initialize(config, dimension, fitness, rng);

  EpResult result;
  result.best = population[BestIndex(population)];
  auto record = [&](int generation) {
    const PopulationStats s = Statistics(population);
    result.trace.push_back({generation, result.best.fitness, s.mean, s.worst});
  };
  record(0);

  for (int g = 1; g <= config.generations; ++g) {
    const PopulationStats stats = Statistics(population);
    std::vector<Individual> offspring;
    offspring.reserve(population.size());
    for (const Individual& parent : population) {
      offspring.push_back(MutateGenes(parent, stats, config, rng));
    }
    Evaluate(offspring, fitness, config.threads);

    std::vector<Individual> pool = population;
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    const std::vector<int> survivors = TournamentSelect(pool, config, rng);
    std::vector<Individual> next;
    next.reserve(survivors.size());
    for (int idx : survivors) next.push_back(pool[idx]);
    population = std::move(next);

    const Individual& leader = population[BestIndex(population)];
    if (leader.fitness < result.best.fitness) result.best = leader;
    record(g);
  }

  if (!(result.best.fitness < config.penalty)) {
    result.warning = "ep: no stable individual found; best fitness is the penalty";
  }
  return result;
}

EpGainResult RunEp(const PredictionForm& pred, const TransformedCost& cost,
                   const EpConfig& config) {
  const int m = static_cast<int>(pred.omega.cols());
  const int q = static_cast<int>(pred.theta.rows());
  GainCostOptions options;
  options.penalty = config.penalty;
  auto to_gain = [m, q](const VectorXd& genes) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(genes.data(), m, q)
        .eval();
  };
  const FitnessFn fitness = [&](const VectorXd& genes) {
    return GainCost(pred, cost, MatrixXd(to_gain(genes)), options);
  };

  EpResult run = RunEp(m * q, fitness, config);
  EpGainResult out;
  out.gain.f = to_gain(run.best.genes);
  out.gain.provenance = Provenance::kEp;
  out.gain.window = pred.window;
  out.gain.spectral_radius = SpectralRadius(ClosedLoop(pred, out.gain.f));
  out.cost = run.best.fitness;
  out.trace = std::move(run.trace);
  out.warning = std::move(run.warning);
  return out;
}

}  // namespace lfc
