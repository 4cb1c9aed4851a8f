#include "actorflow/cem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace actorflow {

void CemConfig::validate() const {
  if (init_mean.empty())
    throw std::invalid_argument("CemConfig: init_mean must be non-empty");
  if (init_std.size() != init_mean.size())
    throw std::invalid_argument("CemConfig: init_std size mismatch");
  for (double s : init_std)
    if (!(s > 0.0)) throw std::invalid_argument("CemConfig: init_std must be > 0");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0))
    throw std::invalid_argument("CemConfig: elite_fraction must be in (0, 1]");
  if (population < 1)
    throw std::invalid_argument("CemConfig: population must be >= 1");
  if (population > 1 && elite_count() < 2)
    throw std::invalid_argument(
        "CemConfig: population * elite_fraction must be >= 2");
  if (!bound_lo.empty() &&
      (bound_lo.size() != dim() || bound_hi.size() != dim()))
    throw std::invalid_argument("CemConfig: bound size mismatch");
  if (iterations < 1)
    throw std::invalid_argument("CemConfig: iterations must be >= 1");
}

namespace {

struct CemLoop {
  const CemConfig& cfg;
  std::vector<double> mean, std;
  std::vector<std::vector<double>> population;
  std::vector<double> scores;
  CemResult result;

  explicit CemLoop(const CemConfig& c) : cfg(c), mean(c.init_mean), std(c.init_std) {
    result.best_score = -std::numeric_limits<double>::infinity();
  }

  void sample_population(Rng& rng) {
    const std::size_t d = cfg.dim();
    population.assign(cfg.population, std::vector<double>(d));
    for (auto& x : population)
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = mean[j] + std[j] * rng.normal();
        if (cfg.clip_samples && !cfg.bound_lo.empty())
          x[j] = std::clamp(x[j], cfg.bound_lo[j], cfg.bound_hi[j]);
      }
  }

  void score_and_refit(const ScoreFn& score) {
    scores = score(population);
    if (scores.size() != population.size())
      throw std::runtime_error("cem_optimize: score count mismatch");
    result.score_evaluations += scores.size();

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores[a] > scores[b];
    });

    if (scores[order[0]] > result.best_score) {
      result.best_score = scores[order[0]];
      result.best_action = population[order[0]];
    }

    const std::size_t n_elite =
        cfg.population == 1 ? 1 : std::max<std::size_t>(cfg.elite_count(), 1);
    const std::size_t d = cfg.dim();
    std::vector<double> new_mean(d, 0.0), new_var(d, 0.0);
    for (std::size_t e = 0; e < n_elite; ++e)
      for (std::size_t j = 0; j < d; ++j)
        new_mean[j] += population[order[e]][j];
    for (double& v : new_mean) v /= static_cast<double>(n_elite);
    for (std::size_t e = 0; e < n_elite; ++e)
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = population[order[e]][j] - new_mean[j];
        new_var[j] += diff * diff;
      }
    mean = new_mean;
    for (std::size_t j = 0; j < d; ++j)
      std[j] = std::max(std::sqrt(new_var[j] / static_cast<double>(n_elite)),
                        cfg.std_floor);

    CemIteration it;
    it.mean = mean;
    it.std = std;
    it.best_score = result.best_score;
    it.best_action = result.best_action;
    result.trace.push_back(std::move(it));
  }
};

}  // namespace

CemResult cem_optimize(const ScoreFn& score, const CemConfig& cfg, Rng& rng) {
  cfg.validate();
  CemLoop loop(cfg);
  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    loop.sample_population(rng);
    loop.score_and_refit(score);
  }
  return loop.result;
}

std::optional<std::size_t> cem_until_success(const ScoreFn& score,
                                             const PredicateFn& predicate,
                                             const CemConfig& cfg,
                                             std::size_t max_iterations,
                                             Rng& rng) {
  cfg.validate();
  if (max_iterations < 1)
    throw std::invalid_argument("cem_until_success: max_iterations must be >= 1");
  CemLoop loop(cfg);
  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    loop.sample_population(rng);
    bool hit = false;
    for (const auto& x : loop.population)
      if (predicate(x)) {
        hit = true;
        break;
      }
    if (hit) return iter;
    loop.score_and_refit(score);
  }
  return std::nullopt;
}

}  // namespace actorflow
