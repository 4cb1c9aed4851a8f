#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "actorflow/rng.hpp"

namespace actorflow {

struct CemConfig {
  std::size_t population = 100;
  double elite_fraction = 0.1;
  std::size_t iterations = 3;
  std::vector<double> init_mean;
  std::vector<double> init_std;
  std::vector<double> bound_lo;  // empty disables clipping
  std::vector<double> bound_hi;
  double std_floor = 1e-3;
  bool clip_samples = true;

  std::size_t dim() const { return init_mean.size(); }
  std::size_t elite_count() const {
    return static_cast<std::size_t>(
        std::llround(elite_fraction * static_cast<double>(population)));
  }
  void validate() const;
};

struct CemIteration {
  std::vector<double> mean;  // Gaussian after refit on this iteration's elites
  std::vector<double> std;
  double best_score = 0.0;   // best seen so far, including this iteration
  std::vector<double> best_action;
};

struct CemResult {
  std::vector<double> best_action;
  double best_score = 0.0;
  std::vector<CemIteration> trace;
  std::size_t score_evaluations = 0;
};

// Batch score function: one call per iteration over the whole population.
using ScoreFn =
    std::function<std::vector<double>(const std::vector<std::vector<double>>&)>;

// Iteratively samples a diagonal Gaussian, scores the population, refits
// mean/std on the top elite fraction (std floored) and returns the best
// action seen across all iterations.
CemResult cem_optimize(const ScoreFn& score, const CemConfig& cfg, Rng& rng);

using PredicateFn = std::function<bool(const std::vector<double>&)>;

// Runs CEM until any population sample satisfies the predicate; returns the
// 1-based iteration index, or nullopt if max_iterations pass without one.
std::optional<std::size_t> cem_until_success(const ScoreFn& score,
                                             const PredicateFn& predicate,
                                             const CemConfig& cfg,
                                             std::size_t max_iterations,
                                             Rng& rng);

}  // namespace actorflow
