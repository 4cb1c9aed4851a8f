#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "actorflow/adam.hpp"
#include "actorflow/cem.hpp"
#include "actorflow/density_model.hpp"
#include "actorflow/rng.hpp"

namespace actorflow {

inline constexpr std::size_t kHypersphereTargets = 10;

// Oracle task: 10 target points in the unit hypercube with success spheres
// of the given radius around them.
struct HypersphereTask {
  std::size_t dim = 1;
  double radius = 0.1;
  std::vector<std::vector<double>> targets;  // kHypersphereTargets x dim
};

HypersphereTask make_hypersphere_task(std::size_t dim, double radius,
                                      Rng& rng);

double nearest_target_distance(const HypersphereTask& task,
                               const std::vector<double>& x);

// f(x) = exp(-d(x)^2 / (2 r^2)) with d the distance to the nearest target
double oracle_value(const HypersphereTask& task, const std::vector<double>& x);

// d(x) <= r
bool hypersphere_success(const HypersphereTask& task,
                         const std::vector<double>& x);

// flattened targets, the actor's condition vector (10 * dim wide)
std::vector<double> hypersphere_condition(const HypersphereTask& task);

// uniform draw inside the sphere around a random target
std::vector<double> sample_successful_point(const HypersphereTask& task,
                                            Rng& rng);

struct ScalingConfig {
  std::vector<std::size_t> dims = {1, 2, 3, 4, 5, 6};
  std::vector<double> radii = {0.1, 0.03};
  std::size_t repeats = 100;
  std::size_t population = 100;
  double elite_fraction = 0.1;
  std::size_t max_iterations = 50;
  double init_mean = 0.5;
  double init_std = 0.5;
  double std_floor = 1e-3;
  bool clip_samples = true;
};

struct ScalingCell {
  std::size_t dim = 0;
  double radius = 0.0;
  std::vector<int> iterations;  // -1 marks a failure to find a success
  int min_iterations = 0;
  double median_iterations = 0.0;  // failures counted as max_iterations
  int max_iterations = 0;
  std::size_t failures = 0;
};

// Per-(D, r) distributions of CEM iterations to the first successful
// sample, over `repeats` fresh tasks. Deterministic under the master seed.
std::vector<ScalingCell> run_scaling_experiment(const ScalingConfig& cfg,
                                                std::uint64_t master_seed);

CemConfig scaling_cem_config(const ScalingConfig& cfg, std::size_t dim);

struct HypersphereActorConfig {
  std::size_t dim = 2;
  double radius = 0.1;
  ModelConfig model;  // defaulted by default_hypersphere_model
  std::size_t train_steps = 3000;
  std::size_t batch_size = 128;
  AdamConfig adam;
  std::size_t eval_tasks = 100;
  std::size_t samples_per_trial = 100;
};

ModelConfig default_hypersphere_model(std::size_t dim);

struct HypersphereActorResult {
  double success_rate = 0.0;           // trained actor, 1 iteration of samples
  double gaussian_baseline_rate = 0.0; // untrained N(0, I) samples
};

// Trains an actor on (flattened targets -> successful points) pairs and
// evaluates one-iteration success on fresh tasks.
HypersphereActorResult train_and_eval_hypersphere_actor(
    const HypersphereActorConfig& cfg, std::uint64_t seed,
    DensityModel* trained_out = nullptr);

// Fraction of tasks where any of the sampled actions succeeds.
double actor_one_iteration_success(const DensityModel& actor,
                                   std::size_t dim, double radius,
                                   std::size_t tasks,
                                   std::size_t samples_per_trial,
                                   std::uint64_t seed);

}  // namespace actorflow
