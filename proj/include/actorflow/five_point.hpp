#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "actorflow/adam.hpp"
#include "actorflow/density_model.hpp"
#include "actorflow/rng.hpp"

namespace actorflow {

inline constexpr double kFivePointSquare = 10.0;
inline constexpr double kFivePointStd = 0.5;

// Five random points in a 10x10 square; their coordinates are the
// observation and the ground-truth action density is an equal-weight
// mixture of isotropic Gaussians at p_1-p_0 .. p_4-p_0 with std 0.5.
struct FivePointTask {
  std::array<std::array<double, 2>, 5> points;
};

FivePointTask make_five_point_task(Rng& rng);

double five_point_ground_truth_log_prob(const FivePointTask& task,
                                        const std::array<double, 2>& a);

std::array<double, 2> five_point_ground_truth_sample(const FivePointTask& task,
                                                     Rng& rng);

// observation: the 10 coordinates scaled into [0, 1]
std::vector<double> five_point_condition(const FivePointTask& task);

// Architectures follow the toy setup: one linear layer for the mixture
// head, 4 coupling layers with two fully connected s/t layers for flows.
ModelConfig default_five_point_model(const std::string& type, double init_std);

struct FivePointTrainConfig {
  ModelConfig model;
  std::size_t train_steps = 4000;
  std::size_t batch_size = 128;
  AdamConfig adam;
  std::size_t eval_tasks = 10;
  std::size_t eval_samples_per_task = 10000;
};

struct FivePointResult {
  double held_out_log_lik = 0.0;     // mean log pi on fresh ground-truth draws
  double ground_truth_log_lik = 0.0; // same draws under the ground truth
};

FivePointResult run_five_point_training(const FivePointTrainConfig& cfg,
                                        std::uint64_t seed,
                                        DensityModel* trained_out = nullptr);

struct DensityGrid {
  std::size_t resolution = 0;
  double lo = 0.0, hi = 0.0;          // both axes
  std::vector<double> log_density;    // row-major resolution x resolution
};

DensityGrid five_point_density_grid(const DensityModel& model,
                                    const FivePointTask& task,
                                    std::size_t resolution);
DensityGrid five_point_ground_truth_grid(const FivePointTask& task,
                                         std::size_t resolution);

}  // namespace actorflow
