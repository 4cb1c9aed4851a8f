#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "actorflow/tensor.hpp"

namespace actorflow {

// Hyperparameters for the density model family. "flow" with action_dim 1
// selects the bounded monotone-spline flow (coupling layers need >= 2
// dimensions); higher dimensions use affine coupling stacks.
struct ModelConfig {
  std::string type = "gmm";  // gmm | flow | mof
  std::size_t action_dim = 2;
  std::size_t condition_dim = 0;

  // mixture (gmm, and the latent mixture of mof)
  std::size_t components = 4;
  double init_std = 1.0;
  bool fixed_std = false;
  double fixed_std_value = 0.5;
  std::vector<std::size_t> gmm_hidden = {};  // empty: one linear layer
  double init_mean_jitter = 0.01;

  // coupling flows
  std::size_t coupling_layers = 4;
  std::size_t st_hidden = 32;  // s/t nets: two fully connected layers
  double s_clamp = 3.0;
  double feature_scale = 1.0;  // applied to the pass-through half at net input

  // condition encoder (flow / mof)
  std::size_t cond_features = 16;
  std::size_t cond_hidden = 32;

  // 1-D spline flow
  std::size_t spline_bins = 32;
  double bound_lo = 0.0;
  double bound_hi = 1.0;
};

struct SampleBatch {
  Tensor actions;                 // [n, action_dim]
  std::vector<double> log_probs;  // n
};

}  // namespace actorflow
