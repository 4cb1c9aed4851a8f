#pragma once

#include <optional>
#include <vector>

#include "actorflow/flow.hpp"
#include "actorflow/gmm.hpp"
#include "actorflow/model_config.hpp"

namespace actorflow {

// Mixture of flows: a learnable conditional Gaussian mixture in latent
// space, with each component pushed through its own coupling stack. All
// component flows share one condition encoder. Densities are the exact
// mixture, so sampled actions are scored against the full model.
struct MofModel {
  ModelConfig cfg;
  std::optional<MlpParams> encoder;
  GmmHead latent;
  std::vector<CouplingStack> flows;

  static MofModel make(const ModelConfig& cfg, Rng& rng);

  Value features(Tape& tape, Binder& bind, Value cond) const;

  // log sum_k w_k exp(log N(f_k^{-1}(x); mu_k, sigma_k^2) + log_det_k^{-1})
  Value log_prob(Tape& tape, Binder& bind, Value cond, Value x) const;

  SampleBatch sample(Rng& rng, const std::vector<double>& condition,
                     std::size_t n) const;

  Value entropy_term(Tape& tape, Binder& bind, const Tensor& conditions,
                     std::size_t samples_per_state, Rng& rng) const;

  std::vector<Tensor*> parameters();
};

}  // namespace actorflow
