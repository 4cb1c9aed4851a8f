#pragma once

#include <vector>

#include "actorflow/model_config.hpp"
#include "actorflow/nn.hpp"
#include "actorflow/rng.hpp"
#include "actorflow/tape.hpp"

namespace actorflow {

// One-dimensional flow with bounded support [lo, hi]: a standard normal
// base is squashed through a sigmoid and then warped by a monotone
// piecewise-linear map with K equal bins whose masses come from a softmax
// head over the condition. Both directions are closed form, so sampling
// and exact log-density share the invertibility guarantees of the
// coupling stacks.
struct SplineFlowDensity {
  ModelConfig cfg;
  MlpParams slope_head;  // condition -> K bin-mass logits

  static SplineFlowDensity make(const ModelConfig& cfg, Rng& rng);

  Value log_prob(Tape& tape, Binder& bind, Value cond, Value x) const;
  SampleBatch sample(Rng& rng, const std::vector<double>& condition,
                     std::size_t n) const;
  Value entropy_term(Tape& tape, Binder& bind, const Tensor& conditions,
                     std::size_t samples_per_state, Rng& rng) const;

  // z -> x push-forward for a batch of base draws, with the log density of
  // the produced points; differentiable in the head parameters.
  struct Push {
    Value x;         // [N,1]
    Value log_prob;  // [N,1]
  };
  Push push_forward(Tape& tape, Binder& bind, Value cond,
                    const Tensor& z) const;

  // numeric x -> z (for invertibility checks)
  std::vector<double> inverse_numeric(const std::vector<double>& condition,
                                      const std::vector<double>& x) const;

  std::vector<Tensor*> parameters();
};

}  // namespace actorflow
