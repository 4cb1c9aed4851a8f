#pragma once

#include <optional>
#include <vector>

#include "actorflow/model_config.hpp"
#include "actorflow/nn.hpp"
#include "actorflow/rng.hpp"
#include "actorflow/tape.hpp"

namespace actorflow {

// One affine coupling transform. The pass-through half feeds the s and t
// networks (together with condition features); the other half is scaled by
// exp(s) and shifted by t. flip swaps which half passes through so that
// consecutive layers alternate.
struct CouplingLayer {
  bool flip = false;
  MlpParams s_net;
  MlpParams t_net;
};

// A stack of coupling layers over dimension D >= 2. The split index is
// ceil(D/2) for every layer. s outputs are squashed to +/- s_clamp.
struct CouplingStack {
  std::size_t dim = 2;
  std::size_t split = 1;
  double s_clamp = 3.0;
  double feature_scale = 1.0;
  std::vector<CouplingLayer> layers;

  struct Result {
    Value y;        // transformed batch [N,D]
    Value log_det;  // [N,1], of the direction applied
  };

  // feature_dim = 0 means unconditioned s/t nets.
  static CouplingStack make(std::size_t dim, std::size_t n_layers,
                            std::size_t st_hidden, std::size_t feature_dim,
                            double s_clamp, double feature_scale, Rng& rng);

  // z -> x (sampling direction); feat has width >= 0 and N rows.
  Result forward(Tape& tape, Binder& bind, Value z, Value feat) const;
  // x -> z; log_det is the inverse direction's (negative of forward's).
  Result inverse(Tape& tape, Binder& bind, Value x, Value feat) const;

  void collect_parameters(std::vector<Tensor*>& out);
};

// Conditional Real NVP-style density: coupling stack over a standard
// normal base, with an optional 2-layer condition encoder feeding every
// s/t network.
struct FlowDensity {
  ModelConfig cfg;
  std::optional<MlpParams> encoder;
  CouplingStack stack;

  static FlowDensity make(const ModelConfig& cfg, Rng& rng);

  // Condition features for a batch: encoder output, or a width-0 value
  // when the model is unconditioned.
  Value features(Tape& tape, Binder& bind, Value cond) const;

  Value log_prob(Tape& tape, Binder& bind, Value cond, Value x) const;
  SampleBatch sample(Rng& rng, const std::vector<double>& condition,
                     std::size_t n) const;
  Value entropy_term(Tape& tape, Binder& bind, const Tensor& conditions,
                     std::size_t samples_per_state, Rng& rng) const;

  std::vector<Tensor*> parameters();
};

// Replicates one condition row into an [n, C] input tensor.
Tensor tile_condition(const std::vector<double>& condition, std::size_t n);

}  // namespace actorflow
