#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "actorflow/adam.hpp"
#include "actorflow/nn.hpp"
#include "actorflow/rng.hpp"
#include "actorflow/tape.hpp"

namespace actorflow {

struct CriticConfig {
  std::size_t condition_dim = 0;
  std::size_t action_dim = 5;
  std::vector<std::size_t> hidden = {64, 64};
  AdamConfig adam;
};

// Success-probability regressor over (condition, action) pairs: an MLP
// producing a logit, sigmoid output in (0,1). Trained with binary
// cross-entropy.
class CriticModel {
 public:
  CriticModel() = default;
  static CriticModel make(const CriticConfig& cfg, Rng& rng);

  // logit graph: [N, C+A] joined inputs -> [N,1]
  Value logits(Tape& tape, Binder& bind, Value cond, Value actions) const;

  // batch of success probabilities
  std::vector<double> predict(const Tensor& conditions,
                              const Tensor& actions) const;
  double predict_one(const std::vector<double>& condition,
                     const std::vector<double>& action) const;

  // mean binary cross-entropy on the batch plus one Adam step; returns the
  // pre-step loss. labels must be 0 or 1.
  double train_step(const Tensor& conditions, const Tensor& actions,
                    const std::vector<double>& labels);

  const CriticConfig& config() const { return cfg_; }
  std::vector<Tensor*> parameters();

  nlohmann::json to_json() const;
  static CriticModel from_json(const nlohmann::json& j);

 private:
  CriticConfig cfg_;
  MlpParams net_;
  Adam adam_;
};

}  // namespace actorflow
