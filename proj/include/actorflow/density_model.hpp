#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "actorflow/flow.hpp"
#include "actorflow/gmm.hpp"
#include "actorflow/mof.hpp"
#include "actorflow/model_config.hpp"
#include "actorflow/spline_flow.hpp"

namespace actorflow {

// Tagged union over the three model families with one contract: exact
// conditional log-density and sampling with reported densities.
class DensityModel {
 public:
  DensityModel() = default;

  static DensityModel make(const ModelConfig& cfg, Rng& rng);

  const ModelConfig& config() const { return cfg_; }
  std::size_t action_dim() const { return cfg_.action_dim; }
  std::size_t condition_dim() const { return cfg_.condition_dim; }

  // [N,1] log densities; x may be a constant input or a computed value.
  Value log_prob(Tape& tape, Binder& bind, Value cond, Value x) const;

  // Convenience: numeric log densities of a data batch.
  std::vector<double> log_prob_values(const Tensor& conditions,
                                      const Tensor& x) const;

  SampleBatch sample(Rng& rng, const std::vector<double>& condition,
                     std::size_t n) const;

  // Differentiable Monte-Carlo estimate of E_{a~pi(.|s)}[log pi(a|s)]
  // averaged over the condition batch.
  Value entropy_term(Tape& tape, Binder& bind, const Tensor& conditions,
                     std::size_t samples_per_state, Rng& rng) const;

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;

  nlohmann::json to_json() const;
  static DensityModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static DensityModel load(const std::string& path);

 private:
  ModelConfig cfg_;
  std::variant<std::monostate, GmmModel, FlowDensity, SplineFlowDensity,
               MofModel>
      impl_;
};

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace actorflow
