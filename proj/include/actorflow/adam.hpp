#pragma once

#include <span>
#include <vector>

#include "actorflow/tensor.hpp"

namespace actorflow {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard bias-corrected Adam. Moment buffers are allocated on the first
// step and keyed by parameter position, so the parameter list must be
// stable across steps.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  void step(std::span<Tensor* const> params, std::span<const Tensor> grads);

  long step_count() const { return step_; }
  const AdamConfig& config() const { return cfg_; }
  std::vector<Tensor>& first_moments() { return m_; }
  std::vector<Tensor>& second_moments() { return v_; }
  void restore(long step, std::vector<Tensor> m, std::vector<Tensor> v) {
    step_ = step;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  AdamConfig cfg_;
  long step_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace actorflow
