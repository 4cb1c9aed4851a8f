#include "actorflow/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace actorflow {

void Adam::step(std::span<Tensor* const> params,
                std::span<const Tensor> grads) {
  if (params.size() != grads.size())
    throw std::invalid_argument("Adam::step: parameter/gradient count mismatch");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
      m_.push_back(Tensor::zeros(p->rows(), p->cols()));
      v_.push_back(Tensor::zeros(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size())
    throw std::invalid_argument("Adam::step: parameter list changed size");

  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g))
      throw std::invalid_argument("Adam::step: gradient shape " +
                                  g.shape_str() + " != parameter shape " +
                                  p.shape_str());
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m.values[j] = cfg_.beta1 * m.values[j] + (1.0 - cfg_.beta1) * g.values[j];
      v.values[j] =
          cfg_.beta2 * v.values[j] + (1.0 - cfg_.beta2) * g.values[j] * g.values[j];
      const double mhat = m.values[j] / bc1;
      const double vhat = v.values[j] / bc2;
      p.values[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace actorflow
