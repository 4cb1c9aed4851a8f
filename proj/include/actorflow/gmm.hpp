#pragma once

#include <vector>

#include "actorflow/model_config.hpp"
#include "actorflow/nn.hpp"
#include "actorflow/rng.hpp"
#include "actorflow/tape.hpp"

namespace actorflow {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// Log-std bounds. Predicted log-stds pass through a sigmoid squash into
// this range, keeping gradients alive at both ends.
inline constexpr double kLogStdLo = -5.0;
inline constexpr double kLogStdHi = 3.0;

// log N(x; 0, I) per row: [N,D] -> [N,1]
Value std_normal_log_prob(Tape& tape, Value x);

// log N(x; mean, diag(exp(log_std)^2)) per row: [N,D] -> [N,1]
Value diag_gaussian_log_prob(Tape& tape, Value x, Value mean, Value log_std);

// Conditional diagonal Gaussian mixture head: a network maps the condition
// to per-component means, log-stds and mixture logits. Also used as the
// latent distribution of the mixture-of-flows model.
struct GmmHead {
  std::size_t components = 1;
  std::size_t dim = 1;
  bool fixed_std = false;
  double fixed_std_value = 0.5;
  MlpParams net;  // cond -> k*D + k*D + k  (k*D + k when fixed_std)

  struct Out {
    std::vector<Value> means;     // k values of [N,D]
    std::vector<Value> log_stds;  // k values of [N,D]
    Value log_weights;            // [N,k], log-softmax of logits
  };

  static GmmHead make(std::size_t condition_dim, std::size_t dim,
                      std::size_t components,
                      const std::vector<std::size_t>& hidden, double init_std,
                      bool fixed_std, double fixed_std_value,
                      double mean_jitter, Rng& rng);

  Out eval(Tape& tape, Binder& bind, Value cond) const;

  // log sum_k w_k N(x; mu_k, sigma_k^2), via log-sum-exp: [N,1]
  Value log_prob(Tape& tape, const Out& out, Value x) const;

  void collect_parameters(std::vector<Tensor*>& out) { net.collect_parameters(out); }
};

// Standalone conditional GMM density model.
struct GmmModel {
  ModelConfig cfg;
  GmmHead head;

  static GmmModel make(const ModelConfig& cfg, Rng& rng);

  Value log_prob(Tape& tape, Binder& bind, Value cond, Value x) const;

  // Draws n actions for one condition row; reported log densities are the
  // mixture log-probabilities evaluated at the samples.
  SampleBatch sample(Rng& rng, const std::vector<double>& condition,
                     std::size_t n) const;

  // Differentiable Monte-Carlo estimate of E_{a~pi}[log pi(a|s)], averaged
  // over the batch of conditions: reparameterized component draws combined
  // with the exact weight mixture so weight gradients exist.
  Value entropy_term(Tape& tape, Binder& bind, const Tensor& conditions,
                     std::size_t samples_per_state, Rng& rng) const;

  std::vector<Tensor*> parameters();
};

// Maps an initial std to the raw pre-squash value; init_std is clamped into
// the representable (lo, hi) log range.
double log_std_raw_from_std(double init_std);

}  // namespace actorflow
