#pragma once

#include <string>
#include <vector>

#include "actorflow/rng.hpp"
#include "actorflow/tape.hpp"
#include "actorflow/tensor.hpp"

namespace actorflow {

enum class Activation { kTanh, kRelu };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Fully connected stack; hidden layers use the configured activation, the
// last layer is linear.
struct MlpParams {
  std::vector<Tensor> weights;  // [in,out] per layer
  std::vector<Tensor> biases;   // [1,out] per layer
  Activation act = Activation::kTanh;

  // sizes = {in, h1, ..., out}. zero_last zeroes the final layer so the
  // stack starts as the constant-zero function.
  static MlpParams make(const std::vector<std::size_t>& sizes, Activation act,
                        Rng& rng, bool zero_last = false);

  Value apply(Tape& tape, Binder& bind, Value input) const;

  std::size_t in_dim() const { return weights.front().rows(); }
  std::size_t out_dim() const { return weights.back().cols(); }
  std::size_t layer_count() const { return weights.size(); }

  void collect_parameters(std::vector<Tensor*>& out);
  void collect_parameters(std::vector<const Tensor*>& out) const;
};

// Uniform init in +/- sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace actorflow
