#include "actorflow/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace actorflow {

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (auto& v : t.values) v = rng.uniform(-bound, bound);
  return t;
}

MlpParams MlpParams::make(const std::vector<std::size_t>& sizes,
                          Activation act, Rng& rng, bool zero_last) {
  if (sizes.size() < 2)
    throw std::invalid_argument("MlpParams: need at least input and output sizes");
  MlpParams p;
  p.act = act;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const bool last = l + 2 == sizes.size();
    if (last && zero_last)
      p.weights.push_back(Tensor::zeros(sizes[l], sizes[l + 1]));
    else
      p.weights.push_back(glorot_uniform(sizes[l], sizes[l + 1], rng));
    p.biases.push_back(Tensor::zeros(1, sizes[l + 1]));
  }
  return p;
}

Value MlpParams::apply(Tape& tape, Binder& bind, Value input) const {
  const Tensor& in = tape.value(input);
  if (in.cols() != in_dim())
    throw std::invalid_argument("MlpParams::apply: input width " +
                                std::to_string(in.cols()) + " != expected " +
                                std::to_string(in_dim()));
  Value h = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = tape.add_row(tape.matmul(h, bind(weights[l])), bind(biases[l]));
    if (l + 1 < weights.size())
      h = act == Activation::kTanh ? tape.tanh(h) : tape.relu(h);
  }
  return h;
}

void MlpParams::collect_parameters(std::vector<Tensor*>& out) {
  for (auto& w : weights) out.push_back(&w);
  for (auto& b : biases) out.push_back(&b);
}

void MlpParams::collect_parameters(std::vector<const Tensor*>& out) const {
  for (auto& w : weights) out.push_back(&w);
  for (auto& b : biases) out.push_back(&b);
}

}  // namespace actorflow
