#include "actorflow/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "actorflow/gmm.hpp"

namespace actorflow {

Tensor tile_condition(const std::vector<double>& condition, std::size_t n) {
  Tensor t(n, condition.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < condition.size(); ++c)
      t.at(r, c) = condition[c];
  return t;
}

CouplingStack CouplingStack::make(std::size_t dim, std::size_t n_layers,
                                  std::size_t st_hidden,
                                  std::size_t feature_dim, double s_clamp,
                                  double feature_scale, Rng& rng) {
  if (dim < 2)
    throw std::invalid_argument("CouplingStack: dimension must be >= 2");
  CouplingStack st;
  st.dim = dim;
  st.split = (dim + 1) / 2;
  st.s_clamp = s_clamp;
  st.feature_scale = feature_scale;
  for (std::size_t l = 0; l < n_layers; ++l) {
    CouplingLayer layer;
    layer.flip = (l % 2) == 1;
    const std::size_t pass = layer.flip ? dim - st.split : st.split;
    const std::size_t trans = dim - pass;
    const std::vector<std::size_t> sizes = {pass + feature_dim, st_hidden,
                                            trans};
    // zero final layers: the stack starts as the identity map
    layer.s_net = MlpParams::make(sizes, Activation::kTanh, rng, true);
    layer.t_net = MlpParams::make(sizes, Activation::kTanh, rng, true);
    st.layers.push_back(std::move(layer));
  }
  return st;
}

namespace {

struct Halves {
  Value pass;
  Value trans;
};

Halves split_halves(Tape& tape, Value y, std::size_t split, std::size_t dim,
                    bool flip) {
  Value a = tape.slice_cols(y, 0, split);
  Value b = tape.slice_cols(y, split, dim);
  return flip ? Halves{b, a} : Halves{a, b};
}

Value join_halves(Tape& tape, const Halves& h, bool flip) {
  return flip ? tape.concat_cols(h.trans, h.pass)
              : tape.concat_cols(h.pass, h.trans);
}

}  // namespace

CouplingStack::Result CouplingStack::forward(Tape& tape, Binder& bind,
                                             Value z, Value feat) const {
  const Tensor& zv = tape.value(z);
  if (zv.cols() != dim)
    throw std::invalid_argument("CouplingStack::forward: input width " +
                                std::to_string(zv.cols()) + " != dim " +
                                std::to_string(dim));
  Value y = z;
  Value log_det = tape.input(Tensor::zeros(zv.rows(), 1));
  for (const auto& layer : layers) {
    Halves h = split_halves(tape, y, split, dim, layer.flip);
    Value net_in = tape.concat_cols(tape.scale(h.pass, feature_scale), feat);
    Value s = tape.scale(tape.tanh(layer.s_net.apply(tape, bind, net_in)),
                         s_clamp);
    Value t = layer.t_net.apply(tape, bind, net_in);
    h.trans = tape.add(tape.mul(h.trans, tape.exp(s)), t);
    y = join_halves(tape, h, layer.flip);
    log_det = tape.add(log_det, tape.sum_rows(s));
  }
  return {y, log_det};
}

CouplingStack::Result CouplingStack::inverse(Tape& tape, Binder& bind,
                                             Value x, Value feat) const {
  const Tensor& xv = tape.value(x);
  if (xv.cols() != dim)
    throw std::invalid_argument("CouplingStack::inverse: input width " +
                                std::to_string(xv.cols()) + " != dim " +
                                std::to_string(dim));
  Value y = x;
  Value log_det = tape.input(Tensor::zeros(xv.rows(), 1));
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    Halves h = split_halves(tape, y, split, dim, it->flip);
    Value net_in = tape.concat_cols(tape.scale(h.pass, feature_scale), feat);
    Value s =
        tape.scale(tape.tanh(it->s_net.apply(tape, bind, net_in)), s_clamp);
    Value t = it->t_net.apply(tape, bind, net_in);
    h.trans = tape.mul(tape.sub(h.trans, t), tape.exp(tape.neg(s)));
    y = join_halves(tape, h, it->flip);
    log_det = tape.sub(log_det, tape.sum_rows(s));
  }
  return {y, log_det};
}

void CouplingStack::collect_parameters(std::vector<Tensor*>& out) {
  for (auto& layer : layers) {
    layer.s_net.collect_parameters(out);
    layer.t_net.collect_parameters(out);
  }
}

FlowDensity FlowDensity::make(const ModelConfig& cfg, Rng& rng) {
  FlowDensity f;
  f.cfg = cfg;
  std::size_t feature_dim = 0;
  if (cfg.condition_dim > 0) {
    f.encoder = MlpParams::make(
        {cfg.condition_dim, cfg.cond_hidden, cfg.cond_features},
        Activation::kTanh, rng);
    feature_dim = cfg.cond_features;
  }
  f.stack = CouplingStack::make(cfg.action_dim, cfg.coupling_layers,
                                cfg.st_hidden, feature_dim, cfg.s_clamp,
                                cfg.feature_scale, rng);
  return f;
}

Value FlowDensity::features(Tape& tape, Binder& bind, Value cond) const {
  if (!encoder) {
    const std::size_t rows = tape.value(cond).rows();
    return tape.input(Tensor::zeros(rows, 0));
  }
  return tape.tanh(encoder->apply(tape, bind, cond));
}

Value FlowDensity::log_prob(Tape& tape, Binder& bind, Value cond,
                            Value x) const {
  Value feat = features(tape, bind, cond);
  auto inv = stack.inverse(tape, bind, x, feat);
  return tape.add(std_normal_log_prob(tape, inv.y), inv.log_det);
}

SampleBatch FlowDensity::sample(Rng& rng, const std::vector<double>& condition,
                                std::size_t n) const {
  if (condition.size() != cfg.condition_dim)
    throw std::invalid_argument("FlowDensity::sample: condition width mismatch");
  Tape tape;
  Binder bind(tape);
  Value cond = tape.input(tile_condition(condition, n));
  Value feat = features(tape, bind, cond);

  Tensor z(n, cfg.action_dim);
  for (auto& v : z.values) v = rng.normal();
  Value zv = tape.input(z);
  auto fwd = stack.forward(tape, bind, zv, feat);

  SampleBatch batch;
  batch.actions = tape.value(fwd.y);
  const Tensor& base = tape.value(std_normal_log_prob(tape, zv));
  const Tensor& ld = tape.value(fwd.log_det);
  batch.log_probs.resize(n);
  for (std::size_t r = 0; r < n; ++r)
    batch.log_probs[r] = base.values[r] - ld.values[r];
  return batch;
}

Value FlowDensity::entropy_term(Tape& tape, Binder& bind,
                                const Tensor& conditions,
                                std::size_t samples_per_state,
                                Rng& rng) const {
  const std::size_t rows = conditions.rows() * samples_per_state;
  Tensor tiled(rows, cfg.condition_dim);
  for (std::size_t s = 0; s < conditions.rows(); ++s)
    for (std::size_t j = 0; j < samples_per_state; ++j)
      for (std::size_t c = 0; c < cfg.condition_dim; ++c)
        tiled.at(s * samples_per_state + j, c) = conditions.at(s, c);
  Value cond = tape.input(tiled);
  Value feat = features(tape, bind, cond);

  Tensor z(rows, cfg.action_dim);
  for (auto& v : z.values) v = rng.normal();
  Value zv = tape.input(z);
  auto fwd = stack.forward(tape, bind, zv, feat);
  // log pi(f(z)) = log N(z) - log|det df/dz|, differentiable in the
  // parameters through the push-forward
  Value lp = tape.sub(std_normal_log_prob(tape, zv), fwd.log_det);
  return tape.mean_all(lp);
}

std::vector<Tensor*> FlowDensity::parameters() {
  std::vector<Tensor*> out;
  if (encoder) encoder->collect_parameters(out);
  stack.collect_parameters(out);
  return out;
}

}  // namespace actorflow
