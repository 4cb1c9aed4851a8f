#include "actorflow/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace actorflow {

Value std_normal_log_prob(Tape& tape, Value x) {
  const double d = static_cast<double>(tape.value(x).cols());
  Value sq = tape.sum_rows(tape.mul(x, x));
  return tape.add_scalar(tape.scale(sq, -0.5), -0.5 * d * kLog2Pi);
}

Value diag_gaussian_log_prob(Tape& tape, Value x, Value mean, Value log_std) {
  const double d = static_cast<double>(tape.value(x).cols());
  Value z = tape.mul(tape.sub(x, mean), tape.exp(tape.neg(log_std)));
  return tape.add_scalar(
      tape.add(tape.scale(tape.sum_rows(tape.mul(z, z)), -0.5),
               tape.neg(tape.sum_rows(log_std))),
      -0.5 * d * kLog2Pi);
}

double log_std_raw_from_std(double init_std) {
  const double span = kLogStdHi - kLogStdLo;
  double f = (std::log(init_std) - kLogStdLo) / span;
  f = std::clamp(f, 1e-4, 1.0 - 1e-4);
  return std::log(f / (1.0 - f));  // logit
}

namespace {

// raw -> log-std via sigmoid squash into [kLogStdLo, kLogStdHi]
Value squash_log_std(Tape& tape, Value raw) {
  return tape.add_scalar(
      tape.scale(tape.sigmoid(raw), kLogStdHi - kLogStdLo), kLogStdLo);
}

}  // namespace

GmmHead GmmHead::make(std::size_t condition_dim, std::size_t dim,
                      std::size_t components,
                      const std::vector<std::size_t>& hidden, double init_std,
                      bool fixed_std, double fixed_std_value,
                      double mean_jitter, Rng& rng) {
  if (components < 1) throw std::invalid_argument("GmmHead: components < 1");
  GmmHead h;
  h.components = components;
  h.dim = dim;
  h.fixed_std = fixed_std;
  h.fixed_std_value = fixed_std_value;
  const std::size_t out = fixed_std ? components * dim + components
                                    : 2 * components * dim + components;
  std::vector<std::size_t> sizes;
  sizes.push_back(condition_dim);
  for (std::size_t s : hidden) sizes.push_back(s);
  sizes.push_back(out);
  h.net = MlpParams::make(sizes, Activation::kTanh, rng);

  Tensor& bias = h.net.biases.back();
  for (std::size_t i = 0; i < components * dim; ++i)
    bias.values[i] = mean_jitter != 0.0
                         ? rng.uniform(-mean_jitter, mean_jitter)
                         : 0.0;
  if (!fixed_std) {
    const double raw = log_std_raw_from_std(init_std);
    for (std::size_t i = 0; i < components * dim; ++i)
      bias.values[components * dim + i] = raw;
  }
  return h;
}

GmmHead::Out GmmHead::eval(Tape& tape, Binder& bind, Value cond) const {
  Value o = net.apply(tape, bind, cond);
  const std::size_t k = components, d = dim;
  Out out;
  out.means.reserve(k);
  out.log_stds.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.means.push_back(tape.slice_cols(o, i * d, (i + 1) * d));
  if (fixed_std) {
    const std::size_t rows = tape.value(cond).rows();
    Value ls = tape.input(Tensor::full(rows, d, std::log(fixed_std_value)));
    for (std::size_t i = 0; i < k; ++i) out.log_stds.push_back(ls);
    out.log_weights =
        tape.log_softmax_rows(tape.slice_cols(o, k * d, k * d + k));
  } else {
    for (std::size_t i = 0; i < k; ++i)
      out.log_stds.push_back(
          squash_log_std(tape, tape.slice_cols(o, (k + i) * d, (k + i + 1) * d)));
    out.log_weights =
        tape.log_softmax_rows(tape.slice_cols(o, 2 * k * d, 2 * k * d + k));
  }
  return out;
}

Value GmmHead::log_prob(Tape& tape, const Out& out, Value x) const {
  const Tensor& xv = tape.value(x);
  if (xv.cols() != dim)
    throw std::invalid_argument("GmmHead::log_prob: x width " +
                                std::to_string(xv.cols()) + " != dim " +
                                std::to_string(dim));
  Value stacked{};  // [N,k] of per-component log w_i + log N_i
  for (std::size_t i = 0; i < components; ++i) {
    Value comp = diag_gaussian_log_prob(tape, x, out.means[i], out.log_stds[i]);
    Value logw = tape.slice_cols(out.log_weights, i, i + 1);
    Value term = tape.add(comp, logw);
    stacked = i == 0 ? term : tape.concat_cols(stacked, term);
  }
  return tape.logsumexp_rows(stacked);
}

GmmModel GmmModel::make(const ModelConfig& cfg, Rng& rng) {
  GmmModel m;
  m.cfg = cfg;
  m.head = GmmHead::make(cfg.condition_dim, cfg.action_dim, cfg.components,
                         cfg.gmm_hidden, cfg.init_std, cfg.fixed_std,
                         cfg.fixed_std_value, cfg.init_mean_jitter, rng);
  return m;
}

Value GmmModel::log_prob(Tape& tape, Binder& bind, Value cond, Value x) const {
  auto out = head.eval(tape, bind, cond);
  return head.log_prob(tape, out, x);
}

SampleBatch GmmModel::sample(Rng& rng, const std::vector<double>& condition,
                             std::size_t n) const {
  if (condition.size() != cfg.condition_dim)
    throw std::invalid_argument("GmmModel::sample: condition width mismatch");
  const std::size_t d = cfg.action_dim, k = cfg.components;
  Tensor cond(n, cfg.condition_dim);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < cfg.condition_dim; ++c)
      cond.at(r, c) = condition[c];

  Tape tape;
  Binder bind(tape);
  Value cv = tape.input(cond);
  auto out = head.eval(tape, bind, cv);

  Tensor actions(n, d);
  std::vector<double> w(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < k; ++i)
      w[i] = std::exp(tape.value(out.log_weights).at(r, i));
    const std::size_t c = rng.categorical(w);
    const Tensor& mu = tape.value(out.means[c]);
    const Tensor& ls = tape.value(out.log_stds[c]);
    for (std::size_t j = 0; j < d; ++j)
      actions.at(r, j) = mu.at(r, j) + std::exp(ls.at(r, j)) * rng.normal();
  }
  Value lp = head.log_prob(tape, out, tape.input(actions));
  SampleBatch batch;
  batch.actions = std::move(actions);
  batch.log_probs = tape.value(lp).values;
  return batch;
}

Value GmmModel::entropy_term(Tape& tape, Binder& bind,
                             const Tensor& conditions,
                             std::size_t samples_per_state, Rng& rng) const {
  const std::size_t n_states = conditions.rows();
  const std::size_t rows = n_states * samples_per_state;
  Tensor tiled(rows, cfg.condition_dim);
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t j = 0; j < samples_per_state; ++j)
      for (std::size_t c = 0; c < cfg.condition_dim; ++c)
        tiled.at(s * samples_per_state + j, c) = conditions.at(s, c);

  Value cv = tape.input(tiled);
  auto out = head.eval(tape, bind, cv);
  Value weights = tape.exp(out.log_weights);  // [rows,k]
  Value acc{};
  for (std::size_t i = 0; i < cfg.components; ++i) {
    Tensor eps(rows, cfg.action_dim);
    for (auto& v : eps.values) v = rng.normal();
    Value a = tape.add(out.means[i],
                       tape.mul(tape.exp(out.log_stds[i]), tape.input(eps)));
    Value lp = head.log_prob(tape, out, a);                  // [rows,1]
    Value term = tape.mul(tape.slice_cols(weights, i, i + 1), lp);
    acc = i == 0 ? term : tape.add(acc, term);
  }
  return tape.mean_all(acc);
}

std::vector<Tensor*> GmmModel::parameters() {
  std::vector<Tensor*> out;
  head.collect_parameters(out);
  return out;
}

}  // namespace actorflow
