#include "actorflow/mof.hpp"

#include <cmath>
#include <stdexcept>

namespace actorflow {

MofModel MofModel::make(const ModelConfig& cfg, Rng& rng) {
  MofModel m;
  m.cfg = cfg;
  std::size_t feature_dim = 0;
  if (cfg.condition_dim > 0) {
    m.encoder = MlpParams::make(
        {cfg.condition_dim, cfg.cond_hidden, cfg.cond_features},
        Activation::kTanh, rng);
    feature_dim = cfg.cond_features;
  }
  m.latent = GmmHead::make(cfg.condition_dim, cfg.action_dim, cfg.components,
                           cfg.gmm_hidden, cfg.init_std, cfg.fixed_std,
                           cfg.fixed_std_value, cfg.init_mean_jitter, rng);
  for (std::size_t i = 0; i < cfg.components; ++i)
    m.flows.push_back(CouplingStack::make(
        cfg.action_dim, cfg.coupling_layers, cfg.st_hidden, feature_dim,
        cfg.s_clamp, cfg.feature_scale, rng));
  return m;
}

Value MofModel::features(Tape& tape, Binder& bind, Value cond) const {
  if (!encoder) {
    const std::size_t rows = tape.value(cond).rows();
    return tape.input(Tensor::zeros(rows, 0));
  }
  return tape.tanh(encoder->apply(tape, bind, cond));
}

Value MofModel::log_prob(Tape& tape, Binder& bind, Value cond, Value x) const {
  Value feat = features(tape, bind, cond);
  auto out = latent.eval(tape, bind, cond);
  Value stacked{};
  for (std::size_t i = 0; i < cfg.components; ++i) {
    auto inv = flows[i].inverse(tape, bind, x, feat);
    Value comp =
        diag_gaussian_log_prob(tape, inv.y, out.means[i], out.log_stds[i]);
    Value term = tape.add(tape.add(comp, inv.log_det),
                          tape.slice_cols(out.log_weights, i, i + 1));
    stacked = i == 0 ? term : tape.concat_cols(stacked, term);
  }
  return tape.logsumexp_rows(stacked);
}

SampleBatch MofModel::sample(Rng& rng, const std::vector<double>& condition,
                             std::size_t n) const {
  if (condition.size() != cfg.condition_dim)
    throw std::invalid_argument("MofModel::sample: condition width mismatch");
  const std::size_t d = cfg.action_dim, k = cfg.components;

  Tape tape;
  Binder bind(tape);
  Value cond = tape.input(tile_condition(condition, n));
  auto out = latent.eval(tape, bind, cond);

  // component draw and latent Gaussian draw per sample
  std::vector<std::size_t> comp(n);
  Tensor z(n, d);
  std::vector<double> w(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < k; ++i)
      w[i] = std::exp(tape.value(out.log_weights).at(r, i));
    comp[r] = rng.categorical(w);
    const Tensor& mu = tape.value(out.means[comp[r]]);
    const Tensor& ls = tape.value(out.log_stds[comp[r]]);
    for (std::size_t j = 0; j < d; ++j)
      z.at(r, j) = mu.at(r, j) + std::exp(ls.at(r, j)) * rng.normal();
  }

  // push each component's rows through its own flow
  Tensor actions(n, d);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n; ++r)
      if (comp[r] == i) rows.push_back(r);
    if (rows.empty()) continue;
    Tensor sub(rows.size(), d);
    for (std::size_t q = 0; q < rows.size(); ++q)
      for (std::size_t j = 0; j < d; ++j) sub.at(q, j) = z.at(rows[q], j);
    Value sub_cond = tape.input(tile_condition(condition, rows.size()));
    Value sub_feat = features(tape, bind, sub_cond);
    auto fwd = flows[i].forward(tape, bind, tape.input(sub), sub_feat);
    const Tensor& xv = tape.value(fwd.y);
    for (std::size_t q = 0; q < rows.size(); ++q)
      for (std::size_t j = 0; j < d; ++j) actions.at(rows[q], j) = xv.at(q, j);
  }

  // full-mixture density of the drawn actions
  Value lp = log_prob(tape, bind, cond, tape.input(actions));
  SampleBatch batch;
  batch.actions = std::move(actions);
  batch.log_probs = tape.value(lp).values;
  return batch;
}

Value MofModel::entropy_term(Tape& tape, Binder& bind,
                             const Tensor& conditions,
                             std::size_t samples_per_state, Rng& rng) const {
  const std::size_t rows = conditions.rows() * samples_per_state;
  Tensor tiled(rows, cfg.condition_dim);
  for (std::size_t s = 0; s < conditions.rows(); ++s)
    for (std::size_t j = 0; j < samples_per_state; ++j)
      for (std::size_t c = 0; c < cfg.condition_dim; ++c)
        tiled.at(s * samples_per_state + j, c) = conditions.at(s, c);
  Value cond = tape.input(tiled);
  Value feat = features(tape, bind, cond);
  auto out = latent.eval(tape, bind, cond);
  Value weights = tape.exp(out.log_weights);

  Value acc{};
  for (std::size_t i = 0; i < cfg.components; ++i) {
    Tensor eps(rows, cfg.action_dim);
    for (auto& v : eps.values) v = rng.normal();
    Value zi = tape.add(out.means[i],
                        tape.mul(tape.exp(out.log_stds[i]), tape.input(eps)));
    auto fwd = flows[i].forward(tape, bind, zi, feat);
    Value lp = log_prob(tape, bind, cond, fwd.y);
    Value term = tape.mul(tape.slice_cols(weights, i, i + 1), lp);
    acc = i == 0 ? term : tape.add(acc, term);
  }
  return tape.mean_all(acc);
}

std::vector<Tensor*> MofModel::parameters() {
  std::vector<Tensor*> out;
  if (encoder) encoder->collect_parameters(out);
  latent.collect_parameters(out);
  for (auto& f : flows) f.collect_parameters(out);
  return out;
}

}  // namespace actorflow
