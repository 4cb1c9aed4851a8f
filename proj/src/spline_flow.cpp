#include "actorflow/spline_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actorflow/flow.hpp"
#include "actorflow/gmm.hpp"

namespace actorflow {

namespace {

constexpr double kEdgeEps = 1e-12;

struct BinSearch {
  std::vector<std::size_t> bin;   // per row
  Tensor below_mask;              // [N,K], 1 where column < bin(row)
};

// Locates the bin of each w in the cumulative masses of P (numeric side of
// the graph); the mask reproduces the cumulative sum as a differentiable
// masked row-sum.
BinSearch locate_bins(const Tensor& P, const std::vector<double>& w) {
  const std::size_t n = P.rows(), K = P.cols();
  BinSearch out;
  out.bin.resize(n);
  out.below_mask = Tensor::zeros(n, K);
  for (std::size_t r = 0; r < n; ++r) {
    double cum = 0.0;
    std::size_t j = K - 1;
    for (std::size_t i = 0; i < K; ++i) {
      const double next = cum + P.at(r, i);
      if (w[r] < next || i == K - 1) {
        j = i;
        break;
      }
      cum = next;
    }
    out.bin[r] = j;
    for (std::size_t i = 0; i < j; ++i) out.below_mask.at(r, i) = 1.0;
  }
  return out;
}

}  // namespace

SplineFlowDensity SplineFlowDensity::make(const ModelConfig& cfg, Rng& rng) {
  if (cfg.action_dim != 1)
    throw std::invalid_argument("SplineFlowDensity: action_dim must be 1");
  if (!(cfg.bound_hi > cfg.bound_lo))
    throw std::invalid_argument("SplineFlowDensity: bound_hi must exceed bound_lo");
  if (cfg.spline_bins < 2)
    throw std::invalid_argument("SplineFlowDensity: need at least 2 bins");
  SplineFlowDensity f;
  f.cfg = cfg;
  f.slope_head = MlpParams::make({cfg.condition_dim, cfg.spline_bins},
                                 Activation::kTanh, rng, true);
  return f;
}

Value SplineFlowDensity::log_prob(Tape& tape, Binder& bind, Value cond,
                                  Value x) const {
  const Tensor& xv = tape.value(x);
  if (xv.cols() != 1)
    throw std::invalid_argument("SplineFlowDensity::log_prob: x must be [N,1]");
  const std::size_t n = xv.rows();
  const double lo = cfg.bound_lo, hi = cfg.bound_hi;
  const double span = hi - lo;
  const double K = static_cast<double>(cfg.spline_bins);

  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double val = xv.values[r];
    if (val < lo || val > hi)
      throw std::invalid_argument(
          "SplineFlowDensity::log_prob: point outside support [" +
          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    w[r] = std::clamp((val - lo) / span, kEdgeEps, 1.0 - kEdgeEps);
  }

  Value p = tape.softmax_rows(slope_head.apply(tape, bind, cond));
  BinSearch bins = locate_bins(tape.value(p), w);

  Value xj = tape.sum_rows(tape.mul(p, tape.input(bins.below_mask)));
  Value pj = tape.gather_cols(p, bins.bin);
  Value log_pjK = tape.log(tape.scale(pj, K));

  Tensor base(n, 1);
  for (std::size_t r = 0; r < n; ++r)
    base.values[r] = static_cast<double>(bins.bin[r]) / K;
  Tensor w_t(n, 1, std::move(w));
  Value u = tape.add(tape.input(base),
                     tape.mul(tape.sub(tape.input(w_t), xj),
                              tape.exp(tape.neg(log_pjK))));
  Value one_minus_u = tape.add_scalar(tape.neg(u), 1.0);
  Value z = tape.sub(tape.log(u), tape.log(one_minus_u));
  Value log_phi = std_normal_log_prob(tape, z);
  Value jac = tape.add(tape.add(tape.log(u), tape.log(one_minus_u)),
                       tape.add_scalar(log_pjK, std::log(span)));
  return tape.sub(log_phi, jac);
}

SplineFlowDensity::Push SplineFlowDensity::push_forward(Tape& tape,
                                                        Binder& bind,
                                                        Value cond,
                                                        const Tensor& z) const {
  const std::size_t n = z.rows();
  const double span = cfg.bound_hi - cfg.bound_lo;
  const double K = static_cast<double>(cfg.spline_bins);

  Value p = tape.softmax_rows(slope_head.apply(tape, bind, cond));

  Tensor u_t(n, 1);
  Tensor rel(n, 1);       // u - j/K
  Tensor log_base(n, 1);  // log phi(z) - log(u(1-u))
  std::vector<std::size_t> bin(n);
  Tensor below = Tensor::zeros(n, cfg.spline_bins);
  for (std::size_t r = 0; r < n; ++r) {
    const double zr = z.values[r];
    const double u = 1.0 / (1.0 + std::exp(-zr));
    const double uc = std::clamp(u, kEdgeEps, 1.0 - kEdgeEps);
    std::size_t j = static_cast<std::size_t>(uc * K);
    j = std::min(j, cfg.spline_bins - 1);
    bin[r] = j;
    for (std::size_t i = 0; i < j; ++i) below.at(r, i) = 1.0;
    u_t.values[r] = uc;
    rel.values[r] = uc - static_cast<double>(j) / K;
    log_base.values[r] = -0.5 * zr * zr - 0.5 * kLog2Pi -
                         std::log(uc) - std::log(1.0 - uc);
  }

  Value xj = tape.sum_rows(tape.mul(p, tape.input(below)));
  Value pj = tape.gather_cols(p, bin);
  Value pjK = tape.scale(pj, K);
  Value w = tape.add(xj, tape.mul(pjK, tape.input(rel)));
  Value x = tape.add_scalar(tape.scale(w, span), cfg.bound_lo);
  Value lp = tape.sub(tape.input(log_base),
                      tape.add_scalar(tape.log(pjK), std::log(span)));
  return {x, lp};
}

SampleBatch SplineFlowDensity::sample(Rng& rng,
                                      const std::vector<double>& condition,
                                      std::size_t n) const {
  if (condition.size() != cfg.condition_dim)
    throw std::invalid_argument(
        "SplineFlowDensity::sample: condition width mismatch");
  Tape tape;
  Binder bind(tape);
  Value cond = tape.input(tile_condition(condition, n));
  Tensor z(n, 1);
  for (auto& v : z.values) v = rng.normal();
  auto push = push_forward(tape, bind, cond, z);
  SampleBatch batch;
  batch.actions = tape.value(push.x);
  batch.log_probs = tape.value(push.log_prob).values;
  return batch;
}

Value SplineFlowDensity::entropy_term(Tape& tape, Binder& bind,
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
  Tensor z(rows, 1);
  for (auto& v : z.values) v = rng.normal();
  auto push = push_forward(tape, bind, cond, z);
  return tape.mean_all(push.log_prob);
}

std::vector<double> SplineFlowDensity::inverse_numeric(
    const std::vector<double>& condition, const std::vector<double>& x) const {
  Tape tape;
  Binder bind(tape);
  const std::size_t n = x.size();
  Value cond = tape.input(tile_condition(condition, n));
  Value p = tape.softmax_rows(slope_head.apply(tape, bind, cond));
  const Tensor& P = tape.value(p);
  const double span = cfg.bound_hi - cfg.bound_lo;
  const double K = static_cast<double>(cfg.spline_bins);

  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r)
    w[r] = std::clamp((x[r] - cfg.bound_lo) / span, kEdgeEps, 1.0 - kEdgeEps);
  BinSearch bins = locate_bins(P, w);

  std::vector<double> z(n);
  for (std::size_t r = 0; r < n; ++r) {
    double xj = 0.0;
    for (std::size_t i = 0; i < bins.bin[r]; ++i) xj += P.at(r, i);
    const double pj = P.at(r, bins.bin[r]);
    const double u = std::clamp(
        static_cast<double>(bins.bin[r]) / K + (w[r] - xj) / (pj * K),
        kEdgeEps, 1.0 - kEdgeEps);
    z[r] = std::log(u) - std::log(1.0 - u);
  }
  return z;
}

std::vector<Tensor*> SplineFlowDensity::parameters() {
  std::vector<Tensor*> out;
  slope_head.collect_parameters(out);
  return out;
}

}  // namespace actorflow
