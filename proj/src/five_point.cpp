#include "actorflow/five_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actorflow/gmm.hpp"
#include "actorflow/train.hpp"

namespace actorflow {

FivePointTask make_five_point_task(Rng& rng) {
  FivePointTask t;
  for (auto& p : t.points) {
    p[0] = rng.uniform(0.0, kFivePointSquare);
    p[1] = rng.uniform(0.0, kFivePointSquare);
  }
  return t;
}

double five_point_ground_truth_log_prob(const FivePointTask& task,
                                        const std::array<double, 2>& a) {
  const double var = kFivePointStd * kFivePointStd;
  const double log_norm = -std::log(4.0) - kLog2Pi - std::log(var);
  double max_e = -std::numeric_limits<double>::infinity();
  std::array<double, 4> exponents{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double cx = task.points[i + 1][0] - task.points[0][0];
    const double cy = task.points[i + 1][1] - task.points[0][1];
    const double dx = a[0] - cx, dy = a[1] - cy;
    exponents[i] = -(dx * dx + dy * dy) / (2.0 * var);
    max_e = std::max(max_e, exponents[i]);
  }
  double s = 0.0;
  for (double e : exponents) s += std::exp(e - max_e);
  return log_norm + max_e + std::log(s);
}

std::array<double, 2> five_point_ground_truth_sample(const FivePointTask& task,
                                                     Rng& rng) {
  const std::size_t i =
      static_cast<std::size_t>(rng.uniform_int(1, 4));
  return {task.points[i][0] - task.points[0][0] + kFivePointStd * rng.normal(),
          task.points[i][1] - task.points[0][1] + kFivePointStd * rng.normal()};
}

std::vector<double> five_point_condition(const FivePointTask& task) {
  std::vector<double> cond;
  cond.reserve(10);
  for (const auto& p : task.points) {
    cond.push_back(p[0] / kFivePointSquare);
    cond.push_back(p[1] / kFivePointSquare);
  }
  return cond;
}

ModelConfig default_five_point_model(const std::string& type,
                                     double init_std) {
  ModelConfig m;
  m.type = type;
  m.action_dim = 2;
  m.condition_dim = 10;
  m.components = 4;
  m.init_std = init_std;
  m.gmm_hidden = {};  // one linear layer
  m.coupling_layers = 4;
  m.st_hidden = 32;
  m.cond_features = 16;
  m.cond_hidden = 32;
  m.feature_scale = 0.1;  // actions live in +/- 10
  m.init_mean_jitter = 0.05;
  return m;
}

FivePointResult run_five_point_training(const FivePointTrainConfig& cfg,
                                        std::uint64_t seed,
                                        DensityModel* trained_out) {
  Rng init_rng(derive_seed(seed, "five_point/init"));
  DensityModel model = DensityModel::make(cfg.model, init_rng);
  ActorTrainer trainer(model, cfg.adam);
  Rng data_rng(derive_seed(seed, "five_point/data"));

  for (std::size_t step = 0; step < cfg.train_steps; ++step) {
    Tensor conds(cfg.batch_size, 10);
    Tensor acts(cfg.batch_size, 2);
    for (std::size_t r = 0; r < cfg.batch_size; ++r) {
      FivePointTask task = make_five_point_task(data_rng);
      auto cond = five_point_condition(task);
      auto a = five_point_ground_truth_sample(task, data_rng);
      for (std::size_t j = 0; j < 10; ++j) conds.at(r, j) = cond[j];
      acts.at(r, 0) = a[0];
      acts.at(r, 1) = a[1];
    }
    trainer.nll_step(conds, acts);
  }

  Rng eval_rng(derive_seed(seed, "five_point/eval"));
  FivePointResult out;
  double model_sum = 0.0, gt_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < cfg.eval_tasks; ++t) {
    FivePointTask task = make_five_point_task(eval_rng);
    auto cond = five_point_condition(task);
    const std::size_t n = cfg.eval_samples_per_task;
    Tensor conds(n, 10);
    Tensor acts(n, 2);
    for (std::size_t r = 0; r < n; ++r) {
      auto a = five_point_ground_truth_sample(task, eval_rng);
      for (std::size_t j = 0; j < 10; ++j) conds.at(r, j) = cond[j];
      acts.at(r, 0) = a[0];
      acts.at(r, 1) = a[1];
      gt_sum += five_point_ground_truth_log_prob(task, a);
    }
    auto lp = model.log_prob_values(conds, acts);
    for (double v : lp) model_sum += v;
    count += n;
  }
  out.held_out_log_lik = model_sum / static_cast<double>(count);
  out.ground_truth_log_lik = gt_sum / static_cast<double>(count);
  if (trained_out) *trained_out = std::move(model);
  return out;
}

namespace {

DensityGrid make_grid(std::size_t resolution) {
  DensityGrid g;
  g.resolution = resolution;
  g.lo = -kFivePointSquare;
  g.hi = kFivePointSquare;
  g.log_density.assign(resolution * resolution, 0.0);
  return g;
}

}  // namespace

DensityGrid five_point_density_grid(const DensityModel& model,
                                    const FivePointTask& task,
                                    std::size_t resolution) {
  DensityGrid g = make_grid(resolution);
  const auto cond = five_point_condition(task);
  const double step = (g.hi - g.lo) / static_cast<double>(resolution);
  const std::size_t n = resolution * resolution;
  Tensor conds(n, 10);
  Tensor acts(n, 2);
  for (std::size_t iy = 0; iy < resolution; ++iy)
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      const std::size_t r = iy * resolution + ix;
      for (std::size_t j = 0; j < 10; ++j) conds.at(r, j) = cond[j];
      acts.at(r, 0) = g.lo + (static_cast<double>(ix) + 0.5) * step;
      acts.at(r, 1) = g.lo + (static_cast<double>(iy) + 0.5) * step;
    }
  g.log_density = model.log_prob_values(conds, acts);
  return g;
}

DensityGrid five_point_ground_truth_grid(const FivePointTask& task,
                                         std::size_t resolution) {
  DensityGrid g = make_grid(resolution);
  const double step = (g.hi - g.lo) / static_cast<double>(resolution);
  for (std::size_t iy = 0; iy < resolution; ++iy)
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      const std::array<double, 2> a = {
          g.lo + (static_cast<double>(ix) + 0.5) * step,
          g.lo + (static_cast<double>(iy) + 0.5) * step};
      g.log_density[iy * resolution + ix] =
          five_point_ground_truth_log_prob(task, a);
    }
  return g;
}

}  // namespace actorflow
