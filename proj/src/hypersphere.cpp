#include "actorflow/hypersphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actorflow/losses.hpp"
#include "actorflow/train.hpp"

namespace actorflow {

HypersphereTask make_hypersphere_task(std::size_t dim, double radius,
                                      Rng& rng) {
  if (dim < 1) throw std::invalid_argument("hypersphere task: dim must be >= 1");
  HypersphereTask t;
  t.dim = dim;
  t.radius = radius;
  t.targets.resize(kHypersphereTargets);
  for (auto& target : t.targets) {
    target.resize(dim);
    for (auto& c : target) c = rng.uniform();
  }
  return t;
}

double nearest_target_distance(const HypersphereTask& task,
                               const std::vector<double>& x) {
  if (x.size() != task.dim)
    throw std::invalid_argument("hypersphere: query dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : task.targets) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < task.dim; ++j) {
      const double diff = x[j] - t[j];
      d2 += diff * diff;
    }
    best = std::min(best, d2);
  }
  return std::sqrt(best);
}

double oracle_value(const HypersphereTask& task, const std::vector<double>& x) {
  const double d = nearest_target_distance(task, x);
  return std::exp(-d * d / (2.0 * task.radius * task.radius));
}

bool hypersphere_success(const HypersphereTask& task,
                         const std::vector<double>& x) {
  return nearest_target_distance(task, x) <= task.radius;
}

std::vector<double> hypersphere_condition(const HypersphereTask& task) {
  std::vector<double> cond;
  cond.reserve(kHypersphereTargets * task.dim);
  for (const auto& t : task.targets)
    cond.insert(cond.end(), t.begin(), t.end());
  return cond;
}

std::vector<double> sample_successful_point(const HypersphereTask& task,
                                            Rng& rng) {
  const std::size_t which = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(kHypersphereTargets) - 1));
  // uniform in the ball: normalized Gaussian direction, radius ~ r u^(1/D)
  std::vector<double> dir(task.dim);
  double norm2 = 0.0;
  for (auto& v : dir) {
    v = rng.normal();
    norm2 += v * v;
  }
  const double norm = std::sqrt(std::max(norm2, 1e-300));
  const double rad =
      task.radius *
      std::pow(rng.uniform(), 1.0 / static_cast<double>(task.dim));
  std::vector<double> x(task.dim);
  for (std::size_t j = 0; j < task.dim; ++j)
    x[j] = task.targets[which][j] + dir[j] / norm * rad;
  return x;
}

CemConfig scaling_cem_config(const ScalingConfig& cfg, std::size_t dim) {
  CemConfig c;
  c.population = cfg.population;
  c.elite_fraction = cfg.elite_fraction;
  c.iterations = cfg.max_iterations;
  c.init_mean.assign(dim, cfg.init_mean);
  c.init_std.assign(dim, cfg.init_std);
  c.bound_lo.assign(dim, 0.0);
  c.bound_hi.assign(dim, 1.0);
  c.std_floor = cfg.std_floor;
  c.clip_samples = cfg.clip_samples;
  return c;
}

std::vector<ScalingCell> run_scaling_experiment(const ScalingConfig& cfg,
                                                std::uint64_t master_seed) {
  std::vector<ScalingCell> cells;
  for (std::size_t dim : cfg.dims) {
    for (double radius : cfg.radii) {
      ScalingCell cell;
      cell.dim = dim;
      cell.radius = radius;
      CemConfig cem = scaling_cem_config(cfg, dim);
      for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
        const std::string label = "scaling/d" + std::to_string(dim) + "/r" +
                                  std::to_string(radius) + "/rep" +
                                  std::to_string(rep);
        Rng rng(derive_seed(master_seed, label));
        HypersphereTask task = make_hypersphere_task(dim, radius, rng);
        auto score = [&](const std::vector<std::vector<double>>& pop) {
          std::vector<double> s(pop.size());
          for (std::size_t i = 0; i < pop.size(); ++i)
            s[i] = oracle_value(task, pop[i]);
          return s;
        };
        auto predicate = [&](const std::vector<double>& x) {
          return hypersphere_success(task, x);
        };
        auto iters =
            cem_until_success(score, predicate, cem, cfg.max_iterations, rng);
        cell.iterations.push_back(iters ? static_cast<int>(*iters) : -1);
      }

      std::vector<double> effective;
      cell.failures = 0;
      cell.min_iterations = static_cast<int>(cfg.max_iterations);
      cell.max_iterations = 1;
      for (int it : cell.iterations) {
        const double v =
            it < 0 ? static_cast<double>(cfg.max_iterations) : it;
        effective.push_back(v);
        if (it < 0)
          ++cell.failures;
        else {
          cell.min_iterations = std::min(cell.min_iterations, it);
          cell.max_iterations = std::max(cell.max_iterations, it);
        }
      }
      std::sort(effective.begin(), effective.end());
      const std::size_t n = effective.size();
      cell.median_iterations = n % 2 == 1
                                   ? effective[n / 2]
                                   : 0.5 * (effective[n / 2 - 1] + effective[n / 2]);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

ModelConfig default_hypersphere_model(std::size_t dim) {
  ModelConfig m;
  m.type = "gmm";
  m.action_dim = dim;
  m.condition_dim = kHypersphereTargets * dim;
  m.components = kHypersphereTargets;
  m.init_std = 0.1;
  m.init_mean_jitter = 0.05;
  return m;
}

HypersphereActorResult train_and_eval_hypersphere_actor(
    const HypersphereActorConfig& cfg, std::uint64_t seed,
    DensityModel* trained_out) {
  Rng init_rng(derive_seed(seed, "hs_actor/init"));
  DensityModel model = DensityModel::make(cfg.model, init_rng);
  ActorTrainer trainer(model, cfg.adam);
  Rng data_rng(derive_seed(seed, "hs_actor/data"));

  const std::size_t cdim = cfg.model.condition_dim;
  for (std::size_t step = 0; step < cfg.train_steps; ++step) {
    Tensor conds(cfg.batch_size, cdim);
    Tensor acts(cfg.batch_size, cfg.dim);
    for (std::size_t r = 0; r < cfg.batch_size; ++r) {
      HypersphereTask task =
          make_hypersphere_task(cfg.dim, cfg.radius, data_rng);
      auto cond = hypersphere_condition(task);
      auto x = sample_successful_point(task, data_rng);
      for (std::size_t j = 0; j < cdim; ++j) conds.at(r, j) = cond[j];
      for (std::size_t j = 0; j < cfg.dim; ++j) acts.at(r, j) = x[j];
    }
    trainer.nll_step(conds, acts);
  }

  HypersphereActorResult out;
  out.success_rate = actor_one_iteration_success(
      model, cfg.dim, cfg.radius, cfg.eval_tasks, cfg.samples_per_trial,
      derive_seed(seed, "hs_actor/eval"));

  // baseline: same number of N(0, I) draws per task
  Rng base_rng(derive_seed(seed, "hs_actor/baseline"));
  std::size_t hits = 0;
  for (std::size_t t = 0; t < cfg.eval_tasks; ++t) {
    HypersphereTask task = make_hypersphere_task(cfg.dim, cfg.radius, base_rng);
    bool any = false;
    std::vector<double> x(cfg.dim);
    for (std::size_t s = 0; s < cfg.samples_per_trial && !any; ++s) {
      for (auto& v : x) v = base_rng.normal();
      any = hypersphere_success(task, x);
    }
    hits += any ? 1 : 0;
  }
  out.gaussian_baseline_rate =
      static_cast<double>(hits) / static_cast<double>(cfg.eval_tasks);

  if (trained_out) *trained_out = std::move(model);
  return out;
}

double actor_one_iteration_success(const DensityModel& actor, std::size_t dim,
                                   double radius, std::size_t tasks,
                                   std::size_t samples_per_trial,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < tasks; ++t) {
    HypersphereTask task = make_hypersphere_task(dim, radius, rng);
    SampleBatch batch =
        actor.sample(rng, hypersphere_condition(task), samples_per_trial);
    bool any = false;
    std::vector<double> x(dim);
    for (std::size_t s = 0; s < samples_per_trial && !any; ++s) {
      for (std::size_t j = 0; j < dim; ++j) x[j] = batch.actions.at(s, j);
      any = hypersphere_success(task, x);
    }
    hits += any ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(tasks);
}

}  // namespace actorflow
