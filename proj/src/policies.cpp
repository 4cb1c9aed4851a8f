#include "actorflow/policies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace actorflow {

namespace {

bool pose_feasible(const SceneConfig& cfg, const Pose& g,
                   const GraspAction& a) {
  return g.x + a.dx >= 0.0 && g.x + a.dx <= 1.0 && g.y + a.dy >= 0.0 &&
         g.y + a.dy <= 1.0 && g.z + a.dz >= 0.0 && g.z + a.dz <= cfg.z_max;
}

GraspAction clip_to_workspace(const SceneConfig& cfg, const Pose& g,
                              const GraspAction& a) {
  const double dx = std::clamp(g.x + a.dx, 0.0, 1.0) - g.x;
  const double dy = std::clamp(g.y + a.dy, 0.0, 1.0) - g.y;
  const double dz = std::clamp(g.z + a.dz, 0.0, cfg.z_max) - g.z;
  return GraspAction(dx, dy, dz, a.sin_dtheta, a.cos_dtheta);
}

bool action_converged(const EpisodeConfig& ep, const GraspAction& a) {
  return a.translation_norm() <= ep.convergence_translation &&
         std::fabs(a.dtheta()) <= ep.convergence_rotation;
}

}  // namespace

Policy::Decision RandomPolicy::decide(const SceneConfig& cfg,
                                      const PlanarScene& scene, Rng& rng) {
  (void)scene;
  Decision d;
  d.action = random_action(cfg, rng);
  return d;
}

bool RandomPolicy::wants_close(const EpisodeConfig& ep,
                               const Decision& d) const {
  return action_converged(ep, d.action);
}

Policy::Decision ActorPolicy::decide(const SceneConfig& cfg,
                                     const PlanarScene& scene, Rng& rng) {
  const std::vector<double> cond = condition_of(cfg, scene);
  SampleBatch batch = model_->sample(rng, cond, n_samples_);
  ++forward_batches;
  samples_scored += static_cast<long>(n_samples_);

  long best = -1;
  double best_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_samples_; ++i) {
    GraspAction a = GraspAction::from_vector(
        {batch.actions.at(i, 0), batch.actions.at(i, 1), batch.actions.at(i, 2),
         batch.actions.at(i, 3), batch.actions.at(i, 4)});
    if (!pose_feasible(cfg, scene.gripper, a)) continue;
    if (batch.log_probs[i] > best_lp) {
      best_lp = batch.log_probs[i];
      best = static_cast<long>(i);
    }
  }
  Decision d;
  if (best >= 0) {
    d.action = GraspAction::from_vector(
        {batch.actions.at(best, 0), batch.actions.at(best, 1),
         batch.actions.at(best, 2), batch.actions.at(best, 3),
         batch.actions.at(best, 4)});
    d.score = best_lp;
    return d;
  }
  // all infeasible: clip the highest-density raw sample into the workspace
  std::size_t raw_best = 0;
  for (std::size_t i = 1; i < n_samples_; ++i)
    if (batch.log_probs[i] > batch.log_probs[raw_best]) raw_best = i;
  GraspAction a = GraspAction::from_vector(
      {batch.actions.at(raw_best, 0), batch.actions.at(raw_best, 1),
       batch.actions.at(raw_best, 2), batch.actions.at(raw_best, 3),
       batch.actions.at(raw_best, 4)});
  d.action = clip_to_workspace(cfg, scene.gripper, a);
  d.score = batch.log_probs[raw_best];
  return d;
}

bool ActorPolicy::wants_close(const EpisodeConfig& ep,
                              const Decision& d) const {
  return action_converged(ep, d.action);
}

CemConfig CemCriticPolicy::default_grasp_cem(const SceneConfig& cfg) {
  // initial Gaussian covers the workspace: 15 cm horizontal and 6 cm
  // vertical std in 30 cm units, 90 deg in rotation
  CemConfig c;
  c.population = 64;
  c.elite_fraction = 0.1;
  c.iterations = 3;
  c.init_mean = {0.0, 0.0, 0.0, 0.0};
  c.init_std = {0.5, 0.5, 0.2, 0.5 * kPi};
  c.bound_lo = {-cfg.max_dxy, -cfg.max_dxy, -cfg.max_dz, -cfg.max_dtheta};
  c.bound_hi = {cfg.max_dxy, cfg.max_dxy, cfg.max_dz, cfg.max_dtheta};
  c.clip_samples = true;
  return c;
}

Policy::Decision CemCriticPolicy::decide(const SceneConfig& cfg,
                                         const PlanarScene& scene, Rng& rng) {
  (void)cfg;
  const std::vector<double> cond = condition_of(cfg, scene);
  auto score = [&](const std::vector<std::vector<double>>& pop) {
    Tensor conds(pop.size(), cond.size());
    Tensor acts(pop.size(), kActionDim);
    for (std::size_t r = 0; r < pop.size(); ++r) {
      for (std::size_t j = 0; j < cond.size(); ++j) conds.at(r, j) = cond[j];
      GraspAction a = GraspAction::from_angle(pop[r][0], pop[r][1], pop[r][2],
                                              pop[r][3]);
      auto arr = a.as_array();
      for (std::size_t j = 0; j < kActionDim; ++j) acts.at(r, j) = arr[j];
    }
    ++forward_batches;
    samples_scored += static_cast<long>(pop.size());
    return critic_->predict(conds, acts);
  };
  CemResult res = cem_optimize(score, cem_, rng);

  Decision d;
  d.action = GraspAction::from_angle(res.best_action[0], res.best_action[1],
                                     res.best_action[2], res.best_action[3]);
  d.score = res.best_score;
  d.best_sample_value = res.best_score;
  d.zero_action_value =
      critic_->predict_one(cond, GraspAction().as_vector());
  return d;
}

bool CemCriticPolicy::wants_close(const EpisodeConfig& ep,
                                  const Decision& d) const {
  return d.zero_action_value > ep.critic_termination_ratio * d.best_sample_value;
}

Policy::Decision ActorCriticPolicy::decide(const SceneConfig& cfg,
                                           const PlanarScene& scene,
                                           Rng& rng) {
  const std::vector<double> cond = condition_of(cfg, scene);
  SampleBatch batch = model_->sample(rng, cond, n_samples_);
  ++forward_batches;
  samples_scored += static_cast<long>(n_samples_);

  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < n_samples_; ++i) {
    GraspAction a = GraspAction::from_vector(
        {batch.actions.at(i, 0), batch.actions.at(i, 1), batch.actions.at(i, 2),
         batch.actions.at(i, 3), batch.actions.at(i, 4)});
    if (pose_feasible(cfg, scene.gripper, a)) feasible.push_back(i);
  }
  const bool clipped = feasible.empty();
  if (clipped) {
    feasible.resize(n_samples_);
    for (std::size_t i = 0; i < n_samples_; ++i) feasible[i] = i;
  }

  Tensor conds(feasible.size(), cond.size());
  Tensor acts(feasible.size(), kActionDim);
  for (std::size_t q = 0; q < feasible.size(); ++q) {
    for (std::size_t j = 0; j < cond.size(); ++j) conds.at(q, j) = cond[j];
    for (std::size_t j = 0; j < kActionDim; ++j)
      acts.at(q, j) = batch.actions.at(feasible[q], j);
  }
  ++forward_batches;
  samples_scored += static_cast<long>(feasible.size());
  std::vector<double> values = critic_->predict(conds, acts);

  std::size_t best = 0;
  for (std::size_t q = 1; q < feasible.size(); ++q) {
    if (values[q] > values[best] ||
        (values[q] == values[best] &&
         batch.log_probs[feasible[q]] > batch.log_probs[feasible[best]]))
      best = q;
  }

  Decision d;
  GraspAction a = GraspAction::from_vector(
      {batch.actions.at(feasible[best], 0), batch.actions.at(feasible[best], 1),
       batch.actions.at(feasible[best], 2), batch.actions.at(feasible[best], 3),
       batch.actions.at(feasible[best], 4)});
  d.action = clipped ? clip_to_workspace(cfg, scene.gripper, a) : a;
  d.score = values[best];
  d.best_sample_value = values[best];
  d.zero_action_value = critic_->predict_one(cond, GraspAction().as_vector());
  return d;
}

bool ActorCriticPolicy::wants_close(const EpisodeConfig& ep,
                                    const Decision& d) const {
  return d.zero_action_value > ep.critic_termination_ratio * d.best_sample_value;
}

EpisodeResult run_episode(Policy& policy, const SceneConfig& cfg,
                          const EpisodeConfig& ep, PlanarScene scene,
                          EpisodeMode mode, Rng& rng) {
  EpisodeResult out;
  out.episode.id = 0;

  if (mode == EpisodeMode::kCollect) {
    const std::size_t n_steps = static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(ep.collect_min_steps),
        static_cast<std::int64_t>(ep.collect_max_steps)));
    for (std::size_t s = 0; s < n_steps; ++s) {
      EpisodeStep step;
      step.pose = scene.gripper;
      step.condition = condition_of(cfg, scene);
      Policy::Decision d = policy.decide(cfg, scene, rng);
      ++out.decisions;
      step.action = d.action;
      out.episode.steps.push_back(std::move(step));
      env_step(cfg, scene, d.action);
    }
    out.terminated_by = "scripted";
  } else {
    out.terminated_by = "max_steps";
    for (std::size_t s = 0; s < ep.max_steps; ++s) {
      EpisodeStep step;
      step.pose = scene.gripper;
      step.condition = condition_of(cfg, scene);
      Policy::Decision d = policy.decide(cfg, scene, rng);
      ++out.decisions;
      if (policy.wants_close(ep, d)) {
        // close immediately; the converged action is not executed
        out.terminated_by = "converged";
        break;
      }
      step.action = d.action;
      out.episode.steps.push_back(std::move(step));
      env_step(cfg, scene, d.action);
    }
  }

  out.episode.final_pose = scene.gripper;
  out.success = grasp_success(cfg, scene);
  out.episode.success = out.success;
  return out;
}

EpisodeLog run_logged_episode(Policy& policy, const SceneConfig& cfg,
                              const EpisodeConfig& ep, EpisodeMode mode,
                              std::uint64_t seed) {
  EpisodeLog log;
  log.seed = seed;
  log.mode = mode == EpisodeMode::kCollect ? "collect" : "evaluate";
  Rng rng(seed);
  log.initial_scene = scene_reset(cfg, rng);
  log.result = run_episode(policy, cfg, ep, log.initial_scene, mode, rng);
  return log;
}

nlohmann::json episode_log_to_json(const EpisodeLog& log) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : log.result.episode.steps) {
    steps.push_back({{"pose",
                      {{"x", s.pose.x},
                       {"y", s.pose.y},
                       {"z", s.pose.z},
                       {"theta", s.pose.theta}}},
                     {"action", s.action.as_vector()},
                     {"condition", s.condition}});
  }
  return {{"seed", log.seed},
          {"mode", log.mode},
          {"scene", scene_to_json(log.initial_scene)},
          {"steps", steps},
          {"final_pose",
           {{"x", log.result.episode.final_pose.x},
            {"y", log.result.episode.final_pose.y},
            {"z", log.result.episode.final_pose.z},
            {"theta", log.result.episode.final_pose.theta}}},
          {"success", log.result.success},
          {"terminated_by", log.result.terminated_by}};
}

InferenceStats measure_inference_time(Policy& policy, const SceneConfig& cfg,
                                      std::size_t n_decisions, Rng& rng) {
  const long batches0 = policy.forward_batches;
  const long samples0 = policy.samples_scored;
  double total = 0.0;
  for (std::size_t i = 0; i < n_decisions; ++i) {
    PlanarScene scene = scene_reset(cfg, rng);
    const auto t0 = std::chrono::steady_clock::now();
    (void)policy.decide(cfg, scene, rng);
    const auto t1 = std::chrono::steady_clock::now();
    total += std::chrono::duration<double>(t1 - t0).count();
  }
  InferenceStats st;
  st.decisions = n_decisions;
  st.mean_seconds_per_decision =
      n_decisions ? total / static_cast<double>(n_decisions) : 0.0;
  st.forward_batches = policy.forward_batches - batches0;
  st.samples_scored = policy.samples_scored - samples0;
  return st;
}

double evaluate_success_rate(Policy& policy, const SceneConfig& cfg,
                             const EpisodeConfig& ep, std::size_t episodes,
                             Rng& rng) {
  if (episodes == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < episodes; ++i) {
    PlanarScene scene = scene_reset(cfg, rng);
    EpisodeResult r =
        run_episode(policy, cfg, ep, std::move(scene), EpisodeMode::kEvaluate, rng);
    hits += static_cast<std::size_t>(r.success);
  }
  return static_cast<double>(hits) / static_cast<double>(episodes);
}

}  // namespace actorflow
