#pragma once

#include <limits>
#include <memory>
#include <string>

#include <json.hpp>

#include "actorflow/cem.hpp"
#include "actorflow/critic.hpp"
#include "actorflow/density_model.hpp"
#include "actorflow/relabel.hpp"
#include "actorflow/scene.hpp"

namespace actorflow {

struct EpisodeConfig {
  std::size_t max_steps = 10;
  std::size_t collect_min_steps = 3;
  std::size_t collect_max_steps = 10;
  // convergence thresholds: 5 mm translation, 2 deg rotation
  double convergence_translation = 5.0 / 300.0;
  double convergence_rotation = 2.0 * kPi / 180.0;
  double critic_termination_ratio = 0.95;
};

// A grasping policy proposes one displacement per decision and owns its
// trial-termination rule.
class Policy {
 public:
  virtual ~Policy() = default;

  struct Decision {
    GraspAction action;
    double score = 0.0;  // policy-specific score of the chosen action
    double zero_action_value = std::numeric_limits<double>::quiet_NaN();
    double best_sample_value = std::numeric_limits<double>::quiet_NaN();
  };

  virtual Decision decide(const SceneConfig& cfg, const PlanarScene& scene,
                          Rng& rng) = 0;
  virtual bool wants_close(const EpisodeConfig& ep,
                           const Decision& d) const = 0;
  virtual std::string name() const = 0;

  // instrumentation: batched model-forward calls and individual scores
  long forward_batches = 0;
  long samples_scored = 0;
};

class RandomPolicy final : public Policy {
 public:
  Decision decide(const SceneConfig& cfg, const PlanarScene& scene,
                  Rng& rng) override;
  bool wants_close(const EpisodeConfig& ep, const Decision& d) const override;
  std::string name() const override { return "random"; }
};

// Samples n actions from the density model, discards kinematically
// infeasible ones (pose would leave the workspace) and executes the
// feasible sample with the highest log density. If every sample is
// infeasible, the best raw sample is clipped into the workspace.
class ActorPolicy final : public Policy {
 public:
  ActorPolicy(const DensityModel& model, std::size_t n_samples = 64)
      : model_(&model), n_samples_(n_samples) {}
  Decision decide(const SceneConfig& cfg, const PlanarScene& scene,
                  Rng& rng) override;
  bool wants_close(const EpisodeConfig& ep, const Decision& d) const override;
  std::string name() const override { return "actor"; }

 private:
  const DensityModel* model_;
  std::size_t n_samples_;
};

// Cross-entropy method over the 4-D displacement, scored by the critic.
class CemCriticPolicy final : public Policy {
 public:
  CemCriticPolicy(const CriticModel& critic, CemConfig cem)
      : critic_(&critic), cem_(std::move(cem)) {}
  Decision decide(const SceneConfig& cfg, const PlanarScene& scene,
                  Rng& rng) override;
  bool wants_close(const EpisodeConfig& ep, const Decision& d) const override;
  std::string name() const override { return "cem"; }

  static CemConfig default_grasp_cem(const SceneConfig& cfg);

 private:
  const CriticModel* critic_;
  CemConfig cem_;
};

// The actor proposes, the critic ranks; ties broken by higher actor
// density, then by lower sample index.
class ActorCriticPolicy final : public Policy {
 public:
  ActorCriticPolicy(const DensityModel& model, const CriticModel& critic,
                    std::size_t n_samples = 64)
      : model_(&model), critic_(&critic), n_samples_(n_samples) {}
  Decision decide(const SceneConfig& cfg, const PlanarScene& scene,
                  Rng& rng) override;
  bool wants_close(const EpisodeConfig& ep, const Decision& d) const override;
  std::string name() const override { return "actor_critic"; }

 private:
  const DensityModel* model_;
  const CriticModel* critic_;
  std::size_t n_samples_;
};

enum class EpisodeMode { kCollect, kEvaluate };

struct EpisodeResult {
  Episode episode;
  int success = 0;
  std::size_t decisions = 0;
  std::string terminated_by;  // scripted | converged | max_steps
};

// Collect mode: a scripted number of steps uniform in [collect_min_steps,
// collect_max_steps], then the gripper closes. Evaluate mode: steps until
// the policy's termination rule fires (the gripper closes immediately,
// without executing the converged action) or max_steps, then closes.
EpisodeResult run_episode(Policy& policy, const SceneConfig& cfg,
                          const EpisodeConfig& ep, PlanarScene scene,
                          EpisodeMode mode, Rng& rng);

// Episode log entry: everything needed to replay the trial bit-exactly.
struct EpisodeLog {
  std::uint64_t seed = 0;
  std::string mode;
  PlanarScene initial_scene;
  EpisodeResult result;
};

EpisodeLog run_logged_episode(Policy& policy, const SceneConfig& cfg,
                              const EpisodeConfig& ep, EpisodeMode mode,
                              std::uint64_t seed);

nlohmann::json episode_log_to_json(const EpisodeLog& log);

struct InferenceStats {
  double mean_seconds_per_decision = 0.0;
  long forward_batches = 0;
  long samples_scored = 0;
  std::size_t decisions = 0;
};

// Wall time and forward counts for single decisions on fresh scenes.
InferenceStats measure_inference_time(Policy& policy, const SceneConfig& cfg,
                                      std::size_t n_decisions, Rng& rng);

// Fraction of successful evaluate-mode episodes over fresh scenes.
double evaluate_success_rate(Policy& policy, const SceneConfig& cfg,
                             const EpisodeConfig& ep, std::size_t episodes,
                             Rng& rng);

}  // namespace actorflow
