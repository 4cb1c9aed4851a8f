#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "actorflow/adam.hpp"
#include "actorflow/critic.hpp"
#include "actorflow/density_model.hpp"
#include "actorflow/losses.hpp"
#include "actorflow/policies.hpp"
#include "actorflow/replay_buffer.hpp"

namespace actorflow {

struct TrainConfig {
  std::size_t batch_size = 128;
  double alpha = 0.0;  // 0 disables the entropy term exactly
  std::size_t entropy_samples = 4;
  std::size_t total_steps = 3000;
  std::size_t eval_interval = 500;
  std::size_t eval_episodes = 200;
  AdamConfig adam;
};

struct CurvePoint {
  long step = 0;
  long env_steps = 0;
  double eval_success_rate = 0.0;
  double loss = 0.0;
  double entropy_estimate = 0.0;
};
using TrainingCurve = std::vector<CurvePoint>;

// Owns the optimizer for a density model and applies single loss steps.
class ActorTrainer {
 public:
  ActorTrainer(DensityModel& model, AdamConfig adam_cfg)
      : model_(&model), adam_(adam_cfg) {}

  double nll_step(const Tensor& conditions, const Tensor& actions);

  struct StepInfo {
    double loss = 0.0;
    double entropy_estimate = 0.0;  // E[log pi] estimate; 0 when alpha == 0
  };
  StepInfo entropy_step(const Tensor& conditions, const Tensor& actions,
                        const std::vector<double>& rewards, double alpha,
                        std::size_t entropy_samples, Rng& rng);

  Adam& adam() { return adam_; }
  DensityModel& model() { return *model_; }

 private:
  double apply(Value loss_value, Tape& tape, Binder& bind);

  DensityModel* model_;
  Adam adam_;
};

// Random-policy episode collection, relabeled into transitions.
std::vector<Transition> collect_random_dataset(const SceneConfig& cfg,
                                               const EpisodeConfig& ep,
                                               std::size_t episodes, Rng& rng,
                                               long episode_id_base = 0);

// Trains the actor on the success-only view of a fixed dataset by NLL and
// records periodic evaluation success rates. Throws if the dataset has no
// successes.
TrainingCurve off_policy_train(DensityModel& model,
                               const std::vector<Transition>& dataset,
                               const TrainConfig& train, const SceneConfig& cfg,
                               const EpisodeConfig& ep, std::uint64_t seed);

// Binary cross-entropy training of the critic on the full dataset
// (successes and failures).
double train_critic(CriticModel& critic,
                    const std::vector<Transition>& dataset, std::size_t steps,
                    std::size_t batch_size, Rng& rng);

struct OnPolicyConfig {
  TrainConfig train;
  std::size_t warmup_success_transitions = 2000;
  std::size_t episodes_per_cycle = 16;
  std::size_t train_steps_per_cycle = 32;
  std::size_t buffer_capacity = 100000;
  std::size_t max_env_steps = 200000;
  std::size_t eval_interval_env_steps = 4000;
  bool collect_with_model = true;  // false: random-collection baseline
  double success_threshold = 0.5;
  bool stop_at_threshold = false;
};

struct OnPolicyResult {
  TrainingCurve curve;
  long env_steps_to_threshold = -1;  // -1 when never crossed
  long total_env_steps = 0;
  long train_steps = 0;
};

// Warmup collects random episodes until the configured count of successful
// transitions is stored, then alternates collection (single model samples
// per step when collect_with_model) with entropy-regularized training on
// mixed batches from the buffer. Supports exact checkpoint and resume.
class OnPolicyTrainer {
 public:
  OnPolicyTrainer(DensityModel& model, SceneConfig scene_cfg,
                  EpisodeConfig ep_cfg, OnPolicyConfig cfg, std::uint64_t seed);

  OnPolicyResult run();

  nlohmann::json checkpoint() const;
  void restore(const nlohmann::json& j);

 private:
  void collect_episode(bool with_model);
  void maybe_eval();
  bool done() const;

  DensityModel* model_;
  SceneConfig scene_cfg_;
  EpisodeConfig ep_cfg_;
  OnPolicyConfig cfg_;
  std::uint64_t seed_;
  ActorTrainer trainer_;
  ReplayBuffer buffer_;
  Rng rng_;
  long env_steps_ = 0;
  long train_steps_ = 0;
  long episodes_ = 0;
  long next_eval_at_ = 0;
  bool warmed_up_ = false;
  double last_loss_ = 0.0;
  double last_entropy_ = 0.0;
  OnPolicyResult result_;
};

// On-policy fixed point on a 1-D bounded task: reward 1 inside
// [reward_lo, reward_hi], 0 elsewhere in the model's support. Returns the
// trained model's log densities at probe points.
struct BinaryReward1dResult {
  double log_prob_inside = 0.0;
  double log_prob_outside = 0.0;
  double density_ratio = 0.0;
};
BinaryReward1dResult train_binary_reward_1d(DensityModel& model,
                                            double reward_lo, double reward_hi,
                                            double probe_inside,
                                            double probe_outside, double alpha,
                                            std::size_t steps,
                                            std::size_t batch_size,
                                            std::size_t entropy_samples,
                                            AdamConfig adam_cfg, Rng& rng);

}  // namespace actorflow
