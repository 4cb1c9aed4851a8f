#include "actorflow/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actorflow/serialize.hpp"

namespace actorflow {

double ActorTrainer::apply(Value loss_value, Tape& tape, Binder& bind) {
  const double loss = tape.value(loss_value).values[0];
  tape.backward(loss_value);
  auto params = model_->parameters();
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (Tensor* p : params) grads.push_back(bind.grad(*p));
  adam_.step(params, grads);
  return loss;
}

double ActorTrainer::nll_step(const Tensor& conditions, const Tensor& actions) {
  Tape tape;
  Binder bind(tape);
  Value loss = nll_loss(*model_, tape, bind, conditions, actions);
  return apply(loss, tape, bind);
}

ActorTrainer::StepInfo ActorTrainer::entropy_step(
    const Tensor& conditions, const Tensor& actions,
    const std::vector<double>& rewards, double alpha,
    std::size_t entropy_samples, Rng& rng) {
  Tape tape;
  Binder bind(tape);
  StepInfo info;
  if (alpha > 0.0) {
    // build the entropy term separately so its estimate can be reported
    Value reward_term = entropy_regularized_loss(
        *model_, tape, bind, conditions, actions, rewards, 0.0, 0, rng);
    Value ent = model_->entropy_term(tape, bind, conditions, entropy_samples,
                                     rng);
    info.entropy_estimate = tape.value(ent).values[0];
    Value loss = tape.add(reward_term, tape.scale(ent, alpha));
    info.loss = apply(loss, tape, bind);
  } else {
    Value loss = entropy_regularized_loss(*model_, tape, bind, conditions,
                                          actions, rewards, 0.0, 0, rng);
    info.loss = apply(loss, tape, bind);
  }
  return info;
}

std::vector<Transition> collect_random_dataset(const SceneConfig& cfg,
                                               const EpisodeConfig& ep,
                                               std::size_t episodes, Rng& rng,
                                               long episode_id_base) {
  RandomPolicy policy;
  std::vector<Transition> out;
  for (std::size_t e = 0; e < episodes; ++e) {
    PlanarScene scene = scene_reset(cfg, rng);
    EpisodeResult r = run_episode(policy, cfg, ep, std::move(scene),
                                  EpisodeMode::kCollect, rng);
    r.episode.id = episode_id_base + static_cast<long>(e);
    auto transitions = relabel_episode(r.episode);
    out.insert(out.end(), transitions.begin(), transitions.end());
  }
  return out;
}

TrainingCurve off_policy_train(DensityModel& model,
                               const std::vector<Transition>& dataset,
                               const TrainConfig& train, const SceneConfig& cfg,
                               const EpisodeConfig& ep, std::uint64_t seed) {
  std::vector<Transition> successes;
  for (const Transition& t : dataset)
    if (t.success) successes.push_back(t);
  if (successes.empty())
    throw std::invalid_argument(
        "off_policy_train: dataset contains no successful transitions");

  Rng rng(derive_seed(seed, "off_policy"));
  ActorTrainer trainer(model, train.adam);
  ReplayBuffer pool(successes.size());
  for (auto& t : successes) pool.add(std::move(t));

  TrainingCurve curve;
  double running_loss = 0.0;
  for (std::size_t step = 1; step <= train.total_steps; ++step) {
    const std::size_t n = std::min(train.batch_size, pool.success_count());
    auto batch = pool.sample(n, true, rng);
    auto packed = ReplayBuffer::pack(batch);
    running_loss = trainer.nll_step(packed.conditions, packed.actions);
    if (train.eval_episodes > 0 &&
        (step % train.eval_interval == 0 || step == train.total_steps)) {
      ActorPolicy policy(model, 64);
      Rng eval_rng(derive_seed(seed, "eval/" + std::to_string(step)));
      CurvePoint p;
      p.step = static_cast<long>(step);
      p.env_steps = 0;
      p.eval_success_rate =
          evaluate_success_rate(policy, cfg, ep, train.eval_episodes, eval_rng);
      p.loss = running_loss;
      curve.push_back(p);
    }
  }
  return curve;
}

double train_critic(CriticModel& critic,
                    const std::vector<Transition>& dataset, std::size_t steps,
                    std::size_t batch_size, Rng& rng) {
  if (dataset.empty())
    throw std::invalid_argument("train_critic: empty dataset");
  ReplayBuffer pool(dataset.size());
  for (const auto& t : dataset) pool.add(t);
  double loss = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t n = std::min(batch_size, pool.size());
    auto batch = pool.sample(n, false, rng);
    auto packed = ReplayBuffer::pack(batch);
    loss = critic.train_step(packed.conditions, packed.actions, packed.rewards);
  }
  return loss;
}

OnPolicyTrainer::OnPolicyTrainer(DensityModel& model, SceneConfig scene_cfg,
                                 EpisodeConfig ep_cfg, OnPolicyConfig cfg,
                                 std::uint64_t seed)
    : model_(&model),
      scene_cfg_(scene_cfg),
      ep_cfg_(ep_cfg),
      cfg_(cfg),
      seed_(seed),
      trainer_(model, cfg.train.adam),
      buffer_(cfg.buffer_capacity),
      rng_(derive_seed(seed, "on_policy")),
      next_eval_at_(static_cast<long>(cfg.eval_interval_env_steps)) {}

void OnPolicyTrainer::collect_episode(bool with_model) {
  PlanarScene scene = scene_reset(scene_cfg_, rng_);
  EpisodeResult r;
  if (with_model) {
    ActorPolicy policy(*model_, 1);  // single model sample per step
    r = run_episode(policy, scene_cfg_, ep_cfg_, std::move(scene),
                    EpisodeMode::kCollect, rng_);
  } else {
    RandomPolicy policy;
    r = run_episode(policy, scene_cfg_, ep_cfg_, std::move(scene),
                    EpisodeMode::kCollect, rng_);
  }
  r.episode.id = episodes_++;
  for (auto& t : relabel_episode(r.episode)) {
    env_steps_++;
    buffer_.add(std::move(t));
  }
}

void OnPolicyTrainer::maybe_eval() {
  if (env_steps_ < next_eval_at_) return;
  next_eval_at_ += static_cast<long>(cfg_.eval_interval_env_steps);
  ActorPolicy policy(*model_, 64);
  Rng eval_rng(derive_seed(
      seed_, "eval/" + std::to_string(result_.curve.size())));
  CurvePoint p;
  p.step = train_steps_;
  p.env_steps = env_steps_;
  p.eval_success_rate = evaluate_success_rate(
      policy, scene_cfg_, ep_cfg_, cfg_.train.eval_episodes, eval_rng);
  p.loss = last_loss_;
  p.entropy_estimate = last_entropy_;
  result_.curve.push_back(p);
  if (result_.env_steps_to_threshold < 0 &&
      p.eval_success_rate >= cfg_.success_threshold)
    result_.env_steps_to_threshold = env_steps_;
}

bool OnPolicyTrainer::done() const {
  if (env_steps_ >= static_cast<long>(cfg_.max_env_steps)) return true;
  if (cfg_.stop_at_threshold && result_.env_steps_to_threshold >= 0) return true;
  return false;
}

OnPolicyResult OnPolicyTrainer::run() {
  // warmup: random collection until enough successful transitions
  while (!warmed_up_) {
    if (buffer_.success_count() >= cfg_.warmup_success_transitions ||
        env_steps_ >= static_cast<long>(cfg_.max_env_steps)) {
      warmed_up_ = true;
      break;
    }
    collect_episode(false);
    maybe_eval();
  }

  while (!done()) {
    for (std::size_t e = 0; e < cfg_.episodes_per_cycle && !done(); ++e)
      collect_episode(cfg_.collect_with_model);
    if (cfg_.train.total_steps > 0) {
      for (std::size_t t = 0; t < cfg_.train_steps_per_cycle; ++t) {
        const std::size_t n = std::min(cfg_.train.batch_size, buffer_.size());
        if (n == 0) break;
        auto batch = buffer_.sample(n, false, rng_);
        auto packed = ReplayBuffer::pack(batch);
        auto info = trainer_.entropy_step(packed.conditions, packed.actions,
                                          packed.rewards, cfg_.train.alpha,
                                          cfg_.train.entropy_samples, rng_);
        last_loss_ = info.loss;
        last_entropy_ = info.entropy_estimate;
        ++train_steps_;
      }
    }
    maybe_eval();
  }

  result_.total_env_steps = env_steps_;
  result_.train_steps = train_steps_;
  return result_;
}

nlohmann::json OnPolicyTrainer::checkpoint() const {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model"] = model_->to_json();
  j["adam"] = adam_to_json(const_cast<OnPolicyTrainer*>(this)->trainer_.adam());
  j["rng"] = rng_.serialize();
  j["env_steps"] = env_steps_;
  j["train_steps"] = train_steps_;
  j["episodes"] = episodes_;
  j["next_eval_at"] = next_eval_at_;
  j["warmed_up"] = warmed_up_;
  j["last_loss"] = last_loss_;
  j["last_entropy"] = last_entropy_;
  j["env_steps_to_threshold"] = result_.env_steps_to_threshold;
  Json curve = Json::array();
  for (const auto& p : result_.curve)
    curve.push_back({{"step", p.step},
                     {"env_steps", p.env_steps},
                     {"eval_success_rate", p.eval_success_rate},
                     {"loss", p.loss},
                     {"entropy_estimate", p.entropy_estimate}});
  j["curve"] = curve;
  Json buf = Json::array();
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    const Transition& t = buffer_.at(i);
    buf.push_back({{"condition", t.condition},
                   {"action", t.action},
                   {"success", t.success},
                   {"episode_id", t.episode_id},
                   {"step_index", t.step_index}});
  }
  j["buffer"] = buf;
  j["buffer_capacity"] = buffer_.capacity();
  return j;
}

void OnPolicyTrainer::restore(const nlohmann::json& j) {
  *model_ = DensityModel::from_json(j.at("model"));
  Adam adam;
  adam_from_json(j.at("adam"), adam);
  trainer_ = ActorTrainer(*model_, adam.config());
  trainer_.adam() = std::move(adam);
  rng_.deserialize(j.at("rng").get<std::string>());
  env_steps_ = j.at("env_steps").get<long>();
  train_steps_ = j.at("train_steps").get<long>();
  episodes_ = j.at("episodes").get<long>();
  next_eval_at_ = j.at("next_eval_at").get<long>();
  warmed_up_ = j.at("warmed_up").get<bool>();
  last_loss_ = j.at("last_loss").get<double>();
  last_entropy_ = j.at("last_entropy").get<double>();
  result_ = OnPolicyResult{};
  result_.env_steps_to_threshold = j.at("env_steps_to_threshold").get<long>();
  for (const auto& p : j.at("curve")) {
    CurvePoint c;
    c.step = p.at("step").get<long>();
    c.env_steps = p.at("env_steps").get<long>();
    c.eval_success_rate = p.at("eval_success_rate").get<double>();
    c.loss = p.at("loss").get<double>();
    c.entropy_estimate = p.at("entropy_estimate").get<double>();
    result_.curve.push_back(c);
  }
  buffer_ = ReplayBuffer(j.at("buffer_capacity").get<std::size_t>());
  for (const auto& e : j.at("buffer")) {
    Transition t;
    t.condition = e.at("condition").get<std::vector<double>>();
    auto act = e.at("action").get<std::vector<double>>();
    std::copy(act.begin(), act.end(), t.action.begin());
    t.success = e.at("success").get<int>();
    t.episode_id = e.at("episode_id").get<long>();
    t.step_index = e.at("step_index").get<int>();
    buffer_.add(std::move(t));
  }
}

BinaryReward1dResult train_binary_reward_1d(
    DensityModel& model, double reward_lo, double reward_hi,
    double probe_inside, double probe_outside, double alpha, std::size_t steps,
    std::size_t batch_size, std::size_t entropy_samples, AdamConfig adam_cfg,
    Rng& rng) {
  if (model.action_dim() != 1 || model.condition_dim() != 0)
    throw std::invalid_argument(
        "train_binary_reward_1d: expects an unconditional 1-D model");
  ActorTrainer trainer(model, adam_cfg);
  const std::vector<double> no_cond;
  for (std::size_t s = 0; s < steps; ++s) {
    SampleBatch batch = model.sample(rng, no_cond, batch_size);
    Tensor conds(batch_size, 0);
    std::vector<double> rewards(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      const double a = batch.actions.values[i];
      rewards[i] = (a >= reward_lo && a <= reward_hi) ? 1.0 : 0.0;
    }
    trainer.entropy_step(conds, batch.actions, rewards, alpha, entropy_samples,
                         rng);
  }
  Tensor probes(2, 1, {probe_inside, probe_outside});
  auto lp = model.log_prob_values(Tensor(2, 0), probes);
  BinaryReward1dResult out;
  out.log_prob_inside = lp[0];
  out.log_prob_outside = lp[1];
  out.density_ratio = std::exp(lp[0] - lp[1]);
  return out;
}

}  // namespace actorflow
