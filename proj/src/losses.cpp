#include "actorflow/losses.hpp"

#include <stdexcept>

#include "actorflow/replay_buffer.hpp"

namespace actorflow {

Value nll_loss(const DensityModel& model, Tape& tape, Binder& bind,
               const Tensor& conditions, const Tensor& actions) {
  if (conditions.rows() == 0)
    throw std::invalid_argument("nll_loss: empty batch");
  Value lp = model.log_prob(tape, bind, tape.input(conditions),
                            tape.input(actions));
  return tape.neg(tape.mean_all(lp));
}

Value nll_loss(const DensityModel& model, Tape& tape, Binder& bind,
               const std::vector<Transition>& batch) {
  for (const Transition& t : batch)
    if (!t.success)
      throw std::invalid_argument(
          "nll_loss: batch contains a failure transition (episode " +
          std::to_string(t.episode_id) + ", step " +
          std::to_string(t.step_index) + "); only successes are admissible");
  auto packed = ReplayBuffer::pack(batch);
  return nll_loss(model, tape, bind, packed.conditions, packed.actions);
}

Value entropy_regularized_loss(const DensityModel& model, Tape& tape,
                               Binder& bind, const Tensor& conditions,
                               const Tensor& actions,
                               const std::vector<double>& rewards,
                               double alpha, std::size_t entropy_samples,
                               Rng& rng) {
  const std::size_t n = conditions.rows();
  if (n == 0)
    throw std::invalid_argument("entropy_regularized_loss: empty batch");
  if (rewards.size() != n)
    throw std::invalid_argument("entropy_regularized_loss: reward count mismatch");
  if (alpha < 0.0)
    throw std::invalid_argument("entropy_regularized_loss: alpha must be >= 0");

  // log densities only for rewarded rows; zero-reward rows still count in
  // the normalizer
  std::vector<std::size_t> rewarded;
  for (std::size_t i = 0; i < n; ++i)
    if (rewards[i] != 0.0) rewarded.push_back(i);

  Value loss{};
  if (!rewarded.empty()) {
    Tensor c(rewarded.size(), conditions.cols());
    Tensor a(rewarded.size(), actions.cols());
    Tensor w(rewarded.size(), 1);
    for (std::size_t q = 0; q < rewarded.size(); ++q) {
      const std::size_t i = rewarded[q];
      for (std::size_t j = 0; j < conditions.cols(); ++j)
        c.at(q, j) = conditions.at(i, j);
      for (std::size_t j = 0; j < actions.cols(); ++j)
        a.at(q, j) = actions.at(i, j);
      w.values[q] = rewards[i];
    }
    Value lp = model.log_prob(tape, bind, tape.input(c), tape.input(a));
    loss = tape.scale(tape.sum_all(tape.mul(tape.input(w), lp)),
                      -1.0 / static_cast<double>(n));
  } else {
    loss = tape.input_scalar(0.0);
  }

  if (alpha > 0.0) {
    if (entropy_samples < 1)
      throw std::invalid_argument(
          "entropy_regularized_loss: entropy_samples must be >= 1 when alpha > 0");
    Value ent =
        model.entropy_term(tape, bind, conditions, entropy_samples, rng);
    loss = tape.add(loss, tape.scale(ent, alpha));
  }
  return loss;
}

Value entropy_regularized_loss(const DensityModel& model, Tape& tape,
                               Binder& bind,
                               const std::vector<Transition>& batch,
                               double alpha, std::size_t entropy_samples,
                               Rng& rng) {
  auto packed = ReplayBuffer::pack(batch);
  return entropy_regularized_loss(model, tape, bind, packed.conditions,
                                  packed.actions, packed.rewards, alpha,
                                  entropy_samples, rng);
}

}  // namespace actorflow
