#include "actorflow/replay_buffer.hpp"

#include <stdexcept>
#include <string>

namespace actorflow {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1)
    throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::add(Transition t) {
  if (ring_.size() == capacity_) {
    ring_.pop_front();
    const long evicted = next_seq_ - static_cast<long>(capacity_);
    while (!success_seq_.empty() && success_seq_.front() <= evicted)
      success_seq_.pop_front();
  }
  if (t.success) success_seq_.push_back(next_seq_);
  ring_.push_back(std::move(t));
  ++next_seq_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, bool success_only,
                                             Rng& rng) const {
  const long first_live = next_seq_ - static_cast<long>(ring_.size());
  std::vector<std::size_t> pool;
  if (success_only) {
    pool.reserve(success_seq_.size());
    for (long seq : success_seq_)
      pool.push_back(static_cast<std::size_t>(seq - first_live));
  } else {
    pool.resize(ring_.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  }
  if (n > pool.size())
    throw std::invalid_argument(
        "ReplayBuffer::sample: requested " + std::to_string(n) + " from " +
        std::to_string(pool.size()) +
        (success_only ? " stored successes" : " stored transitions"));

  // partial Fisher-Yates for without-replacement uniformity
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i),
                        static_cast<std::int64_t>(pool.size()) - 1));
    std::swap(pool[i], pool[j]);
    out.push_back(ring_[pool[i]]);
  }
  return out;
}

ReplayBuffer::Batch ReplayBuffer::pack(const std::vector<Transition>& batch) {
  if (batch.empty())
    throw std::invalid_argument("ReplayBuffer::pack: empty batch");
  const std::size_t n = batch.size();
  const std::size_t c = batch[0].condition.size();
  Batch out;
  out.conditions = Tensor(n, c);
  out.actions = Tensor(n, kActionDim);
  out.rewards.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (batch[r].condition.size() != c)
      throw std::invalid_argument("ReplayBuffer::pack: ragged condition widths");
    for (std::size_t j = 0; j < c; ++j)
      out.conditions.at(r, j) = batch[r].condition[j];
    for (std::size_t j = 0; j < kActionDim; ++j)
      out.actions.at(r, j) = batch[r].action[j];
    out.rewards[r] = batch[r].success ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace actorflow
