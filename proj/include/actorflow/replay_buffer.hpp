#pragma once

#include <deque>
#include <vector>

#include "actorflow/action.hpp"
#include "actorflow/rng.hpp"
#include "actorflow/tensor.hpp"

namespace actorflow {

// Bounded FIFO ring of transitions with a success-only view. Uniform
// sampling is without replacement over the requested view.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(Transition t);
  std::size_t size() const { return ring_.size(); }
  std::size_t success_count() const { return success_seq_.size(); }
  std::size_t capacity() const { return capacity_; }

  std::vector<Transition> sample(std::size_t n, bool success_only, Rng& rng) const;
  const Transition& at(std::size_t i) const { return ring_[i]; }

  // Packs a batch into model inputs.
  struct Batch {
    Tensor conditions;  // [n, C]
    Tensor actions;     // [n, kActionDim]
    std::vector<double> rewards;
  };
  static Batch pack(const std::vector<Transition>& batch);

 private:
  std::size_t capacity_;
  long next_seq_ = 0;  // sequence id of the next added transition
  std::deque<Transition> ring_;
  std::deque<long> success_seq_;  // sequence ids of stored successes
};

}  // namespace actorflow
