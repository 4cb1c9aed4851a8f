#pragma once

#include <vector>

#include "actorflow/action.hpp"
#include "actorflow/density_model.hpp"
#include "actorflow/rng.hpp"

namespace actorflow {

// Mean negative log density over (condition, action) rows.
Value nll_loss(const DensityModel& model, Tape& tape, Binder& bind,
               const Tensor& conditions, const Tensor& actions);

// Transition batch form; every transition must be a success (training on
// relabeled data uses successful grasps only).
Value nll_loss(const DensityModel& model, Tape& tape, Binder& bind,
               const std::vector<Transition>& batch);

// Reward-weighted NLL plus alpha * E_{a~pi}[log pi]:
//   -(1/N) sum_i r_i log pi(a_i|s_i) + alpha * entropy term.
// The first term averages over the whole behavior batch, failures included
// (they contribute zero weight but count in the normalizer); this is what
// makes the converged density proportional to exp(r/alpha). With an
// all-success batch and alpha = 0 this reduces exactly to nll_loss.
Value entropy_regularized_loss(const DensityModel& model, Tape& tape,
                               Binder& bind, const Tensor& conditions,
                               const Tensor& actions,
                               const std::vector<double>& rewards,
                               double alpha, std::size_t entropy_samples,
                               Rng& rng);

Value entropy_regularized_loss(const DensityModel& model, Tape& tape,
                               Binder& bind,
                               const std::vector<Transition>& batch,
                               double alpha, std::size_t entropy_samples,
                               Rng& rng);

}  // namespace actorflow
