#pragma once

#include <vector>

#include "actorflow/action.hpp"

namespace actorflow {

struct EpisodeStep {
  Pose pose;                      // gripper pose before the action
  std::vector<double> condition;  // observation at this pose
  GraspAction action;             // action actually executed
};

struct Episode {
  long id = 0;
  std::vector<EpisodeStep> steps;
  Pose final_pose;  // pose at which the gripper closed
  int success = 0;
};

// One transition per step: the relabeled action is the difference between
// the final grasping pose and the step's pose (azimuth difference in
// sine-cosine encoding), and the episode's success flag is broadcast to
// every step.
inline std::vector<Transition> relabel_episode(const Episode& ep) {
  if (ep.steps.empty())
    throw std::invalid_argument("relabel_episode: episode has no steps");
  std::vector<Transition> out;
  out.reserve(ep.steps.size());
  for (std::size_t i = 0; i < ep.steps.size(); ++i) {
    const EpisodeStep& s = ep.steps[i];
    const double dtheta = wrap_angle(ep.final_pose.theta - s.pose.theta);
    GraspAction a = GraspAction::from_angle(
        ep.final_pose.x - s.pose.x, ep.final_pose.y - s.pose.y,
        ep.final_pose.z - s.pose.z, dtheta);
    Transition t;
    t.condition = s.condition;
    t.action = a.as_array();
    t.success = ep.success;
    t.episode_id = ep.id;
    t.step_index = static_cast<int>(i);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace actorflow
