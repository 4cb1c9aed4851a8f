#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "actorflow/action.hpp"
#include "actorflow/rng.hpp"

namespace actorflow {

enum class ObjectClass { kBlock, kBottle };

ObjectClass object_class_from_string(const std::string& s);
std::string to_string(ObjectClass c);

struct SceneObject {
  double x = 0.0, y = 0.0;
  double phi = 0.0;         // orientation in (-pi, pi]
  double half_width = 0.1;  // graspable half-width
};

// Unit-square workspace in normalized units; 1 unit is 30 cm, which maps
// the 5 mm / 2 deg convergence thresholds onto concrete numbers.
struct SceneConfig {
  std::size_t object_count = 2;
  std::size_t max_objects = 2;
  ObjectClass object_class = ObjectClass::kBlock;

  // geometry, calibrated so a random policy lands near the target success
  // rates (blocks ~9%, bottles ~6%)
  double block_half_width = 0.30;
  double bottle_half_width_lo = 0.09;
  double bottle_half_width_hi = 0.13;
  double block_angle_tol = 15.0 * kPi / 180.0;
  double bottle_angle_tol = 0.5 * kPi;  // rotation-free grasp

  double z_max = 0.3;
  double z_tolerance = 0.5;  // covers the whole z range; z is vestigial here

  // action bounds (displacements)
  double max_dxy = 0.35;
  double max_dz = 0.15;
  double max_dtheta = 0.5 * kPi;

  std::size_t placement_retries = 200;

  std::size_t condition_dim() const { return 4 * max_objects + 3; }
};

struct PlanarScene {
  std::vector<SceneObject> objects;
  ObjectClass object_class = ObjectClass::kBlock;
  Pose gripper;
};

// Non-overlapping object placement plus a random gripper pose.
PlanarScene scene_reset(const SceneConfig& cfg, Rng& rng);

// Flattened task state: per object (nearest first) the pose relative to
// the gripper as (dx, dy, sin(phi-theta), cos(phi-theta)), zero-padded to
// max_objects, then gripper z and the class one-hot.
std::vector<double> condition_of(const SceneConfig& cfg,
                                 const PlanarScene& scene);

// Applies the displacement, clipping the pose into the workspace; z floors
// at the table.
void env_step(const SceneConfig& cfg, PlanarScene& scene,
              const GraspAction& action);

// 1 iff some object is within its graspable half-width of the gripper,
// the height is inside tolerance, and the angular misalignment modulo pi
// is inside the class tolerance (closed at the boundary).
int grasp_success(const SceneConfig& cfg, const PlanarScene& scene);

GraspAction random_action(const SceneConfig& cfg, Rng& rng);

double angle_tolerance(const SceneConfig& cfg, ObjectClass c);

// angular misalignment modulo pi (gripper symmetry)
double alignment_error(double theta, double phi);

nlohmann::json scene_to_json(const PlanarScene& scene);
PlanarScene scene_from_json(const nlohmann::json& j);

}  // namespace actorflow
