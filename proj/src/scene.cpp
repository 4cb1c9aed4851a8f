#include "actorflow/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace actorflow {

ObjectClass object_class_from_string(const std::string& s) {
  if (s == "blocks") return ObjectClass::kBlock;
  if (s == "bottles") return ObjectClass::kBottle;
  throw std::invalid_argument("unknown object class: " + s +
                              " (expected blocks or bottles)");
}

std::string to_string(ObjectClass c) {
  return c == ObjectClass::kBlock ? "blocks" : "bottles";
}

double angle_tolerance(const SceneConfig& cfg, ObjectClass c) {
  return c == ObjectClass::kBlock ? cfg.block_angle_tol : cfg.bottle_angle_tol;
}

double alignment_error(double theta, double phi) {
  const double d = std::fabs(wrap_angle(theta - phi));
  return std::min(d, kPi - d);
}

PlanarScene scene_reset(const SceneConfig& cfg, Rng& rng) {
  if (cfg.object_count < 2)
    throw std::invalid_argument("scene_reset: scenes have at least 2 objects");
  if (cfg.object_count > cfg.max_objects)
    throw std::invalid_argument("scene_reset: object_count exceeds max_objects");

  PlanarScene scene;
  scene.object_class = cfg.object_class;
  for (std::size_t i = 0; i < cfg.object_count; ++i) {
    const double hw = cfg.object_class == ObjectClass::kBlock
                          ? cfg.block_half_width
                          : rng.uniform(cfg.bottle_half_width_lo,
                                        cfg.bottle_half_width_hi);
    bool placed = false;
    for (std::size_t attempt = 0; attempt < cfg.placement_retries; ++attempt) {
      SceneObject obj;
      obj.half_width = hw;
      obj.x = rng.uniform(hw, 1.0 - hw);
      obj.y = rng.uniform(hw, 1.0 - hw);
      obj.phi = rng.uniform(-kPi, kPi);
      bool overlaps = false;
      for (const auto& other : scene.objects) {
        const double dx = obj.x - other.x, dy = obj.y - other.y;
        if (std::sqrt(dx * dx + dy * dy) <= obj.half_width + other.half_width) {
          overlaps = true;
          break;
        }
      }
      if (!overlaps) {
        scene.objects.push_back(obj);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "scene_reset: could not place object " + std::to_string(i) +
          " without overlap after " + std::to_string(cfg.placement_retries) +
          " retries");
  }

  scene.gripper.x = rng.uniform(0.0, 1.0);
  scene.gripper.y = rng.uniform(0.0, 1.0);
  scene.gripper.z = rng.uniform(0.0, cfg.z_max);
  scene.gripper.theta = rng.uniform(-kPi, kPi);
  return scene;
}

std::vector<double> condition_of(const SceneConfig& cfg,
                                 const PlanarScene& scene) {
  std::vector<std::size_t> order(scene.objects.size());
  std::iota(order.begin(), order.end(), 0);
  const Pose& g = scene.gripper;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& oa = scene.objects[a];
    const auto& ob = scene.objects[b];
    const double da = (oa.x - g.x) * (oa.x - g.x) + (oa.y - g.y) * (oa.y - g.y);
    const double db = (ob.x - g.x) * (ob.x - g.x) + (ob.y - g.y) * (ob.y - g.y);
    return da < db;
  });

  std::vector<double> cond(cfg.condition_dim(), 0.0);
  for (std::size_t slot = 0; slot < order.size() && slot < cfg.max_objects;
       ++slot) {
    const SceneObject& obj = scene.objects[order[slot]];
    const double rel = wrap_angle(obj.phi - g.theta);
    cond[4 * slot + 0] = obj.x - g.x;
    cond[4 * slot + 1] = obj.y - g.y;
    cond[4 * slot + 2] = std::sin(rel);
    cond[4 * slot + 3] = std::cos(rel);
  }
  cond[4 * cfg.max_objects] = g.z;
  cond[4 * cfg.max_objects + 1] =
      scene.object_class == ObjectClass::kBlock ? 1.0 : 0.0;
  cond[4 * cfg.max_objects + 2] =
      scene.object_class == ObjectClass::kBottle ? 1.0 : 0.0;
  return cond;
}

void env_step(const SceneConfig& cfg, PlanarScene& scene,
              const GraspAction& action) {
  Pose& g = scene.gripper;
  g.x = std::clamp(g.x + action.dx, 0.0, 1.0);
  g.y = std::clamp(g.y + action.dy, 0.0, 1.0);
  g.z = std::clamp(g.z + action.dz, 0.0, cfg.z_max);
  g.theta = wrap_angle(g.theta + action.dtheta());
}

int grasp_success(const SceneConfig& cfg, const PlanarScene& scene) {
  const Pose& g = scene.gripper;
  if (std::fabs(g.z) > cfg.z_tolerance) return 0;
  const double tol = angle_tolerance(cfg, scene.object_class);
  for (const auto& obj : scene.objects) {
    const double dx = g.x - obj.x, dy = g.y - obj.y;
    if (std::sqrt(dx * dx + dy * dy) <= obj.half_width &&
        alignment_error(g.theta, obj.phi) <= tol)
      return 1;
  }
  return 0;
}

GraspAction random_action(const SceneConfig& cfg, Rng& rng) {
  return GraspAction::from_angle(rng.uniform(-cfg.max_dxy, cfg.max_dxy),
                                 rng.uniform(-cfg.max_dxy, cfg.max_dxy),
                                 rng.uniform(-cfg.max_dz, cfg.max_dz),
                                 rng.uniform(-cfg.max_dtheta, cfg.max_dtheta));
}

nlohmann::json scene_to_json(const PlanarScene& scene) {
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& o : scene.objects)
    objs.push_back({{"x", o.x}, {"y", o.y}, {"phi", o.phi},
                    {"half_width", o.half_width}});
  return {{"objects", objs},
          {"class", to_string(scene.object_class)},
          {"gripper",
           {{"x", scene.gripper.x},
            {"y", scene.gripper.y},
            {"z", scene.gripper.z},
            {"theta", scene.gripper.theta}}}};
}

PlanarScene scene_from_json(const nlohmann::json& j) {
  PlanarScene s;
  s.object_class = object_class_from_string(j.at("class").get<std::string>());
  for (const auto& o : j.at("objects")) {
    SceneObject obj;
    obj.x = o.at("x").get<double>();
    obj.y = o.at("y").get<double>();
    obj.phi = o.at("phi").get<double>();
    obj.half_width = o.at("half_width").get<double>();
    s.objects.push_back(obj);
  }
  const auto& g = j.at("gripper");
  s.gripper.x = g.at("x").get<double>();
  s.gripper.y = g.at("y").get<double>();
  s.gripper.z = g.at("z").get<double>();
  s.gripper.theta = g.at("theta").get<double>();
  return s;
}

}  // namespace actorflow
