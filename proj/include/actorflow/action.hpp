#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace actorflow {

inline constexpr double kPi = 3.14159265358979323846;

// wrap into (-pi, pi]
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

struct Pose {
  double x = 0.0, y = 0.0, z = 0.0;
  double theta = 0.0;  // azimuth in (-pi, pi]
};

// Top-down grasp displacement: translation plus azimuth change encoded as
// (sin, cos) so the angle has no wrap-around discontinuity. Construction
// normalizes the encoding onto the unit circle.
struct GraspAction {
  double dx = 0.0, dy = 0.0, dz = 0.0;
  double sin_dtheta = 0.0, cos_dtheta = 1.0;

  GraspAction() = default;
  GraspAction(double dx_, double dy_, double dz_, double s, double c)
      : dx(dx_), dy(dy_), dz(dz_) {
    const double norm = std::sqrt(s * s + c * c);
    if (!(norm > 0.0))
      throw std::invalid_argument("GraspAction: zero-length azimuth encoding");
    sin_dtheta = s / norm;
    cos_dtheta = c / norm;
  }

  static GraspAction from_angle(double dx, double dy, double dz,
                                double dtheta) {
    return GraspAction(dx, dy, dz, std::sin(dtheta), std::cos(dtheta));
  }

  static GraspAction from_vector(const std::vector<double>& v) {
    if (v.size() != 5)
      throw std::invalid_argument("GraspAction: expected 5 entries");
    return GraspAction(v[0], v[1], v[2], v[3], v[4]);
  }

  double dtheta() const { return std::atan2(sin_dtheta, cos_dtheta); }
  double translation_norm() const {
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  std::array<double, 5> as_array() const {
    return {dx, dy, dz, sin_dtheta, cos_dtheta};
  }
  std::vector<double> as_vector() const {
    return {dx, dy, dz, sin_dtheta, cos_dtheta};
  }
};

inline constexpr std::size_t kActionDim = 5;

// (condition, action, success) training sample from episode relabeling.
struct Transition {
  std::vector<double> condition;
  std::array<double, kActionDim> action{};
  int success = 0;
  long episode_id = 0;
  int step_index = 0;
};

}  // namespace actorflow
