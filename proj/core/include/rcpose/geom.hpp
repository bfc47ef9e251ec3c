#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rcpose/errors.hpp"

namespace rcpose {

/// Rigid transform in SE(3). Rotation is kept as a unit quaternion,
/// translation is in meters, camera frame.
struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Pose() = default;
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
      : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return Pose{}; }

  Eigen::Matrix4d matrix() const;
  Pose inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
  bool is_finite() const;
};

/// Matrix product of the 4x4 forms.
Pose compose(const Pose& a, const Pose& b);
inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

/// Pinhole intrinsics plus image dimensions.
class CameraModel {
 public:
  CameraModel() : CameraModel(600.0, 600.0, 320.0, 240.0, 640, 480) {}
  CameraModel(double fx, double fy, double cx, double cy, int width, int height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }

  /// u = fx*x/z + cx, v = fy*y/z + cy. Throws NonPositiveDepth if z <= 0.
  Eigen::Vector2d project(const Eigen::Vector3d& point) const;
  /// x = z*(u - cx)/fx, y = z*(v - cy)/fy. Throws NonPositiveDepth if z <= 0.
  Eigen::Vector3d backproject(const Eigen::Vector2d& pixel, double z) const;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

/// Vertex/face soup with a uniform scale multiplier. Vertices are meters in
/// the object frame; the scale is applied before posing.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Eigen::Vector3d> vertices,
               std::vector<std::array<int, 3>> faces, double scale = 1.0);

  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }

  double scale() const { return scale_; }
  void set_scale(double s);
  /// Copy with the scale multiplied by s.
  TriangleMesh scaled(double s) const;

  /// Max pairwise vertex distance times the current scale.
  double diameter() const { return scale_ * base_diameter_; }

  Eigen::Vector3d scaled_vertex(std::size_t i) const {
    return scale_ * vertices_[i];
  }
  bool empty() const { return faces_.empty(); }

 private:
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<std::array<int, 3>> faces_;
  double scale_ = 1.0;
  double base_diameter_ = 0.0;
};

/// ASCII OBJ subset: `v x y z` and `f i j k` lines (1-based, triangles only).
/// Lines starting with any other token are ignored. Face tokens may carry
/// `/texture/normal` suffixes, which are dropped.
TriangleMesh load_obj(const std::string& path);

/// Icosphere mesh: an icosahedron subdivided `subdivisions` times, vertices
/// pushed to the given radius.
TriangleMesh make_icosphere(double radius, int subdivisions);

/// Deterministic set of unit quaternions used as pose hypotheses.
struct RotationGrid {
  std::vector<Eigen::Quaterniond> rotations;
  std::size_t count() const { return rotations.size(); }
};

/// Grid level used for initial registration: 42 icosphere viewpoints times
/// 6 in-plane rotations = 252 hypotheses.
inline constexpr int kRegistrationGridLevel = 1;

/// level <= 0 yields the identity rotation only. Level k >= 1 places viewing
/// directions on an icosahedron subdivided k times (42 vertices at k = 1) and
/// combines each with 6 in-plane rotations at 60 degree spacing.
RotationGrid sample_rotation_grid(int level);

/// `count` rotations within `max_angle` (radians, geodesic) of `center`.
/// Element 0 is `center` itself; the rest come from a Halton sequence mapped
/// into the axis-angle ball, offset by `seed`.
RotationGrid sample_rotations_near(const Eigen::Quaterniond& center, int count,
                                   double max_angle, std::uint32_t seed);

/// Geodesic angle 2*acos(|<a,b>|), degrees in [0, 180].
double rotation_geodesic_deg(const Eigen::Quaterniond& a,
                             const Eigen::Quaterniond& b);
double rotation_geodesic_rad(const Eigen::Quaterniond& a,
                             const Eigen::Quaterniond& b);

/// Exponential map: rotation vector (radians) to unit quaternion.
Eigen::Quaterniond quat_exp(const Eigen::Vector3d& rotvec);
/// Log map inverse of quat_exp; returns the shortest rotation vector.
Eigen::Vector3d quat_log(const Eigen::Quaterniond& q);

constexpr double deg_to_rad(double d) { return d * M_PI / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / M_PI; }

}  // namespace rcpose
