#include "rcpose/geom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace rcpose {

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::inverse() const {
  const Eigen::Quaterniond qi = rotation.conjugate();
  return Pose(qi, qi * (-translation));
}

bool Pose::is_finite() const {
  return translation.allFinite() && rotation.coeffs().allFinite();
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation * b.rotation, a.rotation * b.translation + a.translation);
}

CameraModel::CameraModel(double fx, double fy, double cx, double cy, int width,
                         int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (fx <= 0.0 || fy <= 0.0) {
    throw std::invalid_argument("focal lengths must be positive");
  }
  if (cx <= 0.0 || cx >= width || cy <= 0.0 || cy >= height) {
    throw std::invalid_argument("principal point must lie inside the image");
  }
}

Eigen::Vector2d CameraModel::project(const Eigen::Vector3d& point) const {
  if (point.z() <= 0.0) throw NonPositiveDepth(point.z());
  return {fx_ * point.x() / point.z() + cx_, fy_ * point.y() / point.z() + cy_};
}

Eigen::Vector3d CameraModel::backproject(const Eigen::Vector2d& pixel,
                                         double z) const {
  if (z <= 0.0) throw NonPositiveDepth(z);
  return {z * (pixel.x() - cx_) / fx_, z * (pixel.y() - cy_) / fy_, z};
}

TriangleMesh::TriangleMesh(std::vector<Eigen::Vector3d> vertices,
                           std::vector<std::array<int, 3>> faces, double scale)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), scale_(scale) {
  if (scale_ <= 0.0) throw std::invalid_argument("mesh scale must be positive");
  const int n = static_cast<int>(vertices_.size());
  for (const auto& f : faces_) {
    for (int idx : f) {
      if (idx < 0 || idx >= n) throw std::out_of_range("face index out of range");
    }
  }
  double max_sq = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      max_sq = std::max(max_sq, (vertices_[i] - vertices_[j]).squaredNorm());
    }
  }
  base_diameter_ = std::sqrt(max_sq);
}

void TriangleMesh::set_scale(double s) {
  if (s <= 0.0) throw std::invalid_argument("mesh scale must be positive");
  scale_ = s;
}

TriangleMesh TriangleMesh::scaled(double s) const {
  TriangleMesh copy = *this;
  copy.set_scale(scale_ * s);
  return copy;
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open OBJ file: " + path);

  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed vertex line");
      }
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      std::string tok;
      int k = 0;
      while (ss >> tok) {
        if (k >= 3) {
          throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                   ": only triangular faces are supported");
        }
        // Accept i, i/t, i/t/n, i//n forms; only the vertex index is used.
        const std::size_t slash = tok.find('/');
        const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
        f[k++] = std::stoi(head) - 1;
      }
      if (k != 3) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": face needs exactly three indices");
      }
      faces.push_back(f);
    }
    // Any other leading token (vn, vt, usemtl, comments, ...) is ignored.
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

namespace {

struct IcoShape {
  std::vector<Eigen::Vector3d> vertices;  // unit length
  std::vector<std::array<int, 3>> faces;
};

IcoShape icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoShape s;
  s.vertices = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& v : s.vertices) v.normalize();
  s.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return s;
}

IcoShape subdivide(const IcoShape& in) {
  IcoShape out;
  out.vertices = in.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Eigen::Vector3d m = (out.vertices[a] + out.vertices[b]).normalized();
    const int idx = static_cast<int>(out.vertices.size());
    out.vertices.push_back(m);
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    const int ab = mid(f[0], f[1]);
    const int bc = mid(f[1], f[2]);
    const int ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

IcoShape icosphere_shape(int subdivisions) {
  IcoShape s = icosahedron();
  for (int i = 0; i < subdivisions; ++i) s = subdivide(s);
  return s;
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

TriangleMesh make_icosphere(double radius, int subdivisions) {
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  IcoShape s = icosphere_shape(subdivisions);
  std::vector<Eigen::Vector3d> vertices;
  vertices.reserve(s.vertices.size());
  for (const auto& v : s.vertices) vertices.push_back(radius * v);
  return TriangleMesh(std::move(vertices), std::move(s.faces));
}

RotationGrid sample_rotation_grid(int level) {
  RotationGrid grid;
  if (level <= 0) {
    grid.rotations.push_back(Eigen::Quaterniond::Identity());
    return grid;
  }
  const IcoShape shape = icosphere_shape(level);
  constexpr int kInPlane = 6;
  grid.rotations.reserve(shape.vertices.size() * kInPlane);
  for (const auto& dir : shape.vertices) {
    const Eigen::Quaterniond view =
        Eigen::Quaterniond::FromTwoVectors(dir, Eigen::Vector3d::UnitZ());
    for (int k = 0; k < kInPlane; ++k) {
      const double angle = 2.0 * M_PI * k / kInPlane;
      const Eigen::Quaterniond inplane(
          Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()));
      grid.rotations.push_back((inplane * view).normalized());
    }
  }
  return grid;
}

RotationGrid sample_rotations_near(const Eigen::Quaterniond& center, int count,
                                   double max_angle, std::uint32_t seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (max_angle <= 0.0 || max_angle > M_PI) {
    throw std::invalid_argument("max_angle must be in (0, pi]");
  }
  RotationGrid grid;
  grid.rotations.reserve(count);
  grid.rotations.push_back(center.normalized());
  for (int j = 1; j < count; ++j) {
    const std::uint64_t idx = static_cast<std::uint64_t>(seed) + j;
    const double u1 = halton(idx, 2);
    const double u2 = halton(idx, 3);
    const double u3 = halton(idx, 5);
    const double azimuth = 2.0 * M_PI * u1;
    const double cos_polar = 2.0 * u2 - 1.0;
    const double sin_polar = std::sqrt(std::max(0.0, 1.0 - cos_polar * cos_polar));
    const Eigen::Vector3d axis(sin_polar * std::cos(azimuth),
                               sin_polar * std::sin(azimuth), cos_polar);
    const double angle = max_angle * std::cbrt(u3);
    grid.rotations.push_back(
        (center * quat_exp(angle * axis)).normalized());
  }
  return grid;
}

double rotation_geodesic_rad(const Eigen::Quaterniond& a,
                             const Eigen::Quaterniond& b) {
  const double d = std::min(1.0, std::abs(a.dot(b)));
  return 2.0 * std::acos(d);
}

double rotation_geodesic_deg(const Eigen::Quaterniond& a,
                             const Eigen::Quaterniond& b) {
  return rad_to_deg(rotation_geodesic_rad(a, b));
}

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& rotvec) {
  const double theta = rotvec.norm();
  if (theta < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    return q.normalized();
  }
  const double half = 0.5 * theta;
  const Eigen::Vector3d axis = rotvec / theta;
  const double s = std::sin(half);
  return Eigen::Quaterniond(std::cos(half), s * axis.x(), s * axis.y(), s * axis.z());
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() *= -1.0;  // shortest arc
  const Eigen::Vector3d v(q.x(), q.y(), q.z());
  const double norm = v.norm();
  if (norm < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(norm, q.w());
  return angle * v / norm;
}

}  // namespace rcpose
