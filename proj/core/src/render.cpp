#include "rcpose/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace rcpose {

namespace {

struct ScreenVertex {
  double u, v;  // pixel coordinates
  double z;     // camera-space depth
};

// Clip a camera-space triangle against z >= kNearPlane (Sutherland-Hodgman).
// Returns 0..4 vertices.
int clip_near(const Eigen::Vector3d in[3], Eigen::Vector3d out[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d& p = in[i];
    const Eigen::Vector3d& q = in[(i + 1) % 3];
    const bool pin = p.z() >= kNearPlane;
    const bool qin = q.z() >= kNearPlane;
    if (pin) out[n++] = p;
    if (pin != qin) {
      const double t = (kNearPlane - p.z()) / (q.z() - p.z());
      out[n++] = p + t * (q - p);
    }
  }
  return n;
}

inline double edge_fn(const ScreenVertex& a, const ScreenVertex& b, double px,
                      double py) {
  return (b.u - a.u) * (py - a.v) - (b.v - a.v) * (px - a.u);
}

// Top-left ownership for boundary pixels, y growing downward: an edge owns
// its boundary if it is horizontal running +x (top) or runs -y (left).
inline bool owns_edge(const ScreenVertex& a, const ScreenVertex& b) {
  const double dx = b.u - a.u;
  const double dy = b.v - a.v;
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

void raster_triangle(ScreenVertex t0, ScreenVertex t1, ScreenVertex t2,
                     RenderResult& out) {
  MaskImage& mask = out.mask;
  DepthImage& depth = out.depth;
  // Orient so the doubled signed area is positive.
  double area2 = edge_fn(t0, t1, t2.u, t2.v);
  if (area2 == 0.0) return;
  if (area2 < 0.0) {
    std::swap(t1, t2);
    area2 = -area2;
  }

  const int w = mask.width, h = mask.height;
  const double min_u = std::min({t0.u, t1.u, t2.u});
  const double max_u = std::max({t0.u, t1.u, t2.u});
  const double min_v = std::min({t0.v, t1.v, t2.v});
  const double max_v = std::max({t0.v, t1.v, t2.v});
  const int x0 = std::max(0, static_cast<int>(std::floor(min_u - 0.5)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(max_u - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::floor(min_v - 0.5)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(max_v - 0.5)));
  if (x0 > x1 || y0 > y1) return;

  const bool own01 = owns_edge(t0, t1);
  const bool own12 = owns_edge(t1, t2);
  const bool own20 = owns_edge(t2, t0);
  const double iz0 = 1.0 / t0.z, iz1 = 1.0 / t1.z, iz2 = 1.0 / t2.z;

  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double w01 = edge_fn(t0, t1, px, py);  // weight of t2
      const double w12 = edge_fn(t1, t2, px, py);  // weight of t0
      const double w20 = edge_fn(t2, t0, px, py);  // weight of t1
      const bool inside = (w01 > 0.0 || (w01 == 0.0 && own01)) &&
                          (w12 > 0.0 || (w12 == 0.0 && own12)) &&
                          (w20 > 0.0 || (w20 == 0.0 && own20));
      if (!inside) continue;
      // Perspective-correct depth: 1/z interpolates linearly in screen space.
      const double iz = (w12 * iz0 + w20 * iz1 + w01 * iz2) / area2;
      if (iz <= 0.0) continue;
      const double z = 1.0 / iz;
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      const float fz = static_cast<float>(z);
      if (mask.bits[idx] == 0) {
        mask.bits[idx] = 1;
        depth.values[idx] = fz;
        ++out.area;
        out.x0 = std::min(out.x0, x);
        out.x1 = std::max(out.x1, x);
        out.y0 = std::min(out.y0, y);
        out.y1 = std::max(out.y1, y);
      } else if (fz < depth.values[idx]) {
        depth.values[idx] = fz;
      }
    }
  }
}

}  // namespace

RenderResult render(const TriangleMesh& mesh, const Pose& pose,
                    const CameraModel& camera) {
  RenderResult out;
  out.mask = MaskImage(camera.width(), camera.height());
  out.depth = DepthImage(camera.width(), camera.height());
  out.x0 = camera.width();
  out.y0 = camera.height();

  const auto& verts = mesh.vertices();
  const double s = mesh.scale();
  const Eigen::Matrix3d rot = pose.rotation.toRotationMatrix();
  std::vector<Eigen::Vector3d> cam(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    cam[i] = rot * (s * verts[i]) + pose.translation;
  }

  Eigen::Vector3d tri[3];
  Eigen::Vector3d clipped[4];
  for (const auto& f : mesh.faces()) {
    tri[0] = cam[f[0]];
    tri[1] = cam[f[1]];
    tri[2] = cam[f[2]];
    const int n = clip_near(tri, clipped);
    if (n < 3) continue;
    ScreenVertex sv[4];
    for (int i = 0; i < n; ++i) {
      sv[i].z = clipped[i].z();
      sv[i].u = camera.fx() * clipped[i].x() / clipped[i].z() + camera.cx();
      sv[i].v = camera.fy() * clipped[i].y() / clipped[i].z() + camera.cy();
    }
    for (int i = 1; i + 1 < n; ++i) {
      raster_triangle(sv[0], sv[i], sv[i + 1], out);
    }
  }
  if (out.area == 0) throw EmptyRender();
  return out;
}

std::int64_t mask_area(const MaskImage& mask) {
  std::int64_t n = 0;
  for (std::uint8_t b : mask.bits) n += (b != 0);
  return n;
}

Eigen::Vector2d mask_centroid(const MaskImage& mask) {
  std::int64_t n = 0;
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) throw EmptyMask();
  return {sx / n, sy / n};
}

double median_masked_depth(const DepthImage& depth, const MaskImage& mask) {
  if (mask_area(mask) == 0) throw EmptyMask();
  std::vector<float> vals;
  vals.reserve(256);
  const std::size_t total = mask.bits.size();
  for (std::size_t i = 0; i < total; ++i) {
    if (mask.bits[i] && depth.values[i] > 0.0f) vals.push_back(depth.values[i]);
  }
  if (vals.empty()) throw NoValidDepth();
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  double m = vals[mid];
  if (vals.size() % 2 == 0) {
    const auto lower = std::max_element(vals.begin(), vals.begin() + mid);
    m = 0.5 * (m + *lower);
  }
  return m;
}

double mask_iou(const MaskImage& a, const MaskImage& b) {
  std::int64_t inter = 0, uni = 0;
  const std::size_t n = a.bits.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool pa = a.bits[i] != 0;
    const bool pb = b.bits[i] != 0;
    inter += (pa && pb);
    uni += (pa || pb);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void write_pgm(const MaskImage& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<std::uint8_t> row(mask.width);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) row[x] = mask.at(x, y) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

MaskImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  int w, h, maxval;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 255 || w <= 0 || h <= 0) {
    throw std::runtime_error("not a supported P5 PGM: " + path);
  }
  in.get();  // single whitespace after header
  MaskImage mask(w, h);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), raw.size());
  if (!in) throw std::runtime_error("truncated PGM: " + path);
  for (std::size_t i = 0; i < raw.size(); ++i) mask.bits[i] = raw[i] >= 128 ? 1 : 0;
  return mask;
}

void write_depth_raw(const DepthImage& depth, const std::string& path) {
  static_assert(sizeof(float) == 4);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::uint32_t w = depth.width, h = depth.height;
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(depth.values.data()),
            depth.values.size() * sizeof(float));
  if (!out) throw std::runtime_error("write failed: " + path);
}

DepthImage read_depth_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::uint32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  DepthImage depth(static_cast<int>(w), static_cast<int>(h));
  in.read(reinterpret_cast<char*>(depth.values.data()),
          depth.values.size() * sizeof(float));
  if (!in) throw std::runtime_error("truncated depth file: " + path);
  return depth;
}

}  // namespace rcpose
