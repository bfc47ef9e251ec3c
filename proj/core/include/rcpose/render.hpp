#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcpose/geom.hpp"

namespace rcpose {

/// Binary occupancy image, row-major, one byte per pixel (0 or 1).
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  MaskImage() = default;
  MaskImage(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { bits[static_cast<std::size_t>(y) * width + x] = v; }
};

/// Depth in meters, row-major floats; 0 means "no measurement".
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0f) {}

  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, float v) { values[static_cast<std::size_t>(y) * width + x] = v; }
};

struct RenderResult {
  MaskImage mask;
  DepthImage depth;
  /// Covered-pixel count and inclusive bounding box (valid when area > 0).
  std::int64_t area = 0;
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
};

/// Fragments closer than this are clipped (meters).
inline constexpr double kNearPlane = 0.01;

/// Z-buffer rasterization of the posed mesh. Pixel-center sampling with
/// top-left tie ownership, no anti-aliasing, back-face culling disabled.
/// Mask pixels are set iff a triangle covers the pixel center beyond the
/// near plane; depth holds the minimum covering z.
/// Throws EmptyRender if no pixel is covered.
RenderResult render(const TriangleMesh& mesh, const Pose& pose,
                    const CameraModel& camera);

std::int64_t mask_area(const MaskImage& mask);

/// Mean of set-pixel integer coordinates (x, y). Throws EmptyMask.
Eigen::Vector2d mask_centroid(const MaskImage& mask);

/// Median depth over masked pixels with positive depth; even counts average
/// the two middle values. Throws EmptyMask / NoValidDepth.
double median_masked_depth(const DepthImage& depth, const MaskImage& mask);

/// Intersection-over-union of two same-sized masks. Empty union yields 0.
double mask_iou(const MaskImage& a, const MaskImage& b);

/// Binary PGM (P5), 0 = background, 255 = object.
void write_pgm(const MaskImage& mask, const std::string& path);
MaskImage read_pgm(const std::string& path);

/// Raw little-endian float32 with an 8-byte header (width, height as u32).
void write_depth_raw(const DepthImage& depth, const std::string& path);
DepthImage read_depth_raw(const std::string& path);

}  // namespace rcpose
