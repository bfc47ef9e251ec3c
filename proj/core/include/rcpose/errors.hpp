#pragma once

#include <stdexcept>
#include <string>

namespace rcpose {

/// Projection or backprojection was asked for a point at z <= 0.
struct NonPositiveDepth : std::runtime_error {
  explicit NonPositiveDepth(double z)
      : std::runtime_error("non-positive depth: z = " + std::to_string(z)) {}
};

/// A render covered no pixel (object behind the camera or outside the frustum).
struct EmptyRender : std::runtime_error {
  EmptyRender() : std::runtime_error("render produced an empty mask") {}
};

/// An operation requiring a non-empty mask was given an empty one.
struct EmptyMask : std::runtime_error {
  EmptyMask() : std::runtime_error("mask has no set pixels") {}
};

/// No masked pixel carries a positive depth measurement.
struct NoValidDepth : std::runtime_error {
  NoValidDepth() : std::runtime_error("no positive depth inside the mask") {}
};

/// An aggregate was asked for on an empty input list.
struct EmptyInput : std::runtime_error {
  explicit EmptyInput(const std::string& what)
      : std::runtime_error("empty input: " + what) {}
};

/// A vertex projected for a 2D metric lies at or behind the camera plane.
struct VertexBehindCamera : std::runtime_error {
  VertexBehindCamera() : std::runtime_error("vertex behind camera during projection") {}
};

}  // namespace rcpose
