#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "rcpose/geom.hpp"
#include "rcpose/render.hpp"

namespace rcpose {

/// Interleaved 8-bit RGB. Carried through the pipeline for interface parity
/// with learned refiners; the classical implementations ignore it.
struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> pixels;
};

/// One frame of evidence: object mask, optional depth, camera. Depth may be
/// absent or all-zero; both mean "no depth measurement".
struct Observation {
  std::optional<ColorImage> rgb;
  MaskImage mask;
  std::optional<DepthImage> depth;
  CameraModel camera;

  /// True iff a depth image is present and carries at least one positive value.
  bool depth_available() const;
};

struct Hypothesis {
  Pose pose;
  double score = std::numeric_limits<double>::quiet_NaN();
};

/// Pose refiner abstraction (the role a learned refinement network plays).
/// Implementations must return the same count and order, keep poses finite,
/// and move a ground-truth input by no more than the declared tolerances.
class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual std::vector<Hypothesis> refine(std::vector<Hypothesis> hypotheses,
                                         const Observation& observation,
                                         const TriangleMesh& mesh) const = 0;
  virtual double step_tolerance_translation() const = 0;  // meters
  virtual double step_tolerance_rotation_deg() const = 0;
};

/// Hypothesis ranking abstraction. Scores must be deterministic; ties are
/// broken by the first maximal index.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(const std::vector<Hypothesis>& hypotheses,
                                    const Observation& observation,
                                    const TriangleMesh& mesh) const = 0;
};

/// Index of the first hypothesis whose score equals the maximum. Hypotheses
/// must be scored (at least one non-NaN score) and nonempty.
std::size_t best_index(const std::vector<Hypothesis>& hypotheses);
const Hypothesis& best(const std::vector<Hypothesis>& hypotheses);

/// Coarse translation from masked median depth and the mask centroid.
Eigen::Vector3d init_translation_from_depth(const Observation& observation);

/// One hypothesis per rotation, all sharing `translation`, scores NaN.
std::vector<Hypothesis> make_hypotheses(const RotationGrid& rotations,
                                        const Eigen::Vector3d& translation);

struct SilhouetteRefinerConfig {
  int rotation_rounds = 10;
  double rotation_step_deg = 2.5;
  /// Per-call clamp on the depth update: factor kept in [1-r, 1+r].
  double max_z_step_ratio = 0.2;
  /// When the observation carries valid depth, use the median-depth residual
  /// instead of the silhouette area ratio for the z update.
  bool use_depth = true;
};

/// Classical silhouette alignment standing in for a learned refiner:
/// (a) centroid alignment in x/y, (b) depth update from the rendered/observed
/// area ratio (or masked median depth residual when depth is available),
/// (c) greedy rotation hill-climb on silhouette IoU.
class SilhouetteRefiner : public Refiner {
 public:
  SilhouetteRefiner() = default;
  explicit SilhouetteRefiner(const SilhouetteRefinerConfig& config)
      : config_(config) {}

  std::vector<Hypothesis> refine(std::vector<Hypothesis> hypotheses,
                                 const Observation& observation,
                                 const TriangleMesh& mesh) const override;
  double step_tolerance_translation() const override { return 1e-6; }
  double step_tolerance_rotation_deg() const override { return 1e-6; }

  const SilhouetteRefinerConfig& config() const { return config_; }

 private:
  SilhouetteRefinerConfig config_;
};

struct SilhouetteScorerConfig {
  /// Weight of the normalized boundary chamfer penalty.
  double chamfer_weight = 0.1;
};

/// score = IoU(rendered, observed) - w * mean boundary distance / image
/// diagonal. Hypotheses that render empty score -inf.
class SilhouetteScorer : public Scorer {
 public:
  SilhouetteScorer() = default;
  explicit SilhouetteScorer(const SilhouetteScorerConfig& config)
      : config_(config) {}

  std::vector<double> score(const std::vector<Hypothesis>& hypotheses,
                            const Observation& observation,
                            const TriangleMesh& mesh) const override;

 private:
  SilhouetteScorerConfig config_;
};

}  // namespace rcpose
