#include "rcpose/hypo.hpp"

#include <algorithm>
#include <cmath>

namespace rcpose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform (Felzenszwalb & Huttenlocher).
void dt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
  static thread_local std::vector<int> v;
  static thread_local std::vector<double> z;
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

// Exact Euclidean distance (pixels) to the nearest boundary pixel of `mask`.
// Boundary pixels are set pixels with an unset 4-neighbor or on the border.
std::vector<double> boundary_distance_field(const MaskImage& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<double> grid(static_cast<std::size_t>(w) * h, kInf);
  bool any = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      const bool boundary = x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                            !mask.at(x - 1, y) || !mask.at(x + 1, y) ||
                            !mask.at(x, y - 1) || !mask.at(x, y + 1);
      if (boundary) {
        grid[static_cast<std::size_t>(y) * w + x] = 0.0;
        any = true;
      }
    }
  }
  if (!any) return grid;  // all infinite: caller handles
  std::vector<double> col(h), out_col(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col[y] = grid[static_cast<std::size_t>(y) * w + x];
    dt_1d(col, out_col, h);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = out_col[y];
  }
  std::vector<double> row(w), out_row(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) row[x] = grid[static_cast<std::size_t>(y) * w + x];
    dt_1d(row, out_row, w);
    for (int x = 0; x < w; ++x) {
      grid[static_cast<std::size_t>(y) * w + x] = std::sqrt(out_row[x]);
    }
  }
  return grid;
}

// IoU of a render against the observed mask, scanning only the render's
// bounding box (every intersection pixel lies inside it).
double iou_fast(const RenderResult& r, const MaskImage& obs,
                std::int64_t obs_area) {
  std::int64_t inter = 0;
  for (int y = r.y0; y <= r.y1; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * r.mask.width;
    for (int x = r.x0; x <= r.x1; ++x) {
      inter += (r.mask.bits[row + x] & obs.bits[row + x]);
    }
  }
  const std::int64_t uni = r.area + obs_area - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Eigen::Vector2d centroid_fast(const RenderResult& r) {
  double sx = 0.0, sy = 0.0;
  for (int y = r.y0; y <= r.y1; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * r.mask.width;
    for (int x = r.x0; x <= r.x1; ++x) {
      if (r.mask.bits[row + x]) {
        sx += x;
        sy += y;
      }
    }
  }
  return {sx / r.area, sy / r.area};
}

double median_rendered_depth(const RenderResult& r) {
  std::vector<float> vals;
  vals.reserve(r.area);
  for (int y = r.y0; y <= r.y1; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * r.mask.width;
    for (int x = r.x0; x <= r.x1; ++x) {
      if (r.mask.bits[row + x]) vals.push_back(r.depth.values[row + x]);
    }
  }
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  double m = vals[mid];
  if (vals.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(vals.begin(), vals.begin() + mid));
  }
  return m;
}

}  // namespace

bool Observation::depth_available() const {
  if (!depth) return false;
  for (float v : depth->values) {
    if (v > 0.0f) return true;
  }
  return false;
}

std::size_t best_index(const std::vector<Hypothesis>& hypotheses) {
  if (hypotheses.empty()) throw std::invalid_argument("no hypotheses");
  std::size_t best = hypotheses.size();
  double best_score = -kInf;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const double s = hypotheses[i].score;
    if (std::isnan(s)) continue;
    if (best == hypotheses.size() || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  if (best == hypotheses.size()) {
    throw std::invalid_argument("hypotheses are unscored");
  }
  return best;
}

const Hypothesis& best(const std::vector<Hypothesis>& hypotheses) {
  return hypotheses[best_index(hypotheses)];
}

Eigen::Vector3d init_translation_from_depth(const Observation& observation) {
  if (!observation.depth) throw NoValidDepth();
  const double z = median_masked_depth(*observation.depth, observation.mask);
  const Eigen::Vector2d c = mask_centroid(observation.mask);
  return observation.camera.backproject(c, z);
}

std::vector<Hypothesis> make_hypotheses(const RotationGrid& rotations,
                                        const Eigen::Vector3d& translation) {
  std::vector<Hypothesis> out;
  out.reserve(rotations.count());
  for (const auto& q : rotations.rotations) {
    out.push_back(Hypothesis{Pose(q, translation), std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

std::vector<Hypothesis> SilhouetteRefiner::refine(
    std::vector<Hypothesis> hypotheses, const Observation& observation,
    const TriangleMesh& mesh) const {
  const std::int64_t obs_area = mask_area(observation.mask);
  if (obs_area == 0) return hypotheses;  // nothing to align to
  const Eigen::Vector2d obs_centroid = mask_centroid(observation.mask);
  const CameraModel& cam = observation.camera;

  std::optional<double> obs_depth_median;
  if (config_.use_depth && observation.depth) {
    try {
      obs_depth_median = median_masked_depth(*observation.depth, observation.mask);
    } catch (const NoValidDepth&) {
      // zero-depth input: fall back to the silhouette area cue
    }
  }

  const double step = deg_to_rad(config_.rotation_step_deg);
  const Eigen::Vector3d axes[3] = {Eigen::Vector3d::UnitX(),
                                   Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ()};

  for (auto& h : hypotheses) {
    Pose pose = h.pose;
    RenderResult r;
    try {
      r = render(mesh, pose, cam);
    } catch (const EmptyRender&) {
      continue;  // scored -inf downstream
    }

    // (a) centroid alignment via backprojection at the current depth
    const Eigen::Vector2d rc = centroid_fast(r);
    const double z = pose.translation.z();
    pose.translation.x() += z * (obs_centroid.x() - rc.x()) / cam.fx();
    pose.translation.y() += z * (obs_centroid.y() - rc.y()) / cam.fy();

    // (b) depth update, clamped per call; the whole translation scales so the
    // object stays on its viewing ray
    double factor;
    if (obs_depth_median) {
      const double rend_median = median_rendered_depth(r);
      factor = (z + (*obs_depth_median - rend_median)) / z;
    } else {
      factor = std::sqrt(static_cast<double>(r.area) /
                         static_cast<double>(obs_area));
    }
    factor = std::clamp(factor, 1.0 - config_.max_z_step_ratio,
                        1.0 + config_.max_z_step_ratio);
    pose.translation *= factor;

    // (c) greedy rotation hill-climb on silhouette IoU
    if (config_.rotation_rounds > 0) {
      double cur_iou;
      try {
        cur_iou = iou_fast(render(mesh, pose, cam), observation.mask, obs_area);
      } catch (const EmptyRender&) {
        h.pose = pose;
        continue;
      }
      for (int round = 0; round < config_.rotation_rounds; ++round) {
        Eigen::Quaterniond best_q = pose.rotation;
        double best_iou = cur_iou;
        for (const auto& axis : axes) {
          for (const double sign : {1.0, -1.0}) {
            const Eigen::Quaterniond q =
                (quat_exp(sign * step * axis) * pose.rotation).normalized();
            double iou;
            try {
              iou = iou_fast(render(mesh, Pose(q, pose.translation), cam),
                             observation.mask, obs_area);
            } catch (const EmptyRender&) {
              continue;
            }
            if (iou > best_iou) {
              best_iou = iou;
              best_q = q;
            }
          }
        }
        if (best_iou <= cur_iou) break;
        pose.rotation = best_q;
        cur_iou = best_iou;
      }
    }
    h.pose = pose;
  }
  return hypotheses;
}

std::vector<double> SilhouetteScorer::score(
    const std::vector<Hypothesis>& hypotheses, const Observation& observation,
    const TriangleMesh& mesh) const {
  std::vector<double> scores(hypotheses.size(), -kInf);
  const std::int64_t obs_area = mask_area(observation.mask);
  if (obs_area == 0) return scores;

  const std::vector<double> dist = boundary_distance_field(observation.mask);
  const double diag = std::hypot(static_cast<double>(observation.mask.width),
                                 static_cast<double>(observation.mask.height));
  const int w = observation.mask.width, h = observation.mask.height;

  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    RenderResult r;
    try {
      r = render(mesh, hypotheses[i].pose, observation.camera);
    } catch (const EmptyRender&) {
      continue;
    }
    const double iou = iou_fast(r, observation.mask, obs_area);
    double chamfer_sum = 0.0;
    std::int64_t boundary_count = 0;
    for (int y = r.y0; y <= r.y1; ++y) {
      for (int x = r.x0; x <= r.x1; ++x) {
        if (!r.mask.at(x, y)) continue;
        const bool boundary = x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                              !r.mask.at(x - 1, y) || !r.mask.at(x + 1, y) ||
                              !r.mask.at(x, y - 1) || !r.mask.at(x, y + 1);
        if (boundary) {
          chamfer_sum += dist[static_cast<std::size_t>(y) * w + x];
          ++boundary_count;
        }
      }
    }
    const double chamfer =
        boundary_count > 0 ? chamfer_sum / boundary_count / diag : 0.0;
    scores[i] = iou - config_.chamfer_weight * chamfer;
  }
  return scores;
}

}  // namespace rcpose
