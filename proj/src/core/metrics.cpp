#include "posefuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "posefuse/error.hpp"

namespace posefuse {

std::vector<double> keypoint_distances(const PredictionSet& set) {
  if (set.predicted.empty()) throw Error(ErrorCode::EmptySet, "prediction set is empty");
  if (set.predicted.size() != set.ground_truth.size()) {
    throw Error(ErrorCode::DimMismatch, "prediction and ground-truth counts differ");
  }
  std::vector<double> d;
  d.reserve(set.predicted.size() * kNumKeypoints);
  for (std::size_t p = 0; p < set.predicted.size(); ++p) {
    const HandPose& a = set.predicted[p];
    const HandPose& b = set.ground_truth[p];
    if (set.space == MetricSpace::Millimeters3D) {
      if (!a.keypoints3d() || !b.keypoints3d()) {
        throw Error(ErrorCode::Missing3D, "pose '" + a.id() + "' has no 3D keypoints");
      }
      for (std::size_t j = 0; j < kNumKeypoints; ++j) {
        const Point3& u = (*a.keypoints3d())[j];
        const Point3& v = (*b.keypoints3d())[j];
        const double dx = u.x - v.x, dy = u.y - v.y, dz = u.z - v.z;
        d.push_back(std::sqrt(dx * dx + dy * dy + dz * dz));
      }
    } else {
      for (std::size_t j = 0; j < kNumKeypoints; ++j) {
        const Point2& u = a.keypoints()[j];
        const Point2& v = b.keypoints()[j];
        d.push_back(std::hypot(u.x - v.x, u.y - v.y));
      }
    }
  }
  return d;
}

EpeSummary epe_from_distances(std::span<const double> distances) {
  if (distances.empty()) throw Error(ErrorCode::EmptySet, "no distances");
  EpeSummary s;
  double sum = 0.0;
  for (double v : distances) sum += v;
  s.mean = sum / static_cast<double>(distances.size());
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

EpeSummary epe(const PredictionSet& set) { return epe_from_distances(keypoint_distances(set)); }

double pck_from_distances(std::span<const double> distances, double threshold) {
  if (distances.empty()) throw Error(ErrorCode::EmptySet, "no distances");
  if (!(threshold >= 0.0)) throw Error(ErrorCode::BadRange, "PCK threshold must be >= 0");
  std::size_t hits = 0;
  for (double v : distances) hits += v <= threshold ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(distances.size());
}

double pck(const PredictionSet& set, double threshold) {
  if (!(threshold >= 0.0)) throw Error(ErrorCode::BadRange, "PCK threshold must be >= 0");
  return pck_from_distances(keypoint_distances(set), threshold);
}

PckCurve pck_curve_from_distances(std::span<const double> distances, double t_min, double t_max,
                                  std::size_t steps) {
  if (!(t_min >= 0.0) || !(t_max > t_min) || !std::isfinite(t_max) || steps < 2) {
    throw Error(ErrorCode::BadRange, "curve needs 0 <= t_min < t_max and steps >= 2");
  }
  if (distances.empty()) throw Error(ErrorCode::EmptySet, "no distances");
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  PckCurve c;
  c.thresholds.resize(steps);
  c.values.resize(steps);
  const double width = (t_max - t_min) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = i + 1 == steps ? t_max : t_min + width * static_cast<double>(i);
    c.thresholds[i] = t;
    const auto hits = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    c.values[i] = static_cast<double>(hits) / n;
  }
  double area = 0.0;
  for (std::size_t i = 1; i < steps; ++i) {
    area += 0.5 * (c.values[i] + c.values[i - 1]) * (c.thresholds[i] - c.thresholds[i - 1]);
  }
  c.auc = std::clamp(area / (t_max - t_min), 0.0, 1.0);
  return c;
}

PckCurve pck_curve(const PredictionSet& set, double t_min, double t_max, std::size_t steps) {
  if (!(t_min >= 0.0) || !(t_max > t_min) || !std::isfinite(t_max) || steps < 2) {
    throw Error(ErrorCode::BadRange, "curve needs 0 <= t_min < t_max and steps >= 2");
  }
  return pck_curve_from_distances(keypoint_distances(set), t_min, t_max, steps);
}

HandPose stb_root_convert(const HandPose& pose, StbRootMode mode) {
  if (!pose.keypoints3d()) throw Error(ErrorCode::Missing3D, "pose '" + pose.id() + "' has no 3D keypoints");
  Keypoints3D kp = *pose.keypoints3d();
  const Point3 palm = kp[kWristIndex];
  const Point3 mcp = kp[kMiddleMcpIndex];
  const Point3 v{palm.x - mcp.x, palm.y - mcp.y, palm.z - mcp.z};
  const Point3 base = mode == StbRootMode::FromMcp ? mcp : palm;
  kp[kWristIndex] = {base.x + 2.0 * v.x, base.y + 2.0 * v.y, base.z + 2.0 * v.z};
  return HandPose(pose.id(), pose.keypoints(), kp);
}

}  // namespace posefuse
