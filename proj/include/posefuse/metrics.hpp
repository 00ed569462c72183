#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "posefuse/pose.hpp"

namespace posefuse {

enum class MetricSpace { Pixels2D, Millimeters3D };

/// Aligned (prediction, ground truth) pairs in one space. 3D requires
/// keypoints3d on both sides.
struct PredictionSet {
  std::vector<HandPose> predicted;
  std::vector<HandPose> ground_truth;
  MetricSpace space = MetricSpace::Pixels2D;
};

/// Per-keypoint Euclidean distances pooled over all pairs, pair-major.
/// Errors: EmptySet, DimMismatch (pair counts), Missing3D.
std::vector<double> keypoint_distances(const PredictionSet& set);

struct EpeSummary {
  double mean = 0.0;
  double median = 0.0;
};

EpeSummary epe(const PredictionSet& set);
EpeSummary epe_from_distances(std::span<const double> distances);

/// Fraction of pooled keypoints with distance <= threshold.
/// Errors: EmptySet, BadRange (negative or non-finite threshold).
double pck(const PredictionSet& set, double threshold);
double pck_from_distances(std::span<const double> distances, double threshold);

struct PckCurve {
  std::vector<double> thresholds;
  std::vector<double> values;
  double auc = 0.0;  ///< trapezoid area / (t_max - t_min)
};

/// `steps` evenly spaced thresholds including both ends.
/// Errors: BadRange (t_min < 0, t_max <= t_min, steps < 2), EmptySet.
PckCurve pck_curve(const PredictionSet& set, double t_min, double t_max, std::size_t steps);
PckCurve pck_curve_from_distances(std::span<const double> distances, double t_min, double t_max,
                                  std::size_t steps);

/// Which way the palm/MCP vector is doubled when moving the palm root to the wrist.
enum class StbRootMode {
  FromMcp,   ///< root = mcp + 2 (palm - mcp) = 2 palm - mcp
  FromPalm,  ///< root = palm + 2 (palm - mcp) = 3 palm - 2 mcp
};

/// Replaces 3D keypoint 0 (palm centre in STB) with the wrist estimate; 2D
/// keypoints and every other joint are untouched. Throws Missing3D.
HandPose stb_root_convert(const HandPose& pose, StbRootMode mode = StbRootMode::FromMcp);

}  // namespace posefuse
