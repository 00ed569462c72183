#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace posefuse {

class Rng;

inline constexpr std::size_t kNumKeypoints = 21;
inline constexpr std::size_t kNumPairs = kNumKeypoints * (kNumKeypoints - 1) / 2;
inline constexpr std::size_t kFeatureDim = kNumPairs * 2;

// Joint schema: 0 = wrist (root), then four joints per finger ordered
// base -> tip, fingers thumb -> little. Finger f (0 = thumb) occupies
// indices 1 + 4f .. 4 + 4f.
inline constexpr std::size_t kWristIndex = 0;
inline constexpr std::size_t kMiddleMcpIndex = 9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

using Keypoints2D = std::array<Point2, kNumKeypoints>;
using Keypoints3D = std::array<Point3, kNumKeypoints>;

/// 21 ordered 2D keypoints (pixels) with optional 3D keypoints (millimeters).
/// Always holds finite coordinates; construct through parse_pose or the
/// checked constructor.
class HandPose {
 public:
  HandPose(std::string id, const Keypoints2D& keypoints,
           std::optional<Keypoints3D> keypoints3d = std::nullopt);

  const std::string& id() const noexcept { return id_; }
  const Keypoints2D& keypoints() const noexcept { return keypoints_; }
  const std::optional<Keypoints3D>& keypoints3d() const noexcept { return keypoints3d_; }

  friend bool operator==(const HandPose&, const HandPose&) = default;

 private:
  std::string id_;
  Keypoints2D keypoints_;
  std::optional<Keypoints3D> keypoints3d_;
};

/// Pairwise keypoint differences: for i < j in lexicographic order,
/// (x_i - x_j) followed by (y_i - y_j).
struct PoseFeature {
  std::array<double, kFeatureDim> values{};
};

HandPose parse_pose(std::span<const std::array<double, 2>> raw, std::string id);
HandPose parse_pose(std::span<const std::array<double, 2>> raw,
                    std::span<const std::array<double, 3>> raw3d, std::string id);

PoseFeature extract_feature(const HandPose& pose);
PoseFeature extract_feature(const Keypoints2D& keypoints);

double l2_norm(const PoseFeature& feature);

/// Unit-L2 copy of the feature; throws DegeneratePose on a zero vector.
PoseFeature normalize_feature(const PoseFeature& feature);

/// Keypoints rotated about their centroid so the wrist -> middle-MCP vector
/// points along +y. Removes in-plane rotation while keeping every other
/// difference between poses; used for the index shortlist feature.
Keypoints2D canonical_orientation(const Keypoints2D& keypoints);

/// extract_feature of the canonically oriented keypoints (same L2 norm as
/// the plain feature).
PoseFeature oriented_feature(const HandPose& pose);

/// One line of a pose JSONL file. image/mask are optional per-pose asset
/// paths used by retrieval-driven compositing.
struct PoseRecord {
  HandPose pose;
  std::string image_path;
  std::string mask_path;
};

/// Reads {"id", "keypoints", "keypoints3d"?, "image"?, "mask"?} lines. Blank
/// lines are skipped. Errors carry the 1-based line number.
std::vector<PoseRecord> read_pose_records(const std::string& path);
std::vector<HandPose> read_poses(const std::string& path);

std::string pose_to_json_line(const HandPose& pose);
void write_poses(const std::string& path, std::span<const HandPose> poses);

/// Procedural 21-joint hand skeletons: random finger curl, abduction,
/// in-plane rotation, scale and placement. Stand-in for a simulator bank.
struct PoseSynthOptions {
  double max_rotation_rad = 0.6;
  double min_scale_px = 80.0;
  double max_scale_px = 160.0;
  double center_min_px = 150.0;
  double center_max_px = 350.0;
  double jitter_px = 1.0;
};

HandPose synthesize_pose(Rng& rng, std::string id, const PoseSynthOptions& options = {});
std::vector<HandPose> synthesize_bank(std::size_t n, std::uint64_t seed,
                                      const PoseSynthOptions& options = {});

}  // namespace posefuse
