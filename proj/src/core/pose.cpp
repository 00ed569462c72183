#include "posefuse/pose.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"

namespace posefuse {

namespace {

void check_finite(const Keypoints2D& kp, const std::string& id) {
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    if (!std::isfinite(kp[i].x) || !std::isfinite(kp[i].y)) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "pose '" + id + "' keypoint " + std::to_string(i) + " is not finite");
    }
  }
}

void check_finite(const Keypoints3D& kp, const std::string& id) {
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    if (!std::isfinite(kp[i].x) || !std::isfinite(kp[i].y) || !std::isfinite(kp[i].z)) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "pose '" + id + "' 3D keypoint " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

HandPose::HandPose(std::string id, const Keypoints2D& keypoints,
                   std::optional<Keypoints3D> keypoints3d)
    : id_(std::move(id)), keypoints_(keypoints), keypoints3d_(std::move(keypoints3d)) {
  check_finite(keypoints_, id_);
  if (keypoints3d_) check_finite(*keypoints3d_, id_);
}

HandPose parse_pose(std::span<const std::array<double, 2>> raw, std::string id) {
  return parse_pose(raw, {}, std::move(id));
}

HandPose parse_pose(std::span<const std::array<double, 2>> raw,
                    std::span<const std::array<double, 3>> raw3d, std::string id) {
  if (raw.size() != kNumKeypoints) {
    throw Error(ErrorCode::WrongKeypointCount, "pose '" + id + "' has " +
                                                   std::to_string(raw.size()) +
                                                   " keypoints, expected 21");
  }
  Keypoints2D kp;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) kp[i] = {raw[i][0], raw[i][1]};

  std::optional<Keypoints3D> kp3;
  if (!raw3d.empty()) {
    if (raw3d.size() != kNumKeypoints) {
      throw Error(ErrorCode::WrongKeypointCount, "pose '" + id + "' has " +
                                                     std::to_string(raw3d.size()) +
                                                     " 3D keypoints, expected 21");
    }
    Keypoints3D k3;
    for (std::size_t i = 0; i < kNumKeypoints; ++i) k3[i] = {raw3d[i][0], raw3d[i][1], raw3d[i][2]};
    kp3 = k3;
  }
  return HandPose(std::move(id), kp, kp3);
}

PoseFeature extract_feature(const Keypoints2D& kp) {
  PoseFeature f;
  std::size_t out = 0;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    for (std::size_t j = i + 1; j < kNumKeypoints; ++j) {
      f.values[out++] = kp[i].x - kp[j].x;
      f.values[out++] = kp[i].y - kp[j].y;
    }
  }
  return f;
}

PoseFeature extract_feature(const HandPose& pose) { return extract_feature(pose.keypoints()); }

double l2_norm(const PoseFeature& feature) {
  double s = 0.0;
  for (double v : feature.values) s += v * v;
  return std::sqrt(s);
}

PoseFeature normalize_feature(const PoseFeature& feature) {
  const double n = l2_norm(feature);
  if (!(n > 0.0)) throw Error(ErrorCode::DegeneratePose, "feature has zero norm");
  PoseFeature out;
  for (std::size_t i = 0; i < kFeatureDim; ++i) out.values[i] = feature.values[i] / n;
  return out;
}

Keypoints2D canonical_orientation(const Keypoints2D& keypoints) {
  Keypoints2D k = keypoints;
  double cx = 0.0, cy = 0.0;
  for (const auto& p : k) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(kNumKeypoints);
  cy /= static_cast<double>(kNumKeypoints);
  const double vx = k[kMiddleMcpIndex].x - k[kWristIndex].x;
  const double vy = k[kMiddleMcpIndex].y - k[kWristIndex].y;
  const double angle = std::atan2(vx, vy);  // 0 when already along +y
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : k) {
    const double x = p.x - cx, y = p.y - cy;
    p = {c * x - s * y, s * x + c * y};
  }
  return k;
}

PoseFeature oriented_feature(const HandPose& pose) {
  return extract_feature(canonical_orientation(pose.keypoints()));
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

template <std::size_t N>
std::vector<std::array<double, N>> read_coords(const nlohmann::json& arr, const char* field) {
  if (!arr.is_array()) throw std::invalid_argument(std::string(field) + " must be an array");
  std::vector<std::array<double, N>> out;
  out.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != N) {
      throw std::invalid_argument(std::string(field) + " entries must have " + std::to_string(N) +
                                  " numbers");
    }
    std::array<double, N> c{};
    for (std::size_t k = 0; k < N; ++k) {
      if (p[k].is_null()) {
        c[k] = std::numeric_limits<double>::quiet_NaN();
      } else if (p[k].is_number()) {
        c[k] = p[k].get<double>();
      } else {
        throw std::invalid_argument(std::string(field) + " coordinates must be numbers");
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<PoseRecord> read_pose_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open pose file '" + path + "'");
  std::vector<PoseRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw std::invalid_argument("line is not a JSON object");
      std::string id = obj.contains("id") ? obj.at("id").get<std::string>()
                                          : "line" + std::to_string(line_no);
      if (!obj.contains("keypoints")) throw std::invalid_argument("missing 'keypoints'");
      const auto kp = read_coords<2>(obj.at("keypoints"), "keypoints");
      std::vector<std::array<double, 3>> kp3;
      if (obj.contains("keypoints3d") && !obj.at("keypoints3d").is_null()) {
        kp3 = read_coords<3>(obj.at("keypoints3d"), "keypoints3d");
      }
      PoseRecord rec{parse_pose(kp, kp3, std::move(id)), {}, {}};
      if (obj.contains("image")) rec.image_path = obj.at("image").get<std::string>();
      if (obj.contains("mask")) rec.mask_path = obj.at("mask").get<std::string>();
      records.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, where + e.what());
    }
  }
  return records;
}

std::vector<HandPose> read_poses(const std::string& path) {
  auto records = read_pose_records(path);
  std::vector<HandPose> poses;
  poses.reserve(records.size());
  for (auto& r : records) poses.push_back(std::move(r.pose));
  return poses;
}

std::string pose_to_json_line(const HandPose& pose) {
  nlohmann::json obj;
  obj["id"] = pose.id();
  auto kp = nlohmann::json::array();
  for (const auto& p : pose.keypoints()) kp.push_back({p.x, p.y});
  obj["keypoints"] = std::move(kp);
  if (pose.keypoints3d()) {
    auto k3 = nlohmann::json::array();
    for (const auto& p : *pose.keypoints3d()) k3.push_back({p.x, p.y, p.z});
    obj["keypoints3d"] = std::move(k3);
  }
  return obj.dump();
}

void write_poses(const std::string& path, std::span<const HandPose> poses) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write pose file '" + path + "'");
  for (const auto& p : poses) out << pose_to_json_line(p) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Procedural skeletons

namespace {

struct FingerTemplate {
  double base_x, base_y;      // base joint relative to wrist, hand length = 1
  double direction_deg;       // rest direction of the first bone, 0 = up
  double bones[3];
};

// Image coordinates (y down); the open hand points up.
constexpr FingerTemplate kFingers[5] = {
    {-0.30, -0.22, -55.0, {0.30, 0.26, 0.22}},
    {-0.22, -0.88, -10.0, {0.38, 0.24, 0.19}},
    {-0.04, -0.92, 0.0, {0.42, 0.27, 0.21}},
    {0.13, -0.88, 9.0, {0.39, 0.25, 0.19}},
    {0.28, -0.78, 20.0, {0.31, 0.19, 0.17}},
};

constexpr double kDeg = 3.14159265358979323846 / 180.0;

}  // namespace

HandPose synthesize_pose(Rng& rng, std::string id, const PoseSynthOptions& o) {
  std::array<Point2, kNumKeypoints> local{};
  local[0] = {0.0, 0.0};
  for (std::size_t f = 0; f < 5; ++f) {
    const auto& t = kFingers[f];
    const double curl = rng.uniform();  // 0 = straight, 1 = fist
    const double abduction = rng.uniform(-12.0, 12.0) * kDeg;
    // Curling bends the finger toward the palm in-plane and foreshortens it.
    const double bend_sign = f == 0 ? 1.0 : -1.0;
    double angle = t.direction_deg * kDeg + abduction;
    Point2 p{t.base_x + rng.uniform(-0.03, 0.03), t.base_y + rng.uniform(-0.03, 0.03)};
    local[1 + 4 * f] = p;
    for (int b = 0; b < 3; ++b) {
      const double flex = curl * rng.uniform(35.0, 75.0) * kDeg;
      angle += bend_sign * flex;
      const double length = t.bones[b] * (1.0 - 0.45 * curl * rng.uniform(0.5, 1.0));
      p = {p.x + length * std::sin(angle), p.y - length * std::cos(angle)};
      local[2 + 4 * f + b] = p;
    }
  }

  const double theta = rng.uniform(-o.max_rotation_rad, o.max_rotation_rad);
  const double scale = rng.uniform(o.min_scale_px, o.max_scale_px);
  const double aspect = rng.uniform(0.85, 1.15);  // out-of-plane tilt proxy
  const double cx = rng.uniform(o.center_min_px, o.center_max_px);
  const double cy = rng.uniform(o.center_min_px, o.center_max_px);
  const double c = std::cos(theta), s = std::sin(theta);

  Keypoints2D kp;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    const double lx = local[i].x * scale * aspect;
    const double ly = local[i].y * scale;
    kp[i] = {cx + c * lx - s * ly + o.jitter_px * rng.normal(),
             cy + s * lx + c * ly + o.jitter_px * rng.normal()};
  }
  return HandPose(std::move(id), kp);
}

std::vector<HandPose> synthesize_bank(std::size_t n, std::uint64_t seed,
                                      const PoseSynthOptions& options) {
  std::vector<HandPose> bank;
  bank.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, i));
    bank.push_back(synthesize_pose(rng, "pose" + std::to_string(i), options));
  }
  return bank;
}

}  // namespace posefuse
