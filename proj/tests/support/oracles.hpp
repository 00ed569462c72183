// Reference computations written directly from the definitions, kept apart
// from the library code they check. Slow on purpose.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "posefuse/affine.hpp"
#include "posefuse/image.hpp"
#include "posefuse/pose.hpp"
#include "posefuse/tiny_net.hpp"

namespace oracle {

using posefuse::Affine2D;
using posefuse::HandPose;
using posefuse::Image;
using posefuse::Keypoints2D;

// Pairwise differences by explicit double loop.
std::vector<double> pair_feature(const Keypoints2D& kp);

// Affine least squares through the uncentred 3x3 normal equations, solved
// by Gaussian elimination with partial pivoting.
Affine2D affine_lstsq(const Keypoints2D& src, const Keypoints2D& dst);

// Cosine of pair features after mapping the candidate with affine_lstsq.
double aligned_cosine(const HandPose& candidate, const HandPose& target);

// Bank indices sorted by aligned_cosine, descending, ties by index.
std::vector<std::size_t> brute_force_ranking(std::span<const HandPose> bank, const HandPose& target);

// Random affine with singular values in [0.5, 2] and a rotation/shear part.
Affine2D random_well_conditioned(std::uint64_t seed);
// Rotation, uniform scale and translation.
Affine2D random_similarity(std::uint64_t seed);

// Mean over points of the squared distance to the nearest centroid.
double nearest_mse(std::span<const float> points, std::size_t d, std::span<const float> centroids,
                   std::size_t k);

// Clamp-to-edge box mean, per pixel over the whole window.
Image box_blur(const Image& img, std::size_t radius);
// Sobel magnitude of the luminance with explicit 3x3 kernels.
std::vector<double> sobel(const Image& img);
// Per-channel normalized histogram by direct accumulation.
std::vector<double> histogram(const Image& img, std::size_t bins, const Image* mask);

// KL(p || q) after adding eps to every bin and renormalizing.
double smoothed_kl(std::span<const double> p, std::span<const double> q, double eps = 1e-8);

// Metrics by definition: per-pair loops, counting per threshold.
struct MetricOracle {
  double epe_mean = 0.0;
  double epe_median = 0.0;
  std::vector<std::size_t> counts;  // keypoints within each threshold
  std::vector<double> thresholds;
  double auc = 0.0;
  std::size_t total = 0;
};
MetricOracle metrics(const std::vector<HandPose>& pred, const std::vector<HandPose>& gt, bool use3d,
                     double t_min, double t_max, std::size_t steps);

// Finite-difference check of a two-layer TinyNet for L = <r, output>.
// Perturbing one parameter only moves one hidden unit (or one output), so
// the loss change is propagated sparsely and evaluated with cancellation-free
// activation differences. Central differences with step h.
struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
  std::size_t worst_layer = 0;
  std::size_t worst_index = 0;
};
GradCheck check_two_layer(const posefuse::TinyNet& net, std::span<const double> input,
                          std::span<const double> r, double h = 1e-4);

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace oracle
