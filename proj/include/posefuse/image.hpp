#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "posefuse/affine.hpp"
#include "posefuse/pose.hpp"

namespace posefuse {

/// Row-major interleaved image with 1 or 3 channels, samples in [0, 1].
class Image {
 public:
  Image() = default;
  /// Filled with `value`.
  Image(std::size_t width, std::size_t height, std::size_t channels, double value = 0.0);
  /// Validates size, channel count, and sample range.
  Image(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  double at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return data_[(y * width_ + x) * channels_ + c];
  }
  double& at(std::size_t x, std::size_t y, std::size_t c = 0) {
    return data_[(y * width_ + x) * channels_ + c];
  }
  /// Clamp-to-edge access.
  double clamped(long x, long y, std::size_t c = 0) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0, height_ = 0, channels_ = 0;
  std::vector<double> data_;
};

/// Mean over the (2r+1)^2 window with clamp-to-edge borders. r = 0 is identity.
Image blur_average(const Image& img, std::size_t radius, std::size_t threads = 1);

/// 0.299 R + 0.587 G + 0.114 B; single-channel images pass through.
Image luminance(const Image& img);

/// Unnormalized 3x3 Sobel gradient magnitude of the luminance, clamp-to-edge.
std::vector<double> sobel_magnitude(const Image& img);

/// Sobel magnitude scaled so the maximum is 1 (all-zero stays all-zero).
Image edge_map(const Image& img);

struct ColorHistogram {
  std::size_t bins_per_channel = 0;
  std::size_t channels = 0;
  bool joint = false;           ///< one bins^channels block instead of per-channel blocks
  std::vector<double> values;   ///< channel-major; each block sums to 1

  std::size_t block_size() const;
  std::size_t block_count() const { return joint ? 1 : channels; }
  bool same_layout(const ColorHistogram& o) const {
    return bins_per_channel == o.bins_per_channel && channels == o.channels && joint == o.joint &&
           values.size() == o.values.size();
  }
};

inline constexpr std::size_t kDefaultHistogramBins = 32;
inline constexpr std::size_t kDefaultBlurRadius = 5;

/// Bin index of a sample: floor(v * bins), with 1.0 in the last bin.
std::size_t histogram_bin(double v, std::size_t bins);

/// Per-channel (or joint) histogram, pixels weighted by the optional mask.
/// Errors: InvalidArgument (bins == 0, mask shape), EmptySupport (zero mask weight).
ColorHistogram color_histogram(const Image& img, std::size_t bins_per_channel,
                               const Image* mask = nullptr, bool joint = false);

struct CompositeJob {
  Image foreground;
  Image mask;         ///< single channel, same size as foreground
  Affine2D transform; ///< foreground -> background coordinates
  Image background;
  HandPose keypoints; ///< foreground frame
};

struct CompositeResult {
  Image image;
  HandPose keypoints;
  std::size_t covered_pixels = 0;  ///< background pixels with positive warped mask
};

/// Bilinear inverse-mapped warp of foreground and mask, then
/// out = m * fg + (1 - m) * bg. Keypoints move by the forward transform.
/// Errors: InvalidArgument (shapes), DegenerateConfiguration (singular
/// transform), OutOfFrame (no mask-positive pixel lands on the background).
CompositeResult composite(const CompositeJob& job, std::size_t threads = 1);

}  // namespace posefuse
