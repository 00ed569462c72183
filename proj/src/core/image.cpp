#include "posefuse/image.hpp"

#include <algorithm>
#include <cmath>

#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"

namespace posefuse {

Image::Image(std::size_t width, std::size_t height, std::size_t channels, double value)
    : width_(width), height_(height), channels_(channels), data_(width * height * channels, value) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::InvalidArgument, "images have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (!(value >= 0.0 && value <= 1.0)) throw Error(ErrorCode::OutOfRange, "fill value outside [0, 1]");
}

Image::Image(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::InvalidArgument, "images have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (data_.size() != width * height * channels) {
    throw Error(ErrorCode::DimMismatch, "image data length " + std::to_string(data_.size()) +
                                            " does not match " + std::to_string(width) + "x" +
                                            std::to_string(height) + "x" + std::to_string(channels));
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::OutOfRange, "image sample outside [0, 1]");
  }
}

double Image::clamped(long x, long y, std::size_t c) const {
  const long w = static_cast<long>(width_), h = static_cast<long>(height_);
  x = std::clamp(x, 0L, w - 1);
  y = std::clamp(y, 0L, h - 1);
  return data_[(static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)) * channels_ + c];
}

Image blur_average(const Image& img, std::size_t radius, std::size_t threads) {
  if (radius == 0 || img.empty()) return img;
  const std::size_t w = img.width(), h = img.height(), ch = img.channels();
  const long r = static_cast<long>(radius);
  const double inv = 1.0 / static_cast<double>(2 * radius + 1);

  // Separable: horizontal window means, then vertical means of those.
  std::vector<double> horiz(w * h * ch);
  parallel_for(
      h,
      [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t c = 0; c < ch; ++c) {
              double s = 0.0;
              for (long dx = -r; dx <= r; ++dx) s += img.clamped(static_cast<long>(x) + dx, static_cast<long>(y), c);
              horiz[(y * w + x) * ch + c] = s * inv;
            }
          }
        }
      },
      threads);

  Image out(w, h, ch);
  const long hl = static_cast<long>(h);
  parallel_for(
      h,
      [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t c = 0; c < ch; ++c) {
              double s = 0.0;
              for (long dy = -r; dy <= r; ++dy) {
                const long yy = std::clamp(static_cast<long>(y) + dy, 0L, hl - 1);
                s += horiz[(static_cast<std::size_t>(yy) * w + x) * ch + c];
              }
              out.at(x, y, c) = std::clamp(s * inv, 0.0, 1.0);
            }
          }
        }
      },
      threads);
  return out;
}

Image luminance(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double l = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
      out.at(x, y) = std::clamp(l, 0.0, 1.0);
    }
  }
  return out;
}

std::vector<double> sobel_magnitude(const Image& img) {
  const Image lum = luminance(img);
  const std::size_t w = lum.width(), h = lum.height();
  std::vector<double> mag(w * h, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const long xi = static_cast<long>(x), yi = static_cast<long>(y);
      const auto p = [&](long dx, long dy) { return lum.clamped(xi + dx, yi + dy); };
      const double gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
      mag[y * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return mag;
}

Image edge_map(const Image& img) {
  std::vector<double> mag = sobel_magnitude(img);
  const double peak = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (peak > 0.0) {
    for (double& v : mag) v = std::clamp(v / peak, 0.0, 1.0);
  }
  return Image(img.width(), img.height(), 1, std::move(mag));
}

std::size_t ColorHistogram::block_size() const {
  if (!joint) return bins_per_channel;
  std::size_t s = 1;
  for (std::size_t c = 0; c < channels; ++c) s *= bins_per_channel;
  return s;
}

std::size_t histogram_bin(double v, std::size_t bins) {
  const auto b = static_cast<std::size_t>(std::floor(v * static_cast<double>(bins)));
  return std::min(b, bins - 1);
}

ColorHistogram color_histogram(const Image& img, std::size_t bins, const Image* mask, bool joint) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  if (mask && (mask->channels() != 1 || mask->width() != img.width() || mask->height() != img.height())) {
    throw Error(ErrorCode::InvalidArgument, "mask must be single-channel and match the image size");
  }
  ColorHistogram h;
  h.bins_per_channel = bins;
  h.channels = img.channels();
  h.joint = joint && img.channels() > 1;
  h.values.assign(h.block_size() * h.block_count(), 0.0);

  double total = 0.0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double wgt = mask ? mask->at(x, y) : 1.0;
      if (wgt <= 0.0) continue;
      total += wgt;
      if (h.joint) {
        std::size_t idx = 0;
        for (std::size_t c = 0; c < h.channels; ++c) idx = idx * bins + histogram_bin(img.at(x, y, c), bins);
        h.values[idx] += wgt;
      } else {
        for (std::size_t c = 0; c < h.channels; ++c) {
          h.values[c * bins + histogram_bin(img.at(x, y, c), bins)] += wgt;
        }
      }
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::EmptySupport, "histogram support has zero weight");
  for (double& v : h.values) v /= total;
  return h;
}

namespace {

// Bilinear sample with pixel centres on integer coordinates. Mask taps
// outside the foreground count as zero; colour taps clamp to the edge.
struct Sample {
  double alpha;
  double color[3];
};

Sample sample_bilinear(const Image& fg, const Image& mask, double qx, double qy) {
  Sample s{0.0, {0.0, 0.0, 0.0}};
  const double fx0 = std::floor(qx), fy0 = std::floor(qy);
  const long x0 = static_cast<long>(fx0), y0 = static_cast<long>(fy0);
  const double ax = qx - fx0, ay = qy - fy0;
  const long w = static_cast<long>(fg.width()), h = static_cast<long>(fg.height());
  const double wts[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
  const long xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const long ys[4] = {y0, y0, y0 + 1, y0 + 1};
  for (int t = 0; t < 4; ++t) {
    if (wts[t] == 0.0) continue;
    if (xs[t] >= 0 && xs[t] < w && ys[t] >= 0 && ys[t] < h) {
      s.alpha += wts[t] * mask.at(static_cast<std::size_t>(xs[t]), static_cast<std::size_t>(ys[t]));
    }
    for (std::size_t c = 0; c < fg.channels(); ++c) s.color[c] += wts[t] * fg.clamped(xs[t], ys[t], c);
  }
  s.alpha = std::clamp(s.alpha, 0.0, 1.0);
  return s;
}

}  // namespace

CompositeResult composite(const CompositeJob& job, std::size_t threads) {
  const Image& fg = job.foreground;
  const Image& bg = job.background;
  if (fg.empty() || bg.empty()) throw Error(ErrorCode::InvalidArgument, "composite needs non-empty images");
  if (job.mask.channels() != 1 || job.mask.width() != fg.width() || job.mask.height() != fg.height()) {
    throw Error(ErrorCode::InvalidArgument, "mask must be single-channel and match the foreground size");
  }
  if (fg.channels() != bg.channels()) {
    throw Error(ErrorCode::InvalidArgument, "foreground and background channel counts differ");
  }
  if (!job.transform.is_finite()) throw Error(ErrorCode::NonFiniteCoordinate, "transform is not finite");
  const Affine2D inv = job.transform.inverse();

  Image out = bg;
  const std::size_t w = bg.width(), h = bg.height(), ch = bg.channels();
  std::vector<std::size_t> covered_rows(h, 0);
  parallel_for(
      h,
      [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t x = 0; x < w; ++x) {
            const Point2 q = inv.apply(Point2{static_cast<double>(x), static_cast<double>(y)});
            if (!(q.x > -1.0 && q.y > -1.0 && q.x < static_cast<double>(fg.width()) &&
                  q.y < static_cast<double>(fg.height()))) {
              continue;
            }
            const Sample s = sample_bilinear(fg, job.mask, q.x, q.y);
            if (s.alpha <= 0.0) continue;
            ++covered_rows[y];
            for (std::size_t c = 0; c < ch; ++c) {
              const double v = s.alpha * s.color[c] + (1.0 - s.alpha) * bg.at(x, y, c);
              out.at(x, y, c) = std::clamp(v, 0.0, 1.0);
            }
          }
        }
      },
      threads);

  std::size_t covered = 0;
  for (std::size_t c : covered_rows) covered += c;
  const auto m = job.mask.data();
  const bool mask_has_support = std::any_of(m.begin(), m.end(), [](double v) { return v > 0.0; });
  // An all-zero mask is a valid no-op; OutOfFrame means real support fell outside.
  if (covered == 0 && mask_has_support) {
    throw Error(ErrorCode::OutOfFrame, "no mask-positive foreground pixel lands inside the background");
  }
  return {std::move(out), job.transform.apply(job.keypoints), covered};
}

}  // namespace posefuse
