#include "posefuse/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "posefuse/error.hpp"

namespace posefuse {

double shape_loss(const Image& y, const Image& g_out) {
  if (!y.same_shape(g_out)) {
    throw Error(ErrorCode::DimMismatch, "shape loss needs images of identical size and channels");
  }
  const auto a = y.data();
  const auto b = g_out.data();
  if (a.empty()) throw Error(ErrorCode::DimMismatch, "shape loss of empty images");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double color_loss(const ColorHistogram& h_g, const ColorHistogram& h_y) {
  if (!h_g.same_layout(h_y) || h_g.values.empty()) {
    throw Error(ErrorCode::LayoutMismatch, "histograms have different bin layouts");
  }
  const std::size_t block = h_g.block_size();
  const std::size_t blocks = h_g.block_count();
  double kl = 0.0;
  std::vector<double> p(block), q(block);
  for (std::size_t c = 0; c < blocks; ++c) {
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < block; ++i) {
      p[i] = h_g.values[c * block + i] + kHistogramSmoothing;
      q[i] = h_y.values[c * block + i] + kHistogramSmoothing;
      sp += p[i];
      sq += q[i];
    }
    double part = 0.0;
    for (std::size_t i = 0; i < block; ++i) {
      const double pi = p[i] / sp;
      const double qi = q[i] / sq;
      part -= pi * std::log(qi / pi);
    }
    kl += part;
  }
  // Rounding can leave -1e-17 for identical inputs.
  return std::max(kl, 0.0);
}

LossReport ta_loss(const LossWeights& w, const Image& y, const Image& g_out, const Image& x_b,
                   std::size_t bins, ColorReference reference, bool joint_histogram) {
  if (!std::isfinite(w.lambda1) || !std::isfinite(w.lambda2) || w.lambda1 < 0.0 || w.lambda2 < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "loss weights must be finite and non-negative");
  }
  LossReport r;
  r.shape = shape_loss(y, g_out);
  const Image& ref = reference == ColorReference::BlurMap ? x_b : y;
  if (ref.channels() != g_out.channels()) {
    throw Error(ErrorCode::LayoutMismatch, "colour reference and output have different channel counts");
  }
  r.color = color_loss(color_histogram(g_out, bins, nullptr, joint_histogram),
                       color_histogram(ref, bins, nullptr, joint_histogram));
  r.ta = w.lambda1 * r.color + w.lambda2 * r.shape;
  return r;
}

double gan_objective(double d_real, double d_fake) {
  if (!(d_real >= 0.0 && d_real <= 1.0) || !(d_fake >= 0.0 && d_fake <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "discriminator outputs must lie in [0, 1]");
  }
  return std::log(std::max(d_real, kProbabilityFloor)) + std::log(std::max(1.0 - d_fake, kProbabilityFloor));
}

}  // namespace posefuse
