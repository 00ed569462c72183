#pragma once

#include <cstddef>

#include "posefuse/image.hpp"

namespace posefuse {

/// lambda1 weighs the colour (KL) term, lambda2 the shape (L1) term.
struct LossWeights {
  double lambda1 = 10.0;
  double lambda2 = 100.0;
};

/// Which image supplies the reference colour histogram.
enum class ColorReference { BlurMap, Target };

struct LossReport {
  double shape = 0.0;
  double color = 0.0;
  double ta = 0.0;
  double gan = 0.0;
};

inline constexpr double kHistogramSmoothing = 1e-8;
inline constexpr double kProbabilityFloor = 1e-12;

/// Mean absolute sample difference. Throws DimMismatch.
double shape_loss(const Image& y, const Image& g_out);

/// KL(h_g || h_y) = -sum_i h_g(i) log(h_y(i) / h_g(i)), after adding 1e-8 to
/// every bin and renormalizing each block. Summed over blocks (channels).
/// Throws LayoutMismatch.
double color_loss(const ColorHistogram& h_g, const ColorHistogram& h_y);

/// shape = shape_loss(y, g_out); color = color_loss(hist(g_out), hist(ref))
/// with ref = x_b (default) or y; ta = lambda1 * color + lambda2 * shape.
LossReport ta_loss(const LossWeights& weights, const Image& y, const Image& g_out, const Image& x_b,
                   std::size_t bins = kDefaultHistogramBins,
                   ColorReference reference = ColorReference::BlurMap, bool joint_histogram = false);

/// log(max(d_real, 1e-12)) + log(max(1 - d_fake, 1e-12)). Throws OutOfRange
/// outside [0, 1].
double gan_objective(double d_real, double d_fake);

}  // namespace posefuse
