#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "posefuse/error.hpp"
#include "posefuse/loss.hpp"
#include "posefuse/parallel.hpp"

using namespace posefuse;

namespace {

Image random_image(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> d(w * h * c);
  for (double& v : d) v = rng.uniform();
  return Image(w, h, c, std::move(d));
}

ColorHistogram hist(std::vector<double> values, std::size_t channels = 1) {
  ColorHistogram h;
  h.channels = channels;
  h.bins_per_channel = values.size() / channels;
  h.values = std::move(values);
  return h;
}

ColorHistogram random_hist(Rng& rng, std::size_t bins, std::size_t channels) {
  std::vector<double> v(bins * channels);
  for (std::size_t c = 0; c < channels; ++c) {
    double s = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      // Some exactly empty bins, as small images produce.
      v[c * bins + b] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
      s += v[c * bins + b];
    }
    if (s == 0.0) {
      v[c * bins] = 1.0;
      s = 1.0;
    }
    for (std::size_t b = 0; b < bins; ++b) v[c * bins + b] /= s;
  }
  return hist(std::move(v), channels);
}

}  // namespace

TEST(ShapeLoss, IdentityOffsetAndOracle) {
  const Image a = random_image(8, 8, 3, 1);
  EXPECT_EQ(shape_loss(a, a), 0.0);

  const Image lo(6, 5, 3, 0.3), hi(6, 5, 3, 0.5);
  EXPECT_NEAR(shape_loss(lo, hi), 0.2, 1e-15);

  const Image b = random_image(8, 8, 3, 2);
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += std::abs(a.data()[i] - b.data()[i]);
  EXPECT_NEAR(shape_loss(a, b), s / static_cast<double>(a.data().size()), 1e-12);

  EXPECT_THROW(shape_loss(a, Image(8, 7, 3, 0.0)), Error);
  try {
    shape_loss(a, Image(8, 8, 1, 0.0));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
}

TEST(ShapeLoss, MetricAxiomsOnRandomTriples) {
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const Image a = random_image(4, 4, 3, 3 * t + 10), b = random_image(4, 4, 3, 3 * t + 11),
                c = random_image(4, 4, 3, 3 * t + 12);
    const double ab = shape_loss(a, b), ba = shape_loss(b, a), bc = shape_loss(b, c), ac = shape_loss(a, c);
    ASSERT_EQ(ab, ba);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ac, ab + bc + 1e-12);
    ASSERT_EQ(shape_loss(a, a), 0.0);
  }
}

TEST(ColorLoss, HandComputedTwoBinCase) {
  // 0.5 ln 2 + 0.5 ln(2/3) = 0.5 ln(4/3)
  const double expected = 0.14384103622589045;
  const double v = color_loss(hist({0.5, 0.5}), hist({0.25, 0.75}));
  EXPECT_NEAR(v, expected, 1e-4);
  EXPECT_NEAR(v, oracle::smoothed_kl(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75}), 1e-12);
}

TEST(ColorLoss, EqualIsZeroAndZeroBinIsFinitePositive) {
  const ColorHistogram h = hist({0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(color_loss(h, h), 0.0, 1e-9);
  const double v = color_loss(hist({0.5, 0.5}), hist({1.0, 0.0}));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
}

TEST(ColorLoss, NonNegativeIndiscerniblesAndAsymmetric) {
  Rng rng(5);
  bool asymmetric = false;
  for (int t = 0; t < 1000; ++t) {
    const ColorHistogram a = random_hist(rng, 8, 3), b = random_hist(rng, 8, 3);
    const double ab = color_loss(a, b), ba = color_loss(b, a);
    ASSERT_GT(ab, 0.0);
    ASSERT_NEAR(color_loss(a, a), 0.0, 1e-9);
    double ref = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      ref += oracle::smoothed_kl(std::span(a.values).subspan(c * 8, 8), std::span(b.values).subspan(c * 8, 8));
    }
    ASSERT_NEAR(ab, ref, 1e-12);
    if (std::abs(ab - ba) > 1e-6) asymmetric = true;
  }
  EXPECT_TRUE(asymmetric);
}

TEST(ColorLoss, LayoutMismatch) {
  try {
    color_loss(hist({0.5, 0.5}), hist({0.2, 0.3, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LayoutMismatch);
  }
}

TEST(TaLoss, ZeroWeightsGiveZero) {
  const Image y = random_image(8, 8, 3, 20), g = random_image(8, 8, 3, 21), xb = random_image(8, 8, 3, 22);
  EXPECT_EQ(ta_loss({0.0, 0.0}, y, g, xb).ta, 0.0);
}

TEST(TaLoss, ComposesTheTwoSubOracles) {
  const Image y = random_image(12, 10, 3, 23), g = random_image(12, 10, 3, 24), xb = random_image(12, 10, 3, 25);
  const LossReport r = ta_loss({10.0, 100.0}, y, g, xb, 32);
  double shape = 0.0;
  for (std::size_t i = 0; i < y.data().size(); ++i) shape += std::abs(y.data()[i] - g.data()[i]);
  shape /= static_cast<double>(y.data().size());
  const auto hg = oracle::histogram(g, 32, nullptr), hb = oracle::histogram(xb, 32, nullptr);
  double color = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    color += oracle::smoothed_kl(std::span(hg).subspan(c * 32, 32), std::span(hb).subspan(c * 32, 32));
  }
  EXPECT_NEAR(r.shape, shape, 1e-12);
  EXPECT_NEAR(r.color, color, 1e-9);
  EXPECT_NEAR(r.ta, 10.0 * color + 100.0 * shape, 1e-9);

  const auto hy = oracle::histogram(y, 32, nullptr);
  double color_y = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    color_y += oracle::smoothed_kl(std::span(hg).subspan(c * 32, 32), std::span(hy).subspan(c * 32, 32));
  }
  EXPECT_NEAR(ta_loss({10.0, 100.0}, y, g, xb, 32, ColorReference::Target).color, color_y, 1e-9);
}

TEST(TaLoss, LinearInEachWeight) {
  const Image y = random_image(9, 9, 3, 26), g = random_image(9, 9, 3, 27), xb = random_image(9, 9, 3, 28);
  const LossReport base = ta_loss({10.0, 100.0}, y, g, xb);
  const LossReport twice = ta_loss({20.0, 200.0}, y, g, xb);
  EXPECT_NEAR(twice.ta, 2.0 * base.ta, 1e-9);
  for (double l1 : {0.0, 0.5, 3.0, 17.0}) {
    EXPECT_NEAR(ta_loss({l1, 100.0}, y, g, xb).ta, l1 * base.color + 100.0 * base.shape, 1e-9);
  }
  for (double l2 : {0.0, 0.5, 3.0, 170.0}) {
    EXPECT_NEAR(ta_loss({10.0, l2}, y, g, xb).ta, 10.0 * base.color + l2 * base.shape, 1e-9);
  }
}

TEST(GanObjective, ExamplesAndClamp) {
  EXPECT_EQ(gan_objective(1.0, 0.0), 0.0);
  EXPECT_NEAR(gan_objective(0.5, 0.5), 2.0 * std::log(0.5), 1e-12);
  EXPECT_NEAR(gan_objective(0.5, 0.5), -1.3863, 1e-4);
  const double v = gan_objective(0.0, 0.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, std::log(1e-12), 1e-9);
  EXPECT_TRUE(std::isfinite(gan_objective(0.0, 1.0)));
}

TEST(GanObjective, MonotoneOnGrid) {
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double a = i / 20.0, b = j / 20.0, c = (j + 1) / 20.0;
      EXPECT_GT(gan_objective(c, a), gan_objective(b, a));
      EXPECT_LT(gan_objective(a, c), gan_objective(a, b));
    }
  }
}

TEST(GanObjective, OutOfRange) {
  for (auto [r, f] : {std::pair{-0.1, 0.5}, {0.5, 1.2}, {std::nan(""), 0.5}}) {
    try {
      gan_objective(r, f);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
  }
}
