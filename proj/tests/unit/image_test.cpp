#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "posefuse/error.hpp"
#include "posefuse/image.hpp"
#include "posefuse/parallel.hpp"
#include "posefuse/png_io.hpp"

using namespace posefuse;

namespace {

Image random_image(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> d(w * h * c);
  for (double& v : d) v = rng.uniform();
  return Image(w, h, c, std::move(d));
}

HandPose pose_at(double x0, double y0) {
  Keypoints2D kp;
  for (std::size_t i = 0; i < 21; ++i) kp[i] = {x0 + static_cast<double>(i % 5), y0 + static_cast<double>(i / 5)};
  return HandPose("p", kp);
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ImageType, ValidatesSamples) {
  EXPECT_EQ(code_of([] { Image(2, 2, 1, std::vector<double>(3, 0.0)); }), ErrorCode::DimMismatch);
  EXPECT_EQ(code_of([] { Image(1, 1, 2, std::vector<double>(2, 0.0)); }), ErrorCode::InvalidArgument);
  EXPECT_THROW(Image(1, 1, 1, std::vector<double>{1.5}), Error);
  EXPECT_THROW(Image(1, 1, 1, std::vector<double>{std::nan("")}), Error);
  const Image ok(2, 1, 3, std::vector<double>{0, 0.5, 1, 1, 0.5, 0});
  EXPECT_EQ(ok.at(1, 0, 2), 0.0);
  EXPECT_EQ(ok.clamped(-4, 9, 0), 0.0);
  EXPECT_EQ(ok.clamped(7, 0, 0), 1.0);
}

TEST(Blur, ConstantImageUnchanged) {
  const Image img(13, 7, 3, 0.375);
  EXPECT_EQ(blur_average(img, 5), img);
}

TEST(Blur, RadiusZeroIsIdentity) {
  const Image img = random_image(9, 6, 3, 1);
  EXPECT_EQ(blur_average(img, 0), img);
}

TEST(Blur, ImpulseGivesNinthBlock) {
  Image img(9, 9, 1, 0.0);
  img.at(4, 4) = 1.0;
  const Image out = blur_average(img, 1);
  for (std::size_t y = 0; y < 9; ++y) {
    for (std::size_t x = 0; x < 9; ++x) {
      const bool inside = x >= 3 && x <= 5 && y >= 3 && y <= 5;
      EXPECT_NEAR(out.at(x, y), inside ? 1.0 / 9.0 : 0.0, 1e-15) << x << "," << y;
    }
  }
}

TEST(Blur, MatchesDirectWindowOracle) {
  for (std::size_t r : {1u, 2u, 5u, 12u}) {
    const Image img = random_image(17, 11, 3, 10 + r);
    const Image a = blur_average(img, r, 1);
    const Image b = oracle::box_blur(img, r);
    for (std::size_t i = 0; i < a.data().size(); ++i) ASSERT_NEAR(a.data()[i], b.data()[i], 1e-12) << r;
    EXPECT_EQ(blur_average(img, r, 4), a);
  }
}

TEST(Blur, MeanPreservedWithConstantBorderAndRangeKept) {
  const std::size_t r = 3, w = 30, h = 24;
  Image img(w, h, 1, 0.2);
  Rng rng(4);
  for (std::size_t y = 2 * r; y < h - 2 * r; ++y) {
    for (std::size_t x = 2 * r; x < w - 2 * r; ++x) img.at(x, y) = rng.uniform(0.1, 0.9);
  }
  const Image out = blur_average(img, r);
  const auto mean = [](const Image& im) {
    return std::accumulate(im.data().begin(), im.data().end(), 0.0) / static_cast<double>(im.data().size());
  };
  EXPECT_NEAR(mean(out), mean(img), 1e-6);
  const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
  for (double v : out.data()) {
    EXPECT_GE(v, *lo - 1e-15);
    EXPECT_LE(v, *hi + 1e-15);
  }
}

TEST(EdgeMap, ConstantImageIsZero) {
  const Image e = edge_map(Image(8, 8, 3, 0.6));
  for (double v : e.data()) EXPECT_EQ(v, 0.0);
}

TEST(EdgeMap, VerticalStep) {
  Image img(12, 6, 1, 0.0);
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 6; x < 12; ++x) img.at(x, y) = 1.0;
  }
  const Image e = edge_map(img);
  EXPECT_EQ(e.channels(), 1u);
  for (std::size_t y = 0; y < 6; ++y) {
    EXPECT_EQ(e.at(5, y), 1.0);
    EXPECT_EQ(e.at(6, y), 1.0);
    for (std::size_t x : {0u, 1u, 2u, 3u, 4u, 7u, 8u, 9u, 10u, 11u}) EXPECT_EQ(e.at(x, y), 0.0);
  }
}

TEST(EdgeMap, SobelMatchesDirectKernelsBeforeNormalization) {
  for (std::size_t c : {1u, 3u}) {
    const Image img = random_image(16, 16, c, 20 + c);
    const auto lib = sobel_magnitude(img);
    const auto ref = oracle::sobel(img);
    ASSERT_EQ(lib.size(), ref.size());
    for (std::size_t i = 0; i < lib.size(); ++i) EXPECT_NEAR(lib[i], ref[i], 1e-9);
    const Image e = edge_map(img);
    const double mx = *std::max_element(ref.begin(), ref.end());
    for (std::size_t i = 0; i < lib.size(); ++i) EXPECT_NEAR(e.data()[i], ref[i] / mx, 1e-9);
  }
}

TEST(Luminance, Weights) {
  const Image rgb(1, 1, 3, std::vector<double>{1.0, 0.5, 0.25});
  EXPECT_NEAR(luminance(rgb).at(0, 0), 0.299 + 0.587 * 0.5 + 0.114 * 0.25, 1e-15);
}

TEST(Histogram, SingleColourIsPointMass) {
  const Image img(5, 4, 3, std::vector<double>(60, 0.3));
  const ColorHistogram h = color_histogram(img, 32);
  ASSERT_EQ(h.values.size(), 96u);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(h.values[c * 32 + 9], 1.0);
  EXPECT_EQ(std::count(h.values.begin(), h.values.end(), 0.0), 93);
}

TEST(Histogram, HalfAndHalf) {
  Image img(4, 2, 3, 0.1);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t c = 0; c < 3; ++c) img.at(x, 1, c) = 0.9;
  }
  const ColorHistogram h = color_histogram(img, 2);
  for (double v : h.values) EXPECT_EQ(v, 0.5);
}

TEST(Histogram, OneFallsInLastBin) {
  EXPECT_EQ(histogram_bin(1.0, 32), 31u);
  EXPECT_EQ(histogram_bin(0.0, 32), 0u);
  EXPECT_EQ(histogram_bin(0.5, 2), 1u);
}

TEST(Histogram, MaskedMatchesAccumulationOracle) {
  const Image img = random_image(20, 15, 3, 30);
  const Image mask = random_image(20, 15, 1, 31);
  const ColorHistogram h = color_histogram(img, 32, &mask);
  const auto ref = oracle::histogram(img, 32, &mask);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(h.values[i], ref[i], 1e-9);
  for (std::size_t c = 0; c < 3; ++c) {
    double s = 0.0;
    for (std::size_t b = 0; b < 32; ++b) {
      EXPECT_GE(h.values[c * 32 + b], 0.0);
      s += h.values[c * 32 + b];
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Histogram, JointModeSumsToOne) {
  const Image img = random_image(10, 10, 3, 32);
  const ColorHistogram h = color_histogram(img, 4, nullptr, true);
  EXPECT_EQ(h.values.size(), 64u);
  EXPECT_NEAR(std::accumulate(h.values.begin(), h.values.end(), 0.0), 1.0, 1e-12);
}

TEST(Histogram, Errors) {
  const Image img(3, 3, 1, 0.5);
  const Image zero(3, 3, 1, 0.0);
  const Image wrong(2, 3, 1, 1.0);
  EXPECT_EQ(code_of([&] { color_histogram(img, 4, &zero); }), ErrorCode::EmptySupport);
  EXPECT_EQ(code_of([&] { color_histogram(img, 0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { color_histogram(img, 4, &wrong); }), ErrorCode::InvalidArgument);
}

TEST(Composite, IdentityFullMaskIsForeground) {
  const Image fg = random_image(12, 9, 3, 40);
  const Image bg = random_image(12, 9, 3, 41);
  const CompositeResult r = composite({fg, Image(12, 9, 1, 1.0), Affine2D::identity(), bg, pose_at(2, 2)});
  EXPECT_EQ(r.image, fg);
  EXPECT_EQ(r.covered_pixels, 12u * 9u);
  EXPECT_EQ(r.keypoints.keypoints(), pose_at(2, 2).keypoints());
}

TEST(Composite, ZeroMaskIsBackgroundWithMovedKeypoints) {
  const Image fg = random_image(8, 8, 3, 42);
  const Image bg = random_image(10, 10, 3, 43);
  Affine2D t;
  t.tx = 1.5;
  const CompositeResult r = composite({fg, Image(8, 8, 1, 0.0), t, bg, pose_at(0, 0)});
  EXPECT_EQ(r.image, bg);
  EXPECT_EQ(r.covered_pixels, 0u);
  EXPECT_EQ(r.keypoints.keypoints()[3].x, 4.5);
}

TEST(Composite, TranslationMovesKeypointsExactly) {
  const Image fg = random_image(10, 10, 3, 44);
  const Image bg = random_image(40, 40, 3, 45);
  Affine2D t;
  t.tx = 10.0;
  t.ty = 20.0;
  const HandPose kp = pose_at(1.25, 3.5);
  const CompositeResult r = composite({fg, Image(10, 10, 1, 1.0), t, bg, kp});
  EXPECT_EQ(r.keypoints.keypoints()[0].x, kp.keypoints()[0].x + 10.0);
  EXPECT_EQ(r.keypoints.keypoints()[0].y, kp.keypoints()[0].y + 20.0);
  const Affine2D inv = t.inverse();
  for (std::size_t i = 0; i < 21; ++i) {
    const Point2 back = inv.apply(r.keypoints.keypoints()[i]);
    EXPECT_LE(std::hypot(back.x - kp.keypoints()[i].x, back.y - kp.keypoints()[i].y), 0.5);
  }
  // Pixel (10 + x, 20 + y) carries foreground pixel (x, y).
  EXPECT_EQ(r.image.at(13, 24, 1), fg.at(3, 4, 1));
  EXPECT_EQ(r.image.at(5, 5, 0), bg.at(5, 5, 0));
}

TEST(Composite, AlphaBlendAndOutOfFrame) {
  const Image fg(4, 4, 1, 1.0);
  const Image bg(4, 4, 1, 0.0);
  const CompositeResult r = composite({fg, Image(4, 4, 1, 0.25), Affine2D::identity(), bg, pose_at(0, 0)});
  for (double v : r.image.data()) EXPECT_DOUBLE_EQ(v, 0.25);

  Affine2D far;
  far.tx = 500.0;
  EXPECT_EQ(code_of([&] { composite({fg, Image(4, 4, 1, 1.0), far, bg, pose_at(0, 0)}); }), ErrorCode::OutOfFrame);
  Affine2D singular;
  singular.a11 = 0.0;
  EXPECT_EQ(code_of([&] { composite({fg, Image(4, 4, 1, 1.0), singular, bg, pose_at(0, 0)}); }),
            ErrorCode::DegenerateConfiguration);
  EXPECT_EQ(code_of([&] { composite({fg, Image(3, 4, 1, 1.0), Affine2D::identity(), bg, pose_at(0, 0)}); }),
            ErrorCode::InvalidArgument);
}

TEST(Composite, RotationIsThreadIndependent) {
  const Image fg = random_image(20, 20, 3, 46);
  const Image mask = random_image(20, 20, 1, 47);
  const Image bg = random_image(50, 50, 3, 48);
  Affine2D t;
  t.a11 = std::cos(0.4) * 1.3;
  t.a12 = -std::sin(0.4) * 1.3;
  t.a21 = std::sin(0.4) * 1.3;
  t.a22 = std::cos(0.4) * 1.3;
  t.tx = 15.0;
  t.ty = 5.0;
  const CompositeJob job{fg, mask, t, bg, pose_at(4, 4)};
  const CompositeResult a = composite(job, 1);
  const CompositeResult b = composite(job, 5);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.covered_pixels, b.covered_pixels);
}

TEST(Png, RoundTripOf8BitValues) {
  oracle::TempDir dir("png");
  Rng rng(50);
  for (std::size_t c : {1u, 3u}) {
    std::vector<double> d(7 * 5 * c);
    for (double& v : d) v = static_cast<double>(rng.below(256)) / 255.0;
    const Image img(7, 5, c, d);
    const std::string path = dir.file("i" + std::to_string(c) + ".png");
    write_png(img, path);
    EXPECT_EQ(read_png(path), img);
  }
  EXPECT_EQ(code_of([&] { read_png(dir.file("missing.png")); }), ErrorCode::IoError);
  oracle::write_file(dir.file("junk.png"), "not a png");
  EXPECT_EQ(code_of([&] { read_png(dir.file("junk.png")); }), ErrorCode::IoError);
}
