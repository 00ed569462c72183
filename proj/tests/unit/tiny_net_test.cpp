#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"
#include "posefuse/tiny_net.hpp"

using namespace posefuse;

namespace {

std::vector<double> normals(std::size_t n, Rng& rng, double sd = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = sd * rng.normal();
  return v;
}

TinyNet random_net(std::vector<std::size_t> widths, std::vector<Activation> acts, std::uint64_t seed) {
  Rng rng(seed);
  TinyNet net = TinyNet::random(widths, acts, rng, 0.1);
  for (std::size_t l = 0; l < acts.size(); ++l) {
    for (double& b : net.mutable_layer(l).bias) b = 0.1 * rng.normal();
  }
  return net;
}

double loss_of(const TinyNet& net, std::span<const double> x, std::span<const double> r) {
  const auto y = net.evaluate(x);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
  return s;
}

}  // namespace

TEST(TinyNet, IdentityLayerPassesInputThrough) {
  DenseLayer l{3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0}, Activation::Identity};
  const TinyNet net({l});
  const std::vector<double> x = {0.5, -2.0, 7.25};
  EXPECT_EQ(net.evaluate(x), x);
}

TEST(TinyNet, ZeroWeightTanhGivesZero) {
  DenseLayer l{4, 2, std::vector<double>(8, 0.0), {0, 0}, Activation::Tanh};
  const TinyNet net({l});
  for (double v : net.evaluate(std::vector<double>{1, 2, 3, 4})) EXPECT_EQ(v, 0.0);
}

TEST(TinyNet, ForwardMatchesStraightLineEvaluation) {
  const TinyNet net = random_net({6, 5, 3}, {Activation::Tanh, Activation::Sigmoid}, 1);
  Rng rng(2);
  const auto x = normals(6, rng);
  const auto& L = net.layers();
  std::vector<double> h(5), y(3);
  for (std::size_t o = 0; o < 5; ++o) {
    double s = L[0].bias[o];
    for (std::size_t i = 0; i < 6; ++i) s += L[0].weights[o * 6 + i] * x[i];
    h[o] = std::tanh(s);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    double s = L[1].bias[k];
    for (std::size_t o = 0; o < 5; ++o) s += L[1].weights[k * 5 + o] * h[o];
    y[k] = 1.0 / (1.0 + std::exp(-s));
  }
  const auto out = net.evaluate(x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(out[k], y[k], 1e-12);
}

TEST(TinyNet, ChainsDimensionsAndCountsParameters) {
  EXPECT_THROW(TinyNet({DenseLayer{2, 3, std::vector<double>(6), std::vector<double>(3), Activation::Tanh},
                        DenseLayer{4, 1, std::vector<double>(4), std::vector<double>(1), Activation::Tanh}}),
               Error);
  const TinyNet net = random_net({4, 3, 2}, {Activation::Tanh, Activation::Identity}, 3);
  EXPECT_EQ(net.parameter_count(), 4u * 3 + 3 + 3 * 2 + 2);
  try {
    net.forward(std::vector<double>(5, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
}

TEST(Backward, LinearLayerSquaredErrorClosedForm) {
  Rng rng(4);
  DenseLayer l{3, 2, normals(6, rng), {0.0, 0.0}, Activation::Identity};
  const TinyNet net({l});
  const auto x = normals(3, rng), t = normals(2, rng);
  const auto cache = net.forward(x);
  std::vector<double> resid(2), seed(2);
  for (std::size_t k = 0; k < 2; ++k) {
    resid[k] = cache.result()[k] - t[k];
    seed[k] = 2.0 * resid[k];
  }
  const Gradients g = net.backward(cache, seed);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g.layers[0].weights[k * 3 + i], 2.0 * resid[k] * x[i], 1e-14);
    EXPECT_NEAR(g.layers[0].bias[k], 2.0 * resid[k], 1e-14);
  }
}

TEST(Backward, ZeroSeedGivesZeroGradients) {
  const TinyNet net = random_net({5, 4, 3}, {Activation::Tanh, Activation::Sigmoid}, 5);
  Rng rng(6);
  const auto cache = net.forward(normals(5, rng));
  const Gradients g = net.backward(cache, std::vector<double>(3, 0.0));
  for (const auto& lg : g.layers) {
    for (double v : lg.weights) EXPECT_EQ(v, 0.0);
    for (double v : lg.bias) EXPECT_EQ(v, 0.0);
  }
  for (double v : g.input) EXPECT_EQ(v, 0.0);
}

TEST(Backward, TwoLayerMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TinyNet net = random_net({7, 6, 4}, {Activation::Tanh, Activation::Sigmoid}, 10 + seed);
    Rng rng(20 + seed);
    const auto x = normals(7, rng), r = normals(4, rng);
    const oracle::GradCheck c = oracle::check_two_layer(net, x, r);
    EXPECT_EQ(c.parameters, net.parameter_count());
    EXPECT_LT(c.max_rel_error, 1e-4) << "layer " << c.worst_layer << " index " << c.worst_index;
  }
}

// Plain full-forward central differences on a three-layer net, including
// the input gradient.
TEST(Backward, ThreeLayerMatchesPlainFiniteDifferences) {
  TinyNet net = random_net({5, 4, 4, 2}, {Activation::Tanh, Activation::Tanh, Activation::Identity}, 30);
  Rng rng(31);
  auto x = normals(5, rng);
  const auto r = normals(2, rng);
  const Gradients g = net.backward(net.forward(x), r);
  const double h = 1e-5;
  double worst = 0.0;
  auto rel = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s < 1e-10 ? std::abs(a - b) : std::abs(a - b) / s;
  };
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t i = 0; i < net.layers()[l].weights.size(); ++i) {
      const double w0 = net.layers()[l].weights[i];
      net.mutable_layer(l).weights[i] = w0 + h;
      const double up = loss_of(net, x, r);
      net.mutable_layer(l).weights[i] = w0 - h;
      const double dn = loss_of(net, x, r);
      net.mutable_layer(l).weights[i] = w0;
      worst = std::max(worst, rel(g.layers[l].weights[i], (up - dn) / (2 * h)));
    }
    for (std::size_t i = 0; i < net.layers()[l].bias.size(); ++i) {
      const double b0 = net.layers()[l].bias[i];
      net.mutable_layer(l).bias[i] = b0 + h;
      const double up = loss_of(net, x, r);
      net.mutable_layer(l).bias[i] = b0 - h;
      const double dn = loss_of(net, x, r);
      net.mutable_layer(l).bias[i] = b0;
      worst = std::max(worst, rel(g.layers[l].bias[i], (up - dn) / (2 * h)));
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = loss_of(net, x, r);
    x[i] = x0 - h;
    const double dn = loss_of(net, x, r);
    x[i] = x0;
    worst = std::max(worst, rel(g.input[i], (up - dn) / (2 * h)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Backward, StaleCacheDetected) {
  TinyNet net = random_net({3, 2, 1}, {Activation::Tanh, Activation::Sigmoid}, 40);
  const TinyNet other = random_net({3, 2, 1}, {Activation::Tanh, Activation::Sigmoid}, 41);
  const std::vector<double> x = {0.1, 0.2, 0.3}, r = {1.0};
  const auto cache = net.forward(x);
  auto code = [&](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([&] { other.backward(cache, r); }), ErrorCode::StaleCache);
  net.mutable_layer(0).bias[0] += 1.0;
  EXPECT_EQ(code([&] { net.backward(cache, r); }), ErrorCode::StaleCache);
  const auto fresh = net.forward(x);
  const Gradients g = net.backward(fresh, r);
  net.apply_gradients(g, 0.1);
  EXPECT_EQ(code([&] { net.backward(fresh, r); }), ErrorCode::StaleCache);
  EXPECT_EQ(code([&] { net.backward(net.forward(x), std::vector<double>{1.0, 2.0}); }), ErrorCode::DimMismatch);
}

TEST(Gradients, ApplyAndAccumulate) {
  TinyNet net = random_net({2, 2, 1}, {Activation::Tanh, Activation::Identity}, 50);
  const std::vector<double> x = {0.3, -0.7}, r = {1.0};
  const Gradients g = net.backward(net.forward(x), r);
  Gradients acc = g;
  accumulate(acc, g, 2.0);
  EXPECT_DOUBLE_EQ(acc.layers[0].weights[1], 3.0 * g.layers[0].weights[1]);
  const double w = net.layers()[1].weights[0];
  net.apply_gradients(g, 0.5);
  EXPECT_DOUBLE_EQ(net.layers()[1].weights[0], w - 0.5 * g.layers[1].weights[0]);
  EXPECT_TRUE(net.all_finite());
}
