#include "posefuse/tiny_net.hpp"

#include <cmath>
#include <string>

#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"

namespace posefuse {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return x;
}

double activate_derivative(Activation a, double y) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Sigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

TinyNet::TinyNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::InvalidArgument, "network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in == 0 || l.out == 0 || l.weights.size() != l.in * l.out || l.bias.size() != l.out) {
      throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(i) + " has inconsistent shapes");
    }
    if (i > 0 && layers_[i - 1].out != l.in) {
      throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(i) + " does not chain");
    }
  }
  if (!all_finite()) throw Error(ErrorCode::InvalidArgument, "network parameters must be finite");
}

TinyNet TinyNet::random(std::span<const std::size_t> widths, std::span<const Activation> activations,
                        Rng& rng, double stddev) {
  if (widths.size() < 2 || activations.size() != widths.size() - 1) {
    throw Error(ErrorCode::InvalidArgument, "need one activation per layer");
  }
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    DenseLayer l;
    l.in = widths[i];
    l.out = widths[i + 1];
    l.activation = activations[i];
    const double s = stddev > 0.0 ? stddev : 1.0 / std::sqrt(static_cast<double>(l.in));
    l.weights.resize(l.in * l.out);
    for (double& w : l.weights) w = s * rng.normal();
    l.bias.assign(l.out, 0.0);
    layers.push_back(std::move(l));
  }
  return TinyNet(std::move(layers));
}

std::size_t TinyNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

ForwardCache TinyNet::forward(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw Error(ErrorCode::DimMismatch, "network input has " + std::to_string(input.size()) +
                                            " values, expected " + std::to_string(input_dim()));
  }
  ForwardCache cache;
  cache.owner = this;
  cache.generation = generation_;
  std::vector<double> current(input.begin(), input.end());
  for (const auto& l : layers_) {
    std::vector<double> next(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double* w = l.weights.data() + o * l.in;
      double s = l.bias[o];
      for (std::size_t i = 0; i < l.in; ++i) s += w[i] * current[i];
      next[o] = activate(l.activation, s);
    }
    cache.inputs.push_back(std::move(current));
    current = next;
    cache.outputs.push_back(std::move(next));
  }
  return cache;
}

Gradients TinyNet::backward(const ForwardCache& cache, std::span<const double> loss_grad) const {
  if (cache.owner != this || cache.generation != generation_ || cache.outputs.size() != layers_.size()) {
    throw Error(ErrorCode::StaleCache, "forward cache does not belong to the current network state");
  }
  if (loss_grad.size() != output_dim()) {
    throw Error(ErrorCode::DimMismatch, "loss gradient has " + std::to_string(loss_grad.size()) +
                                            " values, expected " + std::to_string(output_dim()));
  }
  Gradients g;
  g.layers.resize(layers_.size());
  std::vector<double> upstream(loss_grad.begin(), loss_grad.end());
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& l = layers_[li];
    const auto& x = cache.inputs[li];
    const auto& y = cache.outputs[li];
    std::vector<double> delta(l.out);
    for (std::size_t o = 0; o < l.out; ++o) delta[o] = upstream[o] * activate_derivative(l.activation, y[o]);

    auto& lg = g.layers[li];
    lg.weights.assign(l.in * l.out, 0.0);
    lg.bias = delta;
    std::vector<double> down(l.in, 0.0);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* gw = lg.weights.data() + o * l.in;
      const double* w = l.weights.data() + o * l.in;
      for (std::size_t i = 0; i < l.in; ++i) {
        gw[i] = d * x[i];
        down[i] += w[i] * d;
      }
    }
    upstream = std::move(down);
  }
  g.input = std::move(upstream);
  return g;
}

void TinyNet::apply_gradients(const Gradients& grads, double lr) {
  if (grads.layers.size() != layers_.size()) {
    throw Error(ErrorCode::DimMismatch, "gradient layer count does not match the network");
  }
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    auto& l = layers_[li];
    const auto& gl = grads.layers[li];
    for (std::size_t i = 0; i < l.weights.size(); ++i) l.weights[i] -= lr * gl.weights[i];
    for (std::size_t i = 0; i < l.bias.size(); ++i) l.bias[i] -= lr * gl.bias[i];
  }
  ++generation_;
}

DenseLayer& TinyNet::mutable_layer(std::size_t i) {
  ++generation_;
  return layers_.at(i);
}

bool TinyNet::all_finite() const {
  for (const auto& l : layers_) {
    for (double w : l.weights) {
      if (!std::isfinite(w)) return false;
    }
    for (double b : l.bias) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

void accumulate(Gradients& acc, const Gradients& add, double scale) {
  if (acc.layers.empty()) {
    acc.layers.resize(add.layers.size());
    for (std::size_t li = 0; li < add.layers.size(); ++li) {
      acc.layers[li].weights.assign(add.layers[li].weights.size(), 0.0);
      acc.layers[li].bias.assign(add.layers[li].bias.size(), 0.0);
    }
    acc.input.assign(add.input.size(), 0.0);
  }
  for (std::size_t li = 0; li < add.layers.size(); ++li) {
    auto& a = acc.layers[li];
    const auto& b = add.layers[li];
    for (std::size_t i = 0; i < b.weights.size(); ++i) a.weights[i] += scale * b.weights[i];
    for (std::size_t i = 0; i < b.bias.size(); ++i) a.bias[i] += scale * b.bias[i];
  }
  for (std::size_t i = 0; i < add.input.size() && i < acc.input.size(); ++i) acc.input[i] += scale * add.input[i];
}

}  // namespace posefuse
