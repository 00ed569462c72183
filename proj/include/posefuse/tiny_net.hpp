#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace posefuse {

class Rng;

enum class Activation { Identity, Tanh, Sigmoid };

double activate(Activation a, double x);
/// Derivative expressed through the activation output y = activate(a, x).
double activate_derivative(Activation a, double y);

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  ///< out x in, row-major
  std::vector<double> bias;     ///< out
  Activation activation = Activation::Identity;
};

/// Activations recorded by forward(); valid only for the network state
/// (generation) that produced them.
struct ForwardCache {
  const void* owner = nullptr;
  std::uint64_t generation = 0;
  std::vector<std::vector<double>> inputs;  ///< input of each layer
  std::vector<std::vector<double>> outputs; ///< post-activation output of each layer

  const std::vector<double>& result() const { return outputs.back(); }
};

struct LayerGradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

struct Gradients {
  std::vector<LayerGradient> layers;
  std::vector<double> input;  ///< d loss / d network input
};

/// Small fully connected network: affine map then activation per layer.
class TinyNet {
 public:
  TinyNet() = default;
  /// Throws InvalidArgument if consecutive dimensions do not chain.
  explicit TinyNet(std::vector<DenseLayer> layers);

  /// Layer widths {in, h1, ..., out} with the given activations (one per layer),
  /// weights ~ N(0, stddev) (stddev <= 0 means 1/sqrt(fan_in)), zero biases.
  static TinyNet random(std::span<const std::size_t> widths, std::span<const Activation> activations,
                        Rng& rng, double stddev);

  std::size_t input_dim() const { return layers_.front().in; }
  std::size_t output_dim() const { return layers_.back().out; }
  std::size_t parameter_count() const;
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::uint64_t generation() const noexcept { return generation_; }

  /// Throws DimMismatch.
  ForwardCache forward(std::span<const double> input) const;
  std::vector<double> evaluate(std::span<const double> input) const { return forward(input).result(); }

  /// Reverse-mode gradients of <loss_grad, output>. Throws StaleCache if the
  /// cache came from another network or an older parameter state, and
  /// DimMismatch for a wrongly sized loss_grad.
  Gradients backward(const ForwardCache& cache, std::span<const double> loss_grad) const;

  /// params -= learning_rate * grads. Invalidates earlier caches.
  void apply_gradients(const Gradients& grads, double learning_rate);

  /// Mutable parameter access; invalidates earlier caches.
  DenseLayer& mutable_layer(std::size_t i);

  bool all_finite() const;

 private:
  std::vector<DenseLayer> layers_;
  std::uint64_t generation_ = 1;
};

/// Adds b * a into acc (same-shaped gradients), for batch accumulation.
void accumulate(Gradients& acc, const Gradients& add, double scale = 1.0);

}  // namespace posefuse
