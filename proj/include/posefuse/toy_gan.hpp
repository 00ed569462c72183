#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posefuse/error.hpp"
#include "posefuse/image.hpp"
#include "posefuse/loss.hpp"
#include "posefuse/tiny_net.hpp"

namespace posefuse {

/// A procedurally rendered training example: image x, its edge shape map
/// x_s, its blurred colour map x_b, and the polygon coverage mask.
struct ProceduralSample {
  Image x;
  Image x_s;
  Image x_b;
  Image mask;
};

/// Blur radius used for a sample's colour map.
inline std::size_t procedural_blur_radius(std::size_t side) { return side / 8; }

/// Random filled convex polygon (3-6 vertices) of one colour over a
/// background of another. Pure function of (seed, side); side >= 8.
ProceduralSample gen_procedural_sample(std::uint64_t seed, std::size_t side);

struct ToyConfig {
  std::size_t image_side = 16;
  std::size_t z_dim = 8;
  std::size_t g_hidden = 128;
  std::size_t d_hidden = 128;
  double learning_rate = 0.05;
  std::size_t steps = 200;
  std::size_t batch = 32;
  LossWeights weights;
  std::optional<std::uint64_t> seed;  ///< required
  bool freeze_discriminator = false;
  bool fixed_batch = false;           ///< reuse the first batch every step
  std::size_t holdout = 32;
  std::size_t bins = kDefaultHistogramBins;
  ColorReference color_reference = ColorReference::BlurMap;
  std::size_t dump_every = 0;         ///< PNG dumps of a held-out output (0 = off)
  std::string dump_dir;
};

/// Parses flat "key = value" text (# comments). Throws ParseError with the
/// line number for unknown keys or malformed values.
ToyConfig parse_toy_config(const std::string& text);
ToyConfig load_toy_config(const std::string& path);
/// Throws InvalidArgument for zero sizes, missing seed, negative weights.
void validate_toy_config(const ToyConfig& config);

struct StepRecord {
  std::size_t step = 0;
  double gan = 0.0;    ///< adversarial objective value, batch mean
  double shape = 0.0;  ///< L1, batch mean
  double color = 0.0;  ///< hard-histogram KL, batch mean
  double ta = 0.0;     ///< lambda1 * color + lambda2 * shape
};

struct TrainingReport {
  ToyConfig config;
  std::vector<StepRecord> records;
  LossReport initial_heldout;
  LossReport final_heldout;
};

std::string training_report_json(const TrainingReport& report);

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, TrainingReport partial)
      : Error(ErrorCode::DivergenceDetected, message), partial_(std::move(partial)) {}
  const TrainingReport& partial_report() const noexcept { return partial_; }

 private:
  TrainingReport partial_;
};

/// Generator maps [x_s, x_b, z] to an RGB image (sigmoid output);
/// discriminator maps [x_s, x_b, image] to a probability. Image samples are
/// fed as 2v - 1.
TinyNet make_generator(const ToyConfig& config, Rng& rng, double stddev = 0.0);
TinyNet make_discriminator(const ToyConfig& config, Rng& rng, double stddev = 0.0);

std::vector<double> generator_input(const ProceduralSample& s, std::span<const double> z);
std::vector<double> discriminator_input(const ProceduralSample& s, std::span<const double> image);

/// Per-channel Gaussian-kernel histogram (bandwidth = bin width, each sample
/// contributes unit mass), channel-major like ColorHistogram.
std::vector<double> soft_histogram(std::span<const double> samples, std::size_t channels,
                                   std::size_t bins);

/// KL(smooth(soft_hist(samples)) || smooth(reference_hist)) summed over
/// channels; writes d KL / d samples into grad when non-empty.
double soft_color_kl(std::span<const double> samples, std::span<const double> reference_hist,
                     std::size_t channels, std::size_t bins, std::span<double> grad);

/// Generator-side objective for one sample and its gradient w.r.t. the
/// generated image: log(1 - D(x_s, x_b, g)) + lambda1 * soft KL + lambda2 * L1.
double generator_objective(const TinyNet& discriminator, const ProceduralSample& s,
                           std::span<const double> generated, const ToyConfig& config,
                           std::span<double> grad);

/// Alternating D/G plain-SGD training. Throws DivergenceError (with the
/// partial report) when a loss or parameter turns non-finite.
TrainingReport train_toy_tagan(const ToyConfig& config);

}  // namespace posefuse
