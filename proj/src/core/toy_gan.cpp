#include "posefuse/toy_gan.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "posefuse/parallel.hpp"
#include "posefuse/png_io.hpp"

namespace posefuse {

// ---------------------------------------------------------------------------
// Procedural samples

namespace {

struct Vertex {
  double x, y;
};

bool inside_convex(const std::vector<Vertex>& poly, double px, double py) {
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vertex& a = poly[i];
    const Vertex& b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
    if (cross > 0) pos = true;
    if (cross < 0) neg = true;
    if (pos && neg) return false;
  }
  return true;
}

}  // namespace

ProceduralSample gen_procedural_sample(std::uint64_t seed, std::size_t side) {
  if (side < 8) throw Error(ErrorCode::InvalidArgument, "procedural samples need side >= 8");
  Rng rng(seed);
  const double s = static_cast<double>(side);
  const std::size_t n_vertices = 3 + static_cast<std::size_t>(rng.below(4));
  const double cx = rng.uniform(0.35, 0.65) * s;
  const double cy = rng.uniform(0.35, 0.65) * s;
  const double radius = rng.uniform(0.22, 0.40) * s;
  std::vector<double> angles(n_vertices);
  for (double& a : angles) a = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  std::sort(angles.begin(), angles.end());
  std::vector<Vertex> poly;
  for (double a : angles) poly.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});

  double bg[3], fill[3];
  for (double& c : bg) c = rng.uniform();
  double contrast = 0.0;
  do {
    contrast = 0.0;
    for (int c = 0; c < 3; ++c) {
      fill[c] = rng.uniform();
      contrast += std::abs(fill[c] - bg[c]);
    }
  } while (contrast < 0.6);

  constexpr int kSuper = 4;
  Image mask(side, side, 1);
  Image x(side, side, 3);
  for (std::size_t py = 0; py < side; ++py) {
    for (std::size_t px = 0; px < side; ++px) {
      int hits = 0;
      for (int j = 0; j < kSuper; ++j) {
        for (int i = 0; i < kSuper; ++i) {
          if (inside_convex(poly, static_cast<double>(px) + (i + 0.5) / kSuper,
                            static_cast<double>(py) + (j + 0.5) / kSuper)) {
            ++hits;
          }
        }
      }
      const double m = static_cast<double>(hits) / (kSuper * kSuper);
      mask.at(px, py) = m;
      for (std::size_t c = 0; c < 3; ++c) x.at(px, py, c) = std::clamp(m * fill[c] + (1.0 - m) * bg[c], 0.0, 1.0);
    }
  }
  ProceduralSample out;
  out.x_s = edge_map(x);
  out.x_b = blur_average(x, procedural_blur_radius(side));
  out.x = std::move(x);
  out.mask = std::move(mask);
  return out;
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& v) {
  std::size_t pos = 0;
  if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative count");
  const unsigned long long r = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return static_cast<std::size_t>(r);
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  const double r = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return r;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean");
}

}  // namespace

ToyConfig parse_toy_config(const std::string& text) {
  ToyConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      if (key == "image_side") c.image_side = to_size(value);
      else if (key == "z_dim") c.z_dim = to_size(value);
      else if (key == "g_hidden") c.g_hidden = to_size(value);
      else if (key == "d_hidden") c.d_hidden = to_size(value);
      else if (key == "hidden") c.g_hidden = c.d_hidden = to_size(value);
      else if (key == "learning_rate") c.learning_rate = to_double(value);
      else if (key == "steps") c.steps = to_size(value);
      else if (key == "batch") c.batch = to_size(value);
      else if (key == "lambda1") c.weights.lambda1 = to_double(value);
      else if (key == "lambda2") c.weights.lambda2 = to_double(value);
      else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_size(value));
      else if (key == "freeze_discriminator") c.freeze_discriminator = to_bool(value);
      else if (key == "fixed_batch") c.fixed_batch = to_bool(value);
      else if (key == "holdout") c.holdout = to_size(value);
      else if (key == "bins") c.bins = to_size(value);
      else if (key == "color_reference") {
        if (value == "blur" || value == "x_b") c.color_reference = ColorReference::BlurMap;
        else if (value == "target" || value == "y") c.color_reference = ColorReference::Target;
        else throw std::invalid_argument("expected blur or target");
      } else if (key == "dump_every") c.dump_every = to_size(value);
      else if (key == "dump_dir") c.dump_dir = value;
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, "config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }
  return c;
}

ToyConfig load_toy_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toy_config(ss.str());
}

void validate_toy_config(const ToyConfig& c) {
  if (!c.seed) throw Error(ErrorCode::InvalidArgument, "toy config requires a seed");
  if (c.image_side < 8) throw Error(ErrorCode::InvalidArgument, "image_side must be >= 8");
  if (c.z_dim == 0 || c.g_hidden == 0 || c.d_hidden == 0 || c.batch == 0 || c.holdout == 0 || c.bins == 0) {
    throw Error(ErrorCode::InvalidArgument, "toy config sizes must be positive");
  }
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw Error(ErrorCode::InvalidArgument, "learning_rate must be positive");
  }
  if (!std::isfinite(c.weights.lambda1) || !std::isfinite(c.weights.lambda2) || c.weights.lambda1 < 0.0 ||
      c.weights.lambda2 < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "loss weights must be finite and non-negative");
  }
}

// ---------------------------------------------------------------------------
// Networks and objectives

TinyNet make_generator(const ToyConfig& c, Rng& rng, double stddev) {
  const std::size_t px = c.image_side * c.image_side;
  const std::size_t widths[] = {px + 3 * px + c.z_dim, c.g_hidden, 3 * px};
  const Activation acts[] = {Activation::Tanh, Activation::Sigmoid};
  return TinyNet::random(widths, acts, rng, stddev);
}

TinyNet make_discriminator(const ToyConfig& c, Rng& rng, double stddev) {
  const std::size_t px = c.image_side * c.image_side;
  const std::size_t widths[] = {px + 3 * px + 3 * px, c.d_hidden, 1};
  const Activation acts[] = {Activation::Tanh, Activation::Sigmoid};
  return TinyNet::random(widths, acts, rng, stddev);
}

namespace {

// Image samples enter both nets as 2v - 1 so tanh units start unsaturated and
// inputs are zero-mean.
double centred(double v) { return 2.0 * v - 1.0; }

}  // namespace

std::vector<double> generator_input(const ProceduralSample& s, std::span<const double> z) {
  std::vector<double> in;
  in.reserve(s.x_s.data().size() + s.x_b.data().size() + z.size());
  for (double v : s.x_s.data()) in.push_back(centred(v));
  for (double v : s.x_b.data()) in.push_back(centred(v));
  in.insert(in.end(), z.begin(), z.end());
  return in;
}

std::vector<double> discriminator_input(const ProceduralSample& s, std::span<const double> image) {
  std::vector<double> in;
  in.reserve(s.x_s.data().size() + s.x_b.data().size() + image.size());
  for (double v : s.x_s.data()) in.push_back(centred(v));
  for (double v : s.x_b.data()) in.push_back(centred(v));
  for (double v : image) in.push_back(centred(v));
  return in;
}

namespace {

// Kernel weights of one sample over all bins, normalized to unit mass.
void kernel_weights(double v, std::size_t bins, std::vector<double>& w, std::vector<double>* e) {
  const double sigma = 1.0 / static_cast<double>(bins);
  double z = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double centre = (static_cast<double>(b) + 0.5) * sigma;
    const double d = (v - centre) / sigma;
    w[b] = std::exp(-0.5 * d * d);
    z += w[b];
    if (e) (*e)[b] = -(v - centre) / (sigma * sigma);
  }
  for (std::size_t b = 0; b < bins; ++b) w[b] /= z;
}

}  // namespace

std::vector<double> soft_histogram(std::span<const double> samples, std::size_t channels, std::size_t bins) {
  if (channels == 0 || bins == 0 || samples.size() % channels != 0 || samples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "soft histogram needs whole pixels and bins");
  }
  const std::size_t pixels = samples.size() / channels;
  std::vector<double> h(channels * bins, 0.0);
  std::vector<double> w(bins);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      kernel_weights(samples[p * channels + c], bins, w, nullptr);
      for (std::size_t b = 0; b < bins; ++b) h[c * bins + b] += w[b];
    }
  }
  for (double& v : h) v /= static_cast<double>(pixels);
  return h;
}

double soft_color_kl(std::span<const double> samples, std::span<const double> reference_hist,
                     std::size_t channels, std::size_t bins, std::span<double> grad) {
  if (reference_hist.size() != channels * bins) {
    throw Error(ErrorCode::LayoutMismatch, "reference histogram layout does not match");
  }
  const std::vector<double> h = soft_histogram(samples, channels, bins);
  const std::size_t pixels = samples.size() / channels;
  const double eps = kHistogramSmoothing;

  double kl = 0.0;
  std::vector<double> dkl_dh(channels * bins);
  for (std::size_t c = 0; c < channels; ++c) {
    double sh = 0.0, sr = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      sh += h[c * bins + b] + eps;
      sr += reference_hist[c * bins + b] + eps;
    }
    for (std::size_t b = 0; b < bins; ++b) {
      const double p = (h[c * bins + b] + eps) / sh;
      const double q = (reference_hist[c * bins + b] + eps) / sr;
      kl += p * std::log(p / q);
      // d/dh_b of sum_b' p_b' log(p_b'/q_b') with p = (h + eps) / S, S = sum(h + eps).
      dkl_dh[c * bins + b] = (std::log(p / q) + 1.0) / sh;
    }
    // Normalization couples the bins: subtract the mean-field term.
    double coupling = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double p = (h[c * bins + b] + eps) / sh;
      coupling += p * dkl_dh[c * bins + b];
    }
    for (std::size_t b = 0; b < bins; ++b) dkl_dh[c * bins + b] -= coupling;
  }

  if (!grad.empty()) {
    if (grad.size() != samples.size()) throw Error(ErrorCode::DimMismatch, "gradient buffer size");
    std::vector<double> w(bins), e(bins);
    const double inv_n = 1.0 / static_cast<double>(pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
      for (std::size_t c = 0; c < channels; ++c) {
        kernel_weights(samples[p * channels + c], bins, w, &e);
        double e_bar = 0.0;
        for (std::size_t b = 0; b < bins; ++b) e_bar += w[b] * e[b];
        double g = 0.0;
        for (std::size_t b = 0; b < bins; ++b) g += dkl_dh[c * bins + b] * w[b] * (e[b] - e_bar);
        grad[p * channels + c] = g * inv_n;
      }
    }
  }
  return kl;
}

namespace {

const Image& color_reference_image(const ProceduralSample& s, const ToyConfig& c) {
  return c.color_reference == ColorReference::BlurMap ? s.x_b : s.x;
}

}  // namespace

double generator_objective(const TinyNet& discriminator, const ProceduralSample& s,
                           std::span<const double> generated, const ToyConfig& c, std::span<double> grad) {
  const std::size_t n = generated.size();
  const auto target = s.x.data();
  if (target.size() != n) throw Error(ErrorCode::DimMismatch, "generated image size");

  // Adversarial term through D.
  const std::vector<double> d_in = discriminator_input(s, generated);
  const ForwardCache dc = discriminator.forward(d_in);
  const double d_fake = dc.result()[0];
  const double one_minus = std::max(1.0 - d_fake, kProbabilityFloor);
  double value = std::log(one_minus);

  std::vector<double> g_adv;
  if (!grad.empty()) {
    const double seed_grad[1] = {-1.0 / one_minus};
    const Gradients dg = discriminator.backward(dc, seed_grad);
    g_adv.assign(dg.input.end() - static_cast<std::ptrdiff_t>(n), dg.input.end());
    for (double& g : g_adv) g *= 2.0;  // d(2v - 1)/dv
  }

  // Colour term on soft histograms.
  const std::vector<double> ref_hist =
      soft_histogram(color_reference_image(s, c).data(), 3, c.bins);
  std::vector<double> g_color(grad.empty() ? 0 : n);
  const double kl = soft_color_kl(generated, ref_hist, 3, c.bins, g_color);
  value += c.weights.lambda1 * kl;

  // Shape term, mean L1.
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) l1 += std::abs(generated[i] - target[i]);
  value += c.weights.lambda2 * l1 / static_cast<double>(n);

  if (!grad.empty()) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = generated[i] - target[i];
      const double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
      grad[i] = g_adv[i] + c.weights.lambda1 * g_color[i] + c.weights.lambda2 * sign * inv_n;
    }
  }
  return value;
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

constexpr std::uint64_t kTrainStream = 1, kHoldoutStream = 2, kHoldoutNoise = 3, kTrainNoise = 4,
                        kGenInit = 5, kDiscInit = 6;

Image to_image(const std::vector<double>& v, std::size_t side) {
  std::vector<double> data(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) data[i] = std::clamp(v[i], 0.0, 1.0);
  return Image(side, side, 3, std::move(data));
}

std::vector<double> draw_noise(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  for (double& v : z) v = rng.normal();
  return z;
}

struct EvalSet {
  std::vector<ProceduralSample> samples;
  std::vector<std::vector<double>> noise;
};

LossReport evaluate(const TinyNet& g, const TinyNet& d, const EvalSet& set, const ToyConfig& c) {
  LossReport mean;
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto& s = set.samples[i];
    const auto out = g.evaluate(generator_input(s, set.noise[i]));
    const Image gen = to_image(out, c.image_side);
    const LossReport r = ta_loss(c.weights, s.x, gen, s.x_b, c.bins, c.color_reference);
    const double d_real = d.evaluate(discriminator_input(s, s.x.data()))[0];
    const double d_fake = d.evaluate(discriminator_input(s, out))[0];
    mean.shape += r.shape;
    mean.color += r.color;
    mean.gan += gan_objective(d_real, d_fake);
  }
  const double inv = 1.0 / static_cast<double>(set.samples.size());
  mean.shape *= inv;
  mean.color *= inv;
  mean.gan *= inv;
  mean.ta = c.weights.lambda1 * mean.color + c.weights.lambda2 * mean.shape;
  return mean;
}

bool finite_record(const StepRecord& r) {
  return std::isfinite(r.gan) && std::isfinite(r.shape) && std::isfinite(r.color) && std::isfinite(r.ta);
}

}  // namespace

TrainingReport train_toy_tagan(const ToyConfig& c) {
  validate_toy_config(c);
  const std::uint64_t seed = *c.seed;

  Rng g_init(mix_seed(seed, kGenInit));
  Rng d_init(mix_seed(seed, kDiscInit));
  TinyNet gen = make_generator(c, g_init);
  TinyNet disc = make_discriminator(c, d_init);

  EvalSet holdout;
  Rng holdout_noise(mix_seed(seed, kHoldoutNoise));
  for (std::size_t i = 0; i < c.holdout; ++i) {
    holdout.samples.push_back(gen_procedural_sample(mix_seed(mix_seed(seed, kHoldoutStream), i), c.image_side));
    holdout.noise.push_back(draw_noise(holdout_noise, c.z_dim));
  }

  TrainingReport report;
  report.config = c;
  report.initial_heldout = evaluate(gen, disc, holdout, c);
  report.records.reserve(c.steps);

  if (c.dump_every > 0 && !c.dump_dir.empty()) std::filesystem::create_directories(c.dump_dir);
  const auto dump = [&](std::size_t step) {
    if (c.dump_every == 0 || c.dump_dir.empty() || step % c.dump_every != 0) return;
    const auto out = gen.evaluate(generator_input(holdout.samples[0], holdout.noise[0]));
    char name[32];
    std::snprintf(name, sizeof(name), "step_%06zu.png", step);
    write_png(to_image(out, c.image_side), (std::filesystem::path(c.dump_dir) / name).string());
  };
  dump(0);

  Rng train_noise(mix_seed(seed, kTrainNoise));
  std::vector<ProceduralSample> batch;
  const double inv_b = 1.0 / static_cast<double>(c.batch);
  const std::size_t out_dim = gen.output_dim();

  for (std::size_t step = 0; step < c.steps; ++step) {
    if (batch.empty() || !c.fixed_batch) {
      batch.clear();
      const std::size_t first = c.fixed_batch ? 0 : step * c.batch;
      for (std::size_t b = 0; b < c.batch; ++b) {
        batch.push_back(gen_procedural_sample(mix_seed(mix_seed(seed, kTrainStream), first + b), c.image_side));
      }
    }
    std::vector<std::vector<double>> noise;
    for (std::size_t b = 0; b < c.batch; ++b) noise.push_back(draw_noise(train_noise, c.z_dim));

    // Losses at the start of the step, then the updates.
    StepRecord rec;
    rec.step = step;
    std::vector<std::vector<double>> fakes(c.batch);
    for (std::size_t b = 0; b < c.batch; ++b) {
      fakes[b] = gen.evaluate(generator_input(batch[b], noise[b]));
      const LossReport r = ta_loss(c.weights, batch[b].x, to_image(fakes[b], c.image_side), batch[b].x_b, c.bins,
                                   c.color_reference);
      const double d_real = disc.evaluate(discriminator_input(batch[b], batch[b].x.data()))[0];
      const double d_fake = disc.evaluate(discriminator_input(batch[b], fakes[b]))[0];
      rec.gan += gan_objective(d_real, d_fake) * inv_b;
      rec.shape += r.shape * inv_b;
      rec.color += r.color * inv_b;
    }
    rec.ta = c.weights.lambda1 * rec.color + c.weights.lambda2 * rec.shape;
    if (!finite_record(rec)) {
      report.final_heldout = {};
      throw DivergenceError("non-finite loss at step " + std::to_string(step), report);
    }
    report.records.push_back(rec);

    if (!c.freeze_discriminator) {
      // Ascend log D(real) + log(1 - D(fake)) by descending its negation.
      Gradients dg;
      for (std::size_t b = 0; b < c.batch; ++b) {
        const ForwardCache real = disc.forward(discriminator_input(batch[b], batch[b].x.data()));
        const double gr[1] = {-1.0 / std::max(real.result()[0], kProbabilityFloor)};
        accumulate(dg, disc.backward(real, gr), inv_b);
        const ForwardCache fake = disc.forward(discriminator_input(batch[b], fakes[b]));
        const double gf[1] = {1.0 / std::max(1.0 - fake.result()[0], kProbabilityFloor)};
        accumulate(dg, disc.backward(fake, gf), inv_b);
      }
      disc.apply_gradients(dg, c.learning_rate);
    }

    Gradients gg;
    std::vector<double> grad_out(out_dim);
    for (std::size_t b = 0; b < c.batch; ++b) {
      const ForwardCache fc = gen.forward(generator_input(batch[b], noise[b]));
      generator_objective(disc, batch[b], fc.result(), c, grad_out);
      accumulate(gg, gen.backward(fc, grad_out), inv_b);
    }
    gen.apply_gradients(gg, c.learning_rate);

    if (!gen.all_finite() || !disc.all_finite()) {
      throw DivergenceError("non-finite parameters after step " + std::to_string(step), report);
    }
    dump(step + 1);
  }

  report.final_heldout = evaluate(gen, disc, holdout, c);
  if (!std::isfinite(report.final_heldout.ta)) {
    throw DivergenceError("non-finite held-out loss", report);
  }
  return report;
}

std::string training_report_json(const TrainingReport& r) {
  const ToyConfig& c = r.config;
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["image_side"] = c.image_side;
  cfg["z_dim"] = c.z_dim;
  cfg["g_hidden"] = c.g_hidden;
  cfg["d_hidden"] = c.d_hidden;
  cfg["learning_rate"] = c.learning_rate;
  cfg["steps"] = c.steps;
  cfg["batch"] = c.batch;
  cfg["lambda1"] = c.weights.lambda1;
  cfg["lambda2"] = c.weights.lambda2;
  cfg["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json(nullptr);
  cfg["freeze_discriminator"] = c.freeze_discriminator;
  cfg["fixed_batch"] = c.fixed_batch;
  cfg["holdout"] = c.holdout;
  cfg["bins"] = c.bins;
  cfg["color_reference"] = c.color_reference == ColorReference::BlurMap ? "blur" : "target";
  j["config"] = std::move(cfg);
  j["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json(nullptr);
  const auto loss = [](const LossReport& l) {
    nlohmann::ordered_json o;
    o["gan"] = l.gan;
    o["shape"] = l.shape;
    o["color"] = l.color;
    o["ta"] = l.ta;
    return o;
  };
  j["initial_heldout"] = loss(r.initial_heldout);
  j["final_heldout"] = loss(r.final_heldout);
  j["initial_heldout_ta"] = r.initial_heldout.ta;
  j["final_heldout_ta"] = r.final_heldout.ta;
  auto recs = nlohmann::ordered_json::array();
  for (const auto& s : r.records) {
    nlohmann::ordered_json o;
    o["step"] = s.step;
    o["gan"] = s.gan;
    o["shape"] = s.shape;
    o["color"] = s.color;
    o["ta"] = s.ta;
    recs.push_back(std::move(o));
  }
  j["records"] = std::move(recs);
  return j.dump(2) + "\n";
}

}  // namespace posefuse
