// posefuse command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "posefuse/posefuse.h"

namespace {

struct CommandError {
  pf_status status;
  std::string message;
};

void check(pf_status s) {
  if (s != PF_OK) throw CommandError{s, pf_last_error()};
}

struct StringDeleter {
  void operator()(char* p) const { pf_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct BankDeleter {
  void operator()(pf_bank* p) const { pf_bank_free(p); }
};
struct IndexDeleter {
  void operator()(pf_index* p) const { pf_index_free(p); }
};
struct ImageDeleter {
  void operator()(pf_image* p) const { pf_image_free(p); }
};
using Bank = std::unique_ptr<pf_bank, BankDeleter>;
using Index = std::unique_ptr<pf_index, IndexDeleter>;
using Img = std::unique_ptr<pf_image, ImageDeleter>;

Bank load_bank(const std::string& path) {
  pf_bank* b = nullptr;
  check(pf_bank_load(path.c_str(), &b));
  return Bank(b);
}

Img load_image(const std::string& path) {
  pf_image* im = nullptr;
  check(pf_image_read(path.c_str(), &im));
  return Img(im);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError{PF_ERR_IO, "cannot open '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw CommandError{PF_ERR_IO, "cannot write '" + path + "'"};
}

// Writes to a file when a path is given, stdout otherwise.
void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    write_file(*path, text);
  } else {
    std::cout << text;
    std::cout.flush();
  }
}

std::string with_newline(const char* s) {
  std::string t(s ? s : "");
  if (t.empty() || t.back() != '\n') t += '\n';
  return t;
}

pf_color_reference parse_reference(const std::string& s) {
  return s == "target" ? PF_COLOR_TARGET : PF_COLOR_BLUR;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posefuse: hand-pose retrieval, compositing, losses and evaluation"};
  app.set_config("--config", "", "Flat key = value defaults file; command-line flags win");
  app.require_subcommand(1);
  std::function<void()> run;

  // index build / query
  auto* index = app.add_subcommand("index", "Product-quantized pose index");
  index->require_subcommand(1);

  auto* build = index->add_subcommand("build", "Train codebooks and encode a pose bank");
  std::string build_poses, build_out;
  pf_index_params params;
  pf_index_params_default(&params);
  build->add_option("--poses", build_poses, "Pose JSONL")->required();
  build->add_option("--out", build_out, "Index file to write")->required();
  build->add_option("--m", params.m, "Subspaces")->capture_default_str();
  build->add_option("--k", params.k, "Centroids per subspace")->capture_default_str();
  build->add_option("--iters", params.iters, "Lloyd iteration cap")->capture_default_str();
  build->add_option("--seed", params.seed, "Seed")->capture_default_str();
  build->add_option("--train-sample", params.train_sample, "Train on a seeded sample of this size (0 = all)");
  build->add_option("--threads", params.threads, "Worker threads (0 = POSEFUSE_THREADS / auto)");
  build->callback([&] {
    run = [&] {
      Bank bank = load_bank(build_poses);
      pf_index* idx = nullptr;
      char* summary = nullptr;
      check(pf_index_build(bank.get(), &params, &idx, &summary));
      Index owned(idx);
      OwnedString s(summary);
      check(pf_index_save(idx, build_out.c_str()));
      std::cout << with_newline(s.get());
    };
  });

  auto* query = index->add_subcommand("query", "Retrieve the best bank poses for each target");
  std::string q_index, q_poses, q_targets;
  std::optional<std::string> q_out;
  std::size_t q_k = 1, q_shortlist = 200;
  bool q_exact = false;
  query->add_option("--index", q_index, "Index file");
  query->add_option("--poses", q_poses, "Bank pose JSONL the index was built from")->required();
  query->add_option("--targets", q_targets, "Target pose JSONL")->required();
  query->add_option("--k", q_k, "Matches per target")->capture_default_str();
  query->add_option("--shortlist", q_shortlist, "ADC shortlist size")->capture_default_str();
  query->add_flag("--exact", q_exact, "Exhaustive search instead of the index");
  query->add_option("--out", q_out, "JSONL output (default stdout)");
  query->callback([&] {
    run = [&] {
      if (!q_exact && q_index.empty()) throw CommandError{PF_ERR_INVALID_ARGUMENT, "--index is required without --exact"};
      Bank bank = load_bank(q_poses);
      Bank targets = load_bank(q_targets);
      Index idx;
      if (!q_exact) {
        pf_index* raw = nullptr;
        check(pf_index_load(q_index.c_str(), &raw));
        idx.reset(raw);
      }
      std::string out;
      for (std::size_t i = 0; i < pf_bank_size(targets.get()); ++i) {
        char* line = nullptr;
        check(pf_retrieve_json(bank.get(), idx.get(), targets.get(), i, q_k, q_shortlist, &line));
        OwnedString s(line);
        out += with_newline(s.get());
      }
      emit(q_out, out);
    };
  });

  // maps
  auto* maps = app.add_subcommand("maps", "Write the shape (edge) and colour (blur) maps of an image");
  std::string m_image, m_shape, m_color;
  std::size_t m_radius = 5;
  maps->add_option("--image", m_image, "Input PNG")->required();
  maps->add_option("--shape-out", m_shape, "Shape map PNG")->required();
  maps->add_option("--color-out", m_color, "Colour map PNG")->required();
  maps->add_option("--blur-radius", m_radius, "Box blur radius")->capture_default_str();
  maps->callback([&] {
    run = [&] {
      Img im = load_image(m_image);
      pf_image *shape = nullptr, *color = nullptr;
      check(pf_image_edge_map(im.get(), &shape));
      Img s(shape);
      check(pf_image_blur(im.get(), m_radius, &color));
      Img c(color);
      check(pf_image_write(s.get(), m_shape.c_str()));
      check(pf_image_write(c.get(), m_color.c_str()));
    };
  });

  // composite
  auto* comp = app.add_subcommand("composite", "Run a composite manifest");
  std::string c_manifest;
  std::size_t c_threads = 0;
  comp->add_option("--manifest", c_manifest, "Manifest JSON")->required();
  comp->add_option("--threads", c_threads, "Worker threads (0 = POSEFUSE_THREADS / auto)");
  comp->callback([&] {
    run = [&] {
      char* report = nullptr;
      const pf_status s = pf_run_composite(c_manifest.c_str(), c_threads, &report);
      const std::string message = pf_last_error();
      OwnedString r(report);
      if (r) std::cout << with_newline(r.get());
      if (s != PF_OK) throw CommandError{s, message};
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "EPE / PCK / AUC of predictions against ground truth");
  std::string e_pred, e_gt, e_space = "2d", e_stb = "none";
  std::optional<double> e_threshold, e_min, e_max;
  std::size_t e_steps = 100;
  std::optional<std::string> e_out, e_csv;
  eval->add_option("--pred", e_pred, "Prediction JSONL")->required();
  eval->add_option("--gt", e_gt, "Ground-truth JSONL")->required();
  eval->add_option("--space", e_space, "2d (pixels) or 3d (millimetres)")
      ->check(CLI::IsMember({"2d", "3d"}))
      ->capture_default_str();
  eval->add_option("--pck-threshold", e_threshold, "PCK threshold (default 5 px / 20 mm)");
  eval->add_option("--auc-min", e_min, "AUC range start (default 0 px / 20 mm)");
  eval->add_option("--auc-max", e_max, "AUC range end (default 30 px / 50 mm)");
  eval->add_option("--steps", e_steps, "Curve samples")->capture_default_str();
  eval->add_option("--stb-root", e_stb, "Convert ground-truth palm roots: none, from-mcp, from-palm")
      ->check(CLI::IsMember({"none", "from-mcp", "from-palm"}))
      ->capture_default_str();
  eval->add_option("--out", e_out, "Report JSON (default stdout)");
  eval->add_option("--csv", e_csv, "PCK curve CSV");
  eval->callback([&] {
    run = [&] {
      pf_eval_params p;
      pf_eval_params_default(&p);
      p.space = e_space == "3d" ? PF_SPACE_3D : PF_SPACE_2D;
      if (e_threshold) p.pck_threshold = *e_threshold;
      if (e_min.has_value() != e_max.has_value()) {
        throw CommandError{PF_ERR_BAD_RANGE, "give both --auc-min and --auc-max"};
      }
      if (e_min) {
        p.t_min = *e_min;
        p.t_max = *e_max;
      }
      p.steps = e_steps;
      p.stb = e_stb == "from-mcp" ? PF_STB_FROM_MCP : (e_stb == "from-palm" ? PF_STB_FROM_PALM : PF_STB_NONE);
      char *json = nullptr, *csv = nullptr;
      check(pf_eval_files(e_pred.c_str(), e_gt.c_str(), &p, &json, &csv));
      OwnedString j(json), c(csv);
      emit(e_out, j.get());
      if (e_csv) write_file(*e_csv, c.get());
    };
  });

  // train-toy
  auto* toy = app.add_subcommand("train-toy", "Train the toy conditional GAN");
  std::string t_config;
  std::optional<std::string> t_out;
  std::optional<std::size_t> t_steps, t_batch, t_dump_every;
  std::optional<std::uint64_t> t_seed;
  std::optional<double> t_lr, t_l1, t_l2;
  std::optional<std::string> t_dump_dir;
  bool t_freeze = false;
  toy->add_option("toy_config", t_config, "Toy config (key = value)")->required();
  toy->add_option("--out", t_out, "Report JSON (default stdout)");
  toy->add_option("--steps", t_steps);
  toy->add_option("--batch", t_batch);
  toy->add_option("--seed", t_seed);
  toy->add_option("--learning-rate", t_lr);
  toy->add_option("--lambda1", t_l1);
  toy->add_option("--lambda2", t_l2);
  toy->add_option("--dump-every", t_dump_every, "Write a held-out sample PNG every N steps");
  toy->add_option("--dump-dir", t_dump_dir);
  toy->add_flag("--freeze-discriminator", t_freeze);
  toy->callback([&] {
    run = [&] {
      std::string text = read_file(t_config) + "\n";
      const auto set = [&](const char* key, const auto& v) {
        if (v) {
          std::ostringstream os;
          os.precision(17);
          os << key << " = " << *v << "\n";
          text += os.str();
        }
      };
      set("steps", t_steps);
      set("batch", t_batch);
      set("seed", t_seed);
      set("learning_rate", t_lr);
      set("lambda1", t_l1);
      set("lambda2", t_l2);
      set("dump_every", t_dump_every);
      set("dump_dir", t_dump_dir);
      if (t_freeze) text += "freeze_discriminator = true\n";
      char* report = nullptr;
      const pf_status s = pf_train_toy(text.c_str(), &report);
      const std::string message = pf_last_error();
      OwnedString r(report);
      if (r) emit(t_out, r.get());
      if (s != PF_OK) throw CommandError{s, message};
    };
  });

  // loss
  auto* loss = app.add_subcommand("loss", "Tonality-alignment loss of a generated image");
  std::string l_gen, l_target, l_reference = "blur";
  std::optional<std::string> l_color_map, l_out;
  std::size_t l_radius = 5, l_bins = 32;
  double l_l1 = 10.0, l_l2 = 100.0;
  std::optional<double> l_d_real, l_d_fake;
  loss->add_option("--generated", l_gen, "Generated image PNG")->required();
  loss->add_option("--target", l_target, "Target image PNG (y)")->required();
  loss->add_option("--color-map", l_color_map, "Colour map PNG (default: blur of the target)");
  loss->add_option("--blur-radius", l_radius, "Blur radius when no colour map is given")->capture_default_str();
  loss->add_option("--bins", l_bins, "Histogram bins per channel")->capture_default_str();
  loss->add_option("--lambda1", l_l1, "Colour weight")->capture_default_str();
  loss->add_option("--lambda2", l_l2, "Shape weight")->capture_default_str();
  loss->add_option("--reference", l_reference, "Colour reference: blur or target")
      ->check(CLI::IsMember({"blur", "target"}))
      ->capture_default_str();
  loss->add_option("--d-real", l_d_real, "Discriminator output on the real pair");
  loss->add_option("--d-fake", l_d_fake, "Discriminator output on the generated pair");
  loss->add_option("--out", l_out, "Report JSON (default stdout)");
  loss->callback([&] {
    run = [&] {
      Img g = load_image(l_gen);
      Img y = load_image(l_target);
      Img xb;
      if (l_color_map) {
        xb = load_image(*l_color_map);
      } else {
        pf_image* b = nullptr;
        check(pf_image_blur(y.get(), l_radius, &b));
        xb.reset(b);
      }
      const pf_color_reference ref = parse_reference(l_reference);
      pf_loss_report r{};
      check(pf_ta_loss(y.get(), g.get(), xb.get(), l_l1, l_l2, l_bins, ref, &r));
      if (l_d_real.has_value() != l_d_fake.has_value()) {
        throw CommandError{PF_ERR_INVALID_ARGUMENT, "give both --d-real and --d-fake"};
      }
      if (l_d_real) check(pf_gan_objective(*l_d_real, *l_d_fake, &r.gan));
      char* json = nullptr;
      check(pf_loss_report_json(&r, l_l1, l_l2, l_bins, ref, &json));
      OwnedString j(json);
      emit(l_out, j.get());
    };
  });

  // gen-poses
  auto* gen = app.add_subcommand("gen-poses", "Write a seeded procedural pose bank");
  std::size_t g_n = 1000;
  std::uint64_t g_seed = 0;
  std::string g_out;
  gen->add_option("--n", g_n, "Number of poses")->capture_default_str();
  gen->add_option("--seed", g_seed, "Seed")->capture_default_str();
  gen->add_option("--out", g_out, "Pose JSONL")->required();
  gen->callback([&] {
    run = [&] {
      pf_bank* b = nullptr;
      check(pf_bank_generate(g_n, g_seed, &b));
      Bank bank(b);
      check(pf_bank_write(bank.get(), g_out.c_str()));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pf_status_exit_code(PF_ERR_INVALID_ARGUMENT);
  }

  try {
    if (run) run();
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.message << "\n";
    return pf_status_exit_code(e.status);
  }
  return 0;
}
