#include "fixtures.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "posefuse/image.hpp"
#include "posefuse/parallel.hpp"
#include "posefuse/png_io.hpp"
#include "posefuse/pose.hpp"
#include "posefuse/pq_index.hpp"
#include "posefuse/toy_gan.hpp"

namespace fixture {

using namespace posefuse;
namespace fs = std::filesystem;

namespace {

// Smooth two-colour gradient background.
Image background(std::size_t side, Rng& rng) {
  double a[3], b[3];
  for (int c = 0; c < 3; ++c) {
    a[c] = rng.uniform();
    b[c] = rng.uniform();
  }
  Image img(side, side, 3);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const double t = (static_cast<double>(x) + static_cast<double>(y)) / (2.0 * static_cast<double>(side));
      for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = (1.0 - t) * a[c] + t * b[c];
    }
  }
  return img;
}

PoseSynthOptions small_hands(std::size_t side) {
  PoseSynthOptions o;
  const double s = static_cast<double>(side);
  o.min_scale_px = 0.2 * s;
  o.max_scale_px = 0.3 * s;
  o.center_min_px = 0.45 * s;
  o.center_max_px = 0.55 * s;
  o.max_rotation_rad = 0.3;
  return o;
}

}  // namespace

std::string write_scene(const std::string& dir, const SceneOptions& opt) {
  fs::create_directories(dir);
  Rng rng(mix_seed(opt.seed, 77));
  const std::size_t side = opt.side;

  // Bank of poses, each with its own foreground and mask.
  const std::size_t bank_n = 12;
  const auto synth = small_hands(side);
  nlohmann::json bank_lines = nlohmann::json::array();
  std::vector<HandPose> bank_poses;
  std::ofstream bank((fs::path(dir) / "bank.jsonl").string());
  for (std::size_t i = 0; i < bank_n; ++i) {
    const HandPose p = synthesize_pose(rng, "bank" + std::to_string(i), synth);
    bank_poses.push_back(p);
    const ProceduralSample s = gen_procedural_sample(mix_seed(opt.seed, 1000 + i), side);
    write_png(s.x, (fs::path(dir) / ("bank" + std::to_string(i) + ".png")).string());
    write_png(s.mask, (fs::path(dir) / ("bank" + std::to_string(i) + "_mask.png")).string());
    auto line = nlohmann::json::parse(pose_to_json_line(p));
    line["image"] = "bank" + std::to_string(i) + ".png";
    line["mask"] = "bank" + std::to_string(i) + "_mask.png";
    bank << line.dump() << '\n';
  }
  bank.close();

  nlohmann::json jobs = nlohmann::json::array();
  for (std::size_t j = 0; j < opt.jobs; ++j) {
    const std::string tag = "job" + std::to_string(j);
    write_png(background(side, rng), (fs::path(dir) / (tag + "_bg.png")).string());
    nlohmann::json job;
    job["name"] = tag;
    job["background"] = tag + "_bg.png";
    if (opt.target_jobs && j % 3 == 2) {
      const HandPose target = synthesize_pose(rng, tag + "_target", synth);
      std::ofstream((fs::path(dir) / (tag + "_target.jsonl")).string()) << pose_to_json_line(target) << '\n';
      job["target_pose_path"] = tag + "_target.jsonl";
    } else {
      const ProceduralSample s = gen_procedural_sample(mix_seed(opt.seed, 2000 + j), side);
      write_png(s.x, (fs::path(dir) / (tag + "_fg.png")).string());
      write_png(s.mask, (fs::path(dir) / (tag + "_mask.png")).string());
      job["foreground"] = tag + "_fg.png";
      job["mask"] = tag + "_mask.png";
      const double a = rng.uniform(-0.5, 0.5), sc = rng.uniform(0.6, 1.0);
      const double tx = rng.uniform(0.0, 0.3) * static_cast<double>(side);
      const double ty = rng.uniform(0.0, 0.3) * static_cast<double>(side);
      job["transform"] = {sc * std::cos(a), -sc * std::sin(a), tx, sc * std::sin(a), sc * std::cos(a), ty};
      if (j % 2 == 0) {
        job["keypoints"] = nlohmann::json::parse(pose_to_json_line(synthesize_pose(rng, tag, synth)))["keypoints"];
      } else {
        std::ofstream((fs::path(dir) / (tag + "_kp.jsonl")).string())
            << pose_to_json_line(synthesize_pose(rng, tag + "_kp", synth)) << '\n';
        job["keypoints_path"] = tag + "_kp.jsonl";
      }
    }
    jobs.push_back(job);
  }

  nlohmann::json manifest;
  manifest["output_dir"] = opt.output_dir;
  manifest["blur_radius"] = 3;
  manifest["histogram_bins"] = 16;
  manifest["compute_loss"] = opt.compute_loss;
  manifest["seed"] = opt.seed;
  manifest["bank"] = {{"poses", "bank.jsonl"}, {"shortlist", 8}};
  if (opt.with_index) {
    PQTrainParams params;
    params.m = 4;
    params.k = 4;
    params.seed = opt.seed;
    params.threads = 1;
    save_index(build_pose_index(bank_poses, params), (fs::path(dir) / "bank.tapq").string());
    manifest["bank"]["index"] = "bank.tapq";
  }
  manifest["jobs"] = jobs;
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ofstream(path) << manifest.dump(2) << '\n';
  return path;
}

}  // namespace fixture
