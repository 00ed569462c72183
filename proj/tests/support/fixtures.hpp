// Seeded on-disk scenes for pipeline tests: images, masks, a pose bank with
// per-pose assets, and a manifest mixing explicit transforms with
// retrieval-driven placement.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace fixture {

struct SceneOptions {
  std::size_t jobs = 3;
  std::uint64_t seed = 1;
  std::size_t side = 64;
  bool target_jobs = true;  // every third job places by retrieval
  bool with_index = false;  // also write a PQ index for the bank
  bool compute_loss = true;
  std::string output_dir = "out";
};

// Writes everything under dir and returns the manifest path.
std::string write_scene(const std::string& dir, const SceneOptions& options);

}  // namespace fixture
