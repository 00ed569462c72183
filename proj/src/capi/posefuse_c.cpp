#include "posefuse/posefuse.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "posefuse/affine.hpp"
#include "posefuse/error.hpp"
#include "posefuse/image.hpp"
#include "posefuse/loss.hpp"
#include "posefuse/pipeline.hpp"
#include "posefuse/png_io.hpp"
#include "posefuse/pose.hpp"
#include "posefuse/pq_index.hpp"
#include "posefuse/toy_gan.hpp"

using namespace posefuse;

struct pf_bank {
  std::vector<HandPose> poses;
};

struct pf_index {
  PQIndex index;
};

struct pf_image {
  Image image;
};

static_assert(static_cast<int>(ErrorCode::IoError) + 1 == PF_ERR_IO, "pf_status must mirror ErrorCode");

namespace {

thread_local std::string g_last_error;

pf_status to_status(ErrorCode code) { return static_cast<pf_status>(static_cast<int>(code) + 1); }

pf_status fail(pf_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

template <typename F>
pf_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PF_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void set_string(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

#define PF_REQUIRE(cond, what)                                                  \
  do {                                                                          \
    if (!(cond)) return fail(PF_ERR_INVALID_ARGUMENT, std::string(what));       \
  } while (0)

RetrievalResult run_retrieval(const pf_bank* bank, const pf_index* index, const pf_bank* targets, size_t target_i,
                              size_t k, size_t shortlist) {
  if (target_i >= targets->poses.size()) throw Error(ErrorCode::OutOfRange, "target index out of range");
  const HandPose& target = targets->poses[target_i];
  if (!index) return retrieve_exact(bank->poses, target, k);
  SearchParams sp;
  sp.k = k;
  sp.shortlist_n = shortlist;
  return retrieve_pq(index->index, bank->poses, target, sp);
}

ColorReference to_reference(pf_color_reference r) {
  return r == PF_COLOR_TARGET ? ColorReference::Target : ColorReference::BlurMap;
}

}  // namespace

extern "C" {

const char* pf_status_name(pf_status status) {
  switch (status) {
    case PF_OK: return "Ok";
    case PF_ERR_PARTIAL_FAILURE: return "PartialFailure";
    case PF_ERR_INTERNAL: return "Internal";
    default: break;
  }
  if (status > PF_OK && status <= PF_ERR_IO) {
    return error_name(static_cast<ErrorCode>(static_cast<int>(status) - 1)).data();
  }
  return "Unknown";
}

int pf_status_exit_code(pf_status status) {
  if (status == PF_OK) return 0;
  if (status == PF_ERR_PARTIAL_FAILURE) return 5;
  if (status > PF_OK && status <= PF_ERR_IO) return exit_code_for(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  return 1;
}

const char* pf_last_error(void) { return g_last_error.c_str(); }

void pf_string_free(char* s) { std::free(s); }

const char* pf_version(void) { return "1.0.0"; }

// ---- banks ----

pf_status pf_bank_load(const char* jsonl_path, pf_bank** out) {
  PF_REQUIRE(jsonl_path && out, "null argument");
  return guarded([&] {
    *out = new pf_bank{read_poses(jsonl_path)};
    return PF_OK;
  });
}

pf_status pf_bank_generate(size_t n, uint64_t seed, pf_bank** out) {
  PF_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = new pf_bank{synthesize_bank(n, seed)};
    return PF_OK;
  });
}

pf_status pf_bank_from_keypoints(const char* id, const double* keypoints, pf_bank** out) {
  PF_REQUIRE(id && keypoints && out, "null argument");
  return guarded([&] {
    std::vector<std::array<double, 2>> raw(kNumKeypoints);
    for (size_t i = 0; i < kNumKeypoints; ++i) raw[i] = {keypoints[2 * i], keypoints[2 * i + 1]};
    *out = new pf_bank{{parse_pose(raw, id)}};
    return PF_OK;
  });
}

pf_status pf_bank_write(const pf_bank* bank, const char* jsonl_path) {
  PF_REQUIRE(bank && jsonl_path, "null argument");
  return guarded([&] {
    write_poses(jsonl_path, bank->poses);
    return PF_OK;
  });
}

size_t pf_bank_size(const pf_bank* bank) { return bank ? bank->poses.size() : 0; }

const char* pf_bank_id(const pf_bank* bank, size_t i) {
  if (!bank || i >= bank->poses.size()) return nullptr;
  return bank->poses[i].id().c_str();
}

pf_status pf_bank_keypoints(const pf_bank* bank, size_t i, double* out42) {
  PF_REQUIRE(bank && out42, "null argument");
  if (i >= bank->poses.size()) return fail(PF_ERR_OUT_OF_RANGE, "pose index out of range");
  const auto& kp = bank->poses[i].keypoints();
  for (size_t j = 0; j < kNumKeypoints; ++j) {
    out42[2 * j] = kp[j].x;
    out42[2 * j + 1] = kp[j].y;
  }
  return PF_OK;
}

void pf_bank_free(pf_bank* bank) { delete bank; }

// ---- index ----

void pf_index_params_default(pf_index_params* params) {
  if (!params) return;
  const PQTrainParams d;
  params->m = d.m;
  params->k = d.k;
  params->iters = d.iters;
  params->seed = d.seed;
  params->train_sample = d.train_sample;
  params->threads = d.threads;
}

pf_status pf_index_build(const pf_bank* bank, const pf_index_params* params, pf_index** out, char** summary_json) {
  PF_REQUIRE(bank && out, "null argument");
  return guarded([&] {
    PQTrainParams p;
    if (params) {
      p.m = params->m;
      p.k = params->k;
      p.iters = params->iters;
      p.seed = params->seed;
      p.train_sample = params->train_sample;
      p.threads = params->threads;
    }
    auto* idx = new pf_index{build_pose_index(bank->poses, p)};
    try {
      set_string(summary_json, index_summary_json(idx->index, p));
    } catch (...) {
      delete idx;
      throw;
    }
    *out = idx;
    return PF_OK;
  });
}

pf_status pf_index_save(const pf_index* index, const char* path) {
  PF_REQUIRE(index && path, "null argument");
  return guarded([&] {
    save_index(index->index, path);
    return PF_OK;
  });
}

pf_status pf_index_load(const char* path, pf_index** out) {
  PF_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new pf_index{load_index(path)};
    return PF_OK;
  });
}

size_t pf_index_size(const pf_index* index) { return index ? index->index.size() : 0; }

int pf_index_equal(const pf_index* a, const pf_index* b) {
  if (!a || !b) return 0;
  return a->index.same_contents(b->index) ? 1 : 0;
}

void pf_index_free(pf_index* index) { delete index; }

// ---- retrieval ----

pf_status pf_retrieve(const pf_bank* bank, const pf_index* index, const pf_bank* targets, size_t target_i, size_t k,
                      size_t shortlist, pf_match* out, size_t* count) {
  PF_REQUIRE(bank && targets && out && count, "null argument");
  return guarded([&] {
    const RetrievalResult r = run_retrieval(bank, index, targets, target_i, k, shortlist);
    *count = r.matches.size();
    for (size_t i = 0; i < r.matches.size(); ++i) {
      out[i].bank_index = r.matches[i].bank_index;
      out[i].score = r.matches[i].score;
      const auto t = r.matches[i].transform.row_major();
      std::copy(t.begin(), t.end(), out[i].transform);
    }
    return PF_OK;
  });
}

pf_status pf_retrieve_json(const pf_bank* bank, const pf_index* index, const pf_bank* targets, size_t target_i,
                           size_t k, size_t shortlist, char** json) {
  PF_REQUIRE(bank && targets && json, "null argument");
  return guarded([&] {
    const RetrievalResult r = run_retrieval(bank, index, targets, target_i, k, shortlist);
    set_string(json, retrieval_json(targets->poses[target_i], r));
    return PF_OK;
  });
}

pf_status pf_similarity(const pf_bank* a, size_t i, const pf_bank* b, size_t j, double* score) {
  PF_REQUIRE(a && b && score, "null argument");
  if (i >= a->poses.size() || j >= b->poses.size()) return fail(PF_ERR_OUT_OF_RANGE, "pose index out of range");
  return guarded([&] {
    *score = similarity(a->poses[i], b->poses[j]).score;
    return PF_OK;
  });
}

// ---- images ----

pf_status pf_image_read(const char* png_path, pf_image** out) {
  PF_REQUIRE(png_path && out, "null argument");
  return guarded([&] {
    *out = new pf_image{read_png(png_path)};
    return PF_OK;
  });
}

pf_status pf_image_write(const pf_image* image, const char* png_path) {
  PF_REQUIRE(image && png_path, "null argument");
  return guarded([&] {
    write_png(image->image, png_path);
    return PF_OK;
  });
}

pf_status pf_image_create(size_t width, size_t height, size_t channels, const double* data, pf_image** out) {
  PF_REQUIRE(out && (data || width * height == 0), "null argument");
  return guarded([&] {
    std::vector<double> v(data, data + width * height * channels);
    *out = new pf_image{Image(width, height, channels, std::move(v))};
    return PF_OK;
  });
}

size_t pf_image_width(const pf_image* image) { return image ? image->image.width() : 0; }
size_t pf_image_height(const pf_image* image) { return image ? image->image.height() : 0; }
size_t pf_image_channels(const pf_image* image) { return image ? image->image.channels() : 0; }
const double* pf_image_data(const pf_image* image) { return image ? image->image.data().data() : nullptr; }

pf_status pf_image_blur(const pf_image* image, size_t radius, pf_image** out) {
  PF_REQUIRE(image && out, "null argument");
  return guarded([&] {
    *out = new pf_image{blur_average(image->image, radius)};
    return PF_OK;
  });
}

pf_status pf_image_edge_map(const pf_image* image, pf_image** out) {
  PF_REQUIRE(image && out, "null argument");
  return guarded([&] {
    *out = new pf_image{edge_map(image->image)};
    return PF_OK;
  });
}

void pf_image_free(pf_image* image) { delete image; }

// ---- losses ----

pf_status pf_ta_loss(const pf_image* y, const pf_image* generated, const pf_image* color_map, double lambda1,
                     double lambda2, size_t bins, pf_color_reference reference, pf_loss_report* out) {
  PF_REQUIRE(y && generated && color_map && out, "null argument");
  return guarded([&] {
    const LossReport r = ta_loss(LossWeights{lambda1, lambda2}, y->image, generated->image, color_map->image, bins,
                                 to_reference(reference));
    *out = {r.shape, r.color, r.ta, r.gan};
    return PF_OK;
  });
}

pf_status pf_gan_objective(double d_real, double d_fake, double* out) {
  PF_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = gan_objective(d_real, d_fake);
    return PF_OK;
  });
}

pf_status pf_loss_report_json(const pf_loss_report* report, double lambda1, double lambda2, size_t bins,
                              pf_color_reference reference, char** json) {
  PF_REQUIRE(report && json, "null argument");
  return guarded([&] {
    const LossReport r{report->shape, report->color, report->ta, report->gan};
    set_string(json, loss_report_json(r, LossWeights{lambda1, lambda2}, bins, to_reference(reference)));
    return PF_OK;
  });
}

// ---- pipelines ----

pf_status pf_run_composite(const char* manifest_path, size_t threads, char** report_json) {
  PF_REQUIRE(manifest_path, "null argument");
  return guarded([&] {
    const Manifest m = load_manifest(manifest_path);
    const RunReport r = run_manifest(m, threads);
    set_string(report_json, run_report_json(r));
    if (r.failed() > 0) {
      return fail(PF_ERR_PARTIAL_FAILURE,
                  std::to_string(r.failed()) + " of " + std::to_string(r.jobs.size()) + " jobs failed");
    }
    return PF_OK;
  });
}

void pf_eval_params_default(pf_eval_params* params) {
  if (!params) return;
  params->space = PF_SPACE_2D;
  params->pck_threshold = -1.0;
  params->t_min = -1.0;
  params->t_max = -1.0;
  params->steps = 100;
  params->stb = PF_STB_NONE;
}

pf_status pf_eval_files(const char* pred_path, const char* gt_path, const pf_eval_params* params, char** report_json,
                        char** curve_csv) {
  PF_REQUIRE(pred_path && gt_path, "null argument");
  return guarded([&] {
    pf_eval_params p;
    pf_eval_params_default(&p);
    if (params) p = *params;
    EvalOptions o;
    o.space = p.space == PF_SPACE_3D ? MetricSpace::Millimeters3D : MetricSpace::Pixels2D;
    if (p.pck_threshold >= 0.0) o.pck_threshold = p.pck_threshold;
    if (p.t_min >= 0.0 || p.t_max >= 0.0) {
      o.t_min = p.t_min;
      o.t_max = p.t_max;
    }
    o.steps = p.steps;
    o.stb_convert = p.stb != PF_STB_NONE;
    o.stb_mode = p.stb == PF_STB_FROM_PALM ? StbRootMode::FromPalm : StbRootMode::FromMcp;
    const EvalOutput r = evaluate_files(pred_path, gt_path, o);
    set_string(report_json, r.json);
    set_string(curve_csv, r.csv);
    return PF_OK;
  });
}

pf_status pf_train_toy(const char* config_text, char** report_json) {
  PF_REQUIRE(config_text, "null argument");
  return guarded([&] {
    const ToyConfig c = parse_toy_config(config_text);
    try {
      set_string(report_json, training_report_json(train_toy_tagan(c)));
    } catch (const DivergenceError& e) {
      set_string(report_json, training_report_json(e.partial_report()));
      throw;
    }
    return PF_OK;
  });
}

}  // extern "C"
