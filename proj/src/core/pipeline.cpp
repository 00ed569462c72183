#include "posefuse/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"
#include "posefuse/png_io.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace posefuse {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  const fs::path path(p);
  if (path.is_absolute() || base.empty()) return path.lexically_normal().string();
  return (fs::path(base) / path).lexically_normal().string();
}

ojson transform_json(const Affine2D& t) {
  auto a = ojson::array();
  for (double v : t.row_major()) a.push_back(v);
  return a;
}

ojson keypoints_json(const Keypoints2D& kp) {
  auto a = ojson::array();
  for (const auto& p : kp) a.push_back({p.x, p.y});
  return a;
}

ojson loss_json(const LossReport& r) {
  ojson o;
  o["shape"] = r.shape;
  o["color"] = r.color;
  o["ta"] = r.ta;
  return o;
}

// Shortest round-trip text for CSV cells.
std::string number_text(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T get_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, where + ": field '" + key + "': " + e.what());
  }
}

HandPose first_pose(const std::string& path) {
  auto poses = read_poses(path);
  if (poses.empty()) throw Error(ErrorCode::ParseError, "'" + path + "' holds no pose");
  return std::move(poses.front());
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

Manifest parse_manifest(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::ParseError, "manifest must be a JSON object");

  Manifest m;
  const std::string where = "manifest";
  m.output_dir = resolve(base_dir, root.contains("output_dir") ? get_field<std::string>(root, "output_dir", where)
                                                              : std::string("out"));
  if (root.contains("blur_radius")) m.blur_radius = get_field<std::size_t>(root, "blur_radius", where);
  if (root.contains("histogram_bins")) m.histogram_bins = get_field<std::size_t>(root, "histogram_bins", where);
  if (root.contains("compute_loss")) m.compute_loss = get_field<bool>(root, "compute_loss", where);
  if (root.contains("lambda1")) m.weights.lambda1 = get_field<double>(root, "lambda1", where);
  if (root.contains("lambda2")) m.weights.lambda2 = get_field<double>(root, "lambda2", where);
  if (root.contains("seed")) m.seed = get_field<std::uint64_t>(root, "seed", where);
  if (m.histogram_bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram_bins must be positive");
  if (m.weights.lambda1 < 0 || m.weights.lambda2 < 0) {
    throw Error(ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }

  if (root.contains("bank")) {
    const auto& b = root.at("bank");
    BankReference ref;
    ref.poses = resolve(base_dir, get_field<std::string>(b, "poses", "manifest bank"));
    if (b.contains("index")) ref.index = resolve(base_dir, get_field<std::string>(b, "index", "manifest bank"));
    if (b.contains("shortlist")) ref.shortlist = get_field<std::size_t>(b, "shortlist", "manifest bank");
    m.bank = ref;
  }

  if (!root.contains("jobs") || !root.at("jobs").is_array()) {
    throw Error(ErrorCode::ParseError, "manifest needs a 'jobs' array");
  }
  std::set<std::string> names;
  std::size_t i = 0;
  for (const auto& j : root.at("jobs")) {
    const std::string w = "job " + std::to_string(i);
    if (!j.is_object()) throw Error(ErrorCode::ParseError, w + " is not an object");
    ManifestJob job;
    job.name = j.contains("name") ? get_field<std::string>(j, "name", w) : "job" + std::to_string(i);
    if (job.name.empty() || job.name.find('/') != std::string::npos || job.name == "." || job.name == "..") {
      throw Error(ErrorCode::ParseError, w + ": invalid name '" + job.name + "'");
    }
    if (!names.insert(job.name).second) throw Error(ErrorCode::ParseError, w + ": duplicate name '" + job.name + "'");
    job.background = resolve(base_dir, get_field<std::string>(j, "background", w));
    if (j.contains("foreground")) job.foreground = resolve(base_dir, get_field<std::string>(j, "foreground", w));
    if (j.contains("mask")) job.mask = resolve(base_dir, get_field<std::string>(j, "mask", w));
    if (j.contains("keypoints")) {
      const auto raw = get_field<std::vector<std::array<double, 2>>>(j, "keypoints", w);
      job.keypoints = parse_pose(raw, job.name).keypoints();
    }
    if (j.contains("keypoints_path")) {
      job.keypoints_path = resolve(base_dir, get_field<std::string>(j, "keypoints_path", w));
    }
    if (j.contains("transform")) {
      const auto t = get_field<std::vector<double>>(j, "transform", w);
      if (t.size() != 6) throw Error(ErrorCode::ParseError, w + ": transform needs 6 numbers");
      job.transform = Affine2D::from_row_major(t);
    }
    if (j.contains("target_pose_path")) {
      job.target_pose_path = resolve(base_dir, get_field<std::string>(j, "target_pose_path", w));
    }

    const bool target_mode = !job.target_pose_path.empty();
    if (target_mode == job.transform.has_value()) {
      throw Error(ErrorCode::ParseError, w + ": give exactly one of 'transform' and 'target_pose_path'");
    }
    if (target_mode && !m.bank) throw Error(ErrorCode::ParseError, w + ": target_pose_path needs a manifest 'bank'");
    if (!target_mode) {
      if (job.foreground.empty() || job.mask.empty()) {
        throw Error(ErrorCode::ParseError, w + ": 'foreground' and 'mask' are required with a transform");
      }
      if (job.keypoints.has_value() == !job.keypoints_path.empty()) {
        throw Error(ErrorCode::ParseError, w + ": give exactly one of 'keypoints' and 'keypoints_path'");
      }
    }
    m.jobs.push_back(std::move(job));
    ++i;
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  const std::string text = read_text(path);
  return parse_manifest(text, fs::path(path).parent_path().string());
}

std::size_t RunReport::failed() const {
  return static_cast<std::size_t>(std::count_if(jobs.begin(), jobs.end(), [](const JobOutcome& j) { return !j.ok(); }));
}

namespace {

struct Bank {
  std::vector<PoseRecord> records;
  std::vector<HandPose> poses;
  std::optional<PQIndex> index;
  std::string dir;
};

void run_job(const Manifest& m, const ManifestJob& job, const Bank* bank, JobOutcome& out) {
  Affine2D transform;
  std::optional<HandPose> keypoints;
  std::string fg_path = job.foreground, mask_path = job.mask;
  if (!job.target_pose_path.empty()) {
    const HandPose target = first_pose(job.target_pose_path);
    RetrievalResult r;
    if (bank->index) {
      SearchParams sp;
      sp.shortlist_n = std::min(m.bank->shortlist, bank->poses.size());
      sp.k = 1;
      r = retrieve_pq(*bank->index, bank->poses, target, sp, 1);
    } else {
      r = retrieve_exact(bank->poses, target, 1, 1);
    }
    if (r.matches.empty()) throw Error(ErrorCode::EmptyBank, "no non-degenerate bank pose matched");
    const Match& best = r.matches.front();
    const PoseRecord& rec = bank->records[best.bank_index];
    out.bank_id = best.candidate_id;
    transform = best.transform;
    keypoints = rec.pose;
    if (!rec.image_path.empty()) fg_path = resolve(bank->dir, rec.image_path);
    if (!rec.mask_path.empty()) mask_path = resolve(bank->dir, rec.mask_path);
    if (fg_path.empty() || mask_path.empty()) {
      throw Error(ErrorCode::InvalidArgument, "bank pose '" + best.candidate_id + "' has no image/mask");
    }
  } else {
    transform = *job.transform;
    keypoints = job.keypoints ? HandPose(job.name, *job.keypoints) : first_pose(job.keypoints_path);
  }
  CompositeJob cj{read_png(fg_path), read_png(mask_path), transform, read_png(job.background), *keypoints};
  if (cj.mask.channels() != 1) cj.mask = luminance(cj.mask);
  if (cj.foreground.channels() != cj.background.channels()) {
    throw Error(ErrorCode::InvalidArgument, "foreground and background channel counts differ");
  }
  const CompositeResult res = composite(cj, 1);
  out.transform = cj.transform;
  out.covered_pixels = res.covered_pixels;
  out.keypoints = res.keypoints;
  out.output = job.name + ".png";
  if (m.compute_loss) {
    const Image x_b = blur_average(cj.background, m.blur_radius);
    out.loss = ta_loss(m.weights, cj.background, res.image, x_b, m.histogram_bins);
  }
  write_png(res.image, (fs::path(m.output_dir) / out.output).string());
}

}  // namespace

RunReport run_manifest(const Manifest& m, std::size_t threads) {
  std::error_code ec;
  fs::create_directories(m.output_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + m.output_dir + "': " + ec.message());

  std::optional<Bank> bank;
  const bool needs_bank = std::any_of(m.jobs.begin(), m.jobs.end(),
                                      [](const ManifestJob& j) { return !j.target_pose_path.empty(); });
  if (needs_bank) {
    bank.emplace();
    bank->records = read_pose_records(m.bank->poses);
    for (const auto& r : bank->records) bank->poses.push_back(r.pose);
    bank->dir = fs::path(m.bank->poses).parent_path().string();
    if (!m.bank->index.empty()) bank->index = load_index(m.bank->index);
  }

  RunReport report;
  report.seed = m.seed;
  report.jobs.resize(m.jobs.size());
  parallel_for(
      m.jobs.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          JobOutcome& out = report.jobs[i];
          out.name = m.jobs[i].name;
          const auto t0 = std::chrono::steady_clock::now();
          try {
            run_job(m, m.jobs[i], bank ? &*bank : nullptr, out);
          } catch (const Error& e) {
            out.status = std::string(error_name(e.code()));
            out.message = e.what();
          } catch (const std::exception& e) {
            out.status = "InternalError";
            out.message = e.what();
          }
          if (!out.ok()) {
            out.output.clear();
            out.keypoints.reset();
            out.loss.reset();
          }
          out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
      },
      threads);

  write_text((fs::path(m.output_dir) / "annotations.jsonl").string(), annotations_jsonl(report, m));
  write_text((fs::path(m.output_dir) / "report.json").string(), run_report_json(report));
  ojson timing;
  double total = 0.0;
  auto arr = ojson::array();
  for (const auto& j : report.jobs) {
    arr.push_back({{"name", j.name}, {"millis", j.millis}});
    total += j.millis;
  }
  timing["jobs"] = std::move(arr);
  timing["total_millis"] = total;
  write_text((fs::path(m.output_dir) / "run_timing.json").string(), timing.dump(2) + "\n");
  return report;
}

std::string run_report_json(const RunReport& report) {
  ojson root;
  root["seed"] = report.seed;
  root["succeeded"] = report.jobs.size() - report.failed();
  root["failed"] = report.failed();
  auto jobs = ojson::array();
  for (const auto& j : report.jobs) {
    ojson o;
    o["name"] = j.name;
    o["status"] = j.status;
    if (!j.ok()) {
      o["message"] = j.message;
    } else {
      o["output"] = j.output;
      o["covered_pixels"] = j.covered_pixels;
      o["transform"] = transform_json(j.transform);
      if (!j.bank_id.empty()) o["bank_id"] = j.bank_id;
      if (j.loss) o["loss"] = loss_json(*j.loss);
    }
    jobs.push_back(std::move(o));
  }
  root["jobs"] = std::move(jobs);
  return root.dump(2) + "\n";
}

std::string annotations_jsonl(const RunReport& report, const Manifest& m) {
  std::string out;
  for (std::size_t i = 0; i < report.jobs.size(); ++i) {
    const JobOutcome& j = report.jobs[i];
    if (!j.ok() || !j.keypoints) continue;
    const ManifestJob& job = m.jobs[i];
    ojson o;
    o["id"] = j.name;
    o["image"] = j.output;
    o["keypoints"] = keypoints_json(j.keypoints->keypoints());
    ojson src;
    src["pose_id"] = j.keypoints->id();
    if (!j.bank_id.empty()) src["bank_id"] = j.bank_id;
    src["foreground"] = fs::path(job.foreground).filename().string();
    src["background"] = fs::path(job.background).filename().string();
    if (!job.target_pose_path.empty()) src["target_pose"] = fs::path(job.target_pose_path).filename().string();
    o["source"] = std::move(src);
    o["transform"] = transform_json(j.transform);
    o["seed"] = m.seed;
    out += o.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

PredictionSet align_by_id(std::vector<HandPose> predicted, std::vector<HandPose> ground_truth, MetricSpace space) {
  std::map<std::string, std::size_t> pred_pos;
  std::vector<std::string> duplicates;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!pred_pos.emplace(predicted[i].id(), i).second) duplicates.push_back(predicted[i].id());
  }
  std::set<std::string> gt_ids;
  std::vector<std::string> missing;
  for (const auto& g : ground_truth) {
    if (!gt_ids.insert(g.id()).second) duplicates.push_back(g.id());
    if (!pred_pos.count(g.id())) missing.push_back(g.id());
  }
  std::vector<std::string> extra;
  for (const auto& [id, pos] : pred_pos) {
    if (!gt_ids.count(id)) extra.push_back(id);
  }
  if (!missing.empty() || !extra.empty() || !duplicates.empty()) {
    const auto list = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size() && i < 20; ++i) s += (i ? ", " : "") + v[i];
      if (v.size() > 20) s += ", ... (" + std::to_string(v.size()) + " total)";
      return s;
    };
    std::string msg = "prediction and ground-truth ids differ;";
    if (!missing.empty()) msg += " missing predictions: [" + list(missing) + "]";
    if (!extra.empty()) msg += " extra predictions: [" + list(extra) + "]";
    if (!duplicates.empty()) msg += " duplicate ids: [" + list(duplicates) + "]";
    throw Error(ErrorCode::IdMismatch, msg);
  }
  PredictionSet set;
  set.space = space;
  for (auto& g : ground_truth) {
    set.predicted.push_back(std::move(predicted[pred_pos.at(g.id())]));
    set.ground_truth.push_back(std::move(g));
  }
  return set;
}

EvalOutput evaluate_set(const PredictionSet& input, const EvalOptions& opt) {
  const bool is3d = opt.space == MetricSpace::Millimeters3D;
  const double threshold = opt.pck_threshold.value_or(is3d ? 20.0 : 5.0);
  const double t_min = opt.t_min.value_or(is3d ? 20.0 : 0.0);
  const double t_max = opt.t_max.value_or(is3d ? 50.0 : 30.0);

  const PredictionSet* set = &input;
  PredictionSet converted;
  if (opt.stb_convert) {
    converted = input;
    for (auto& g : converted.ground_truth) g = stb_root_convert(g, opt.stb_mode);
    set = &converted;
  }
  const std::vector<double> d = keypoint_distances(*set);
  const EpeSummary e = epe_from_distances(d);
  const double p = pck_from_distances(d, threshold);
  const PckCurve curve = pck_curve_from_distances(d, t_min, t_max, opt.steps);

  ojson o;
  o["space"] = is3d ? "3d" : "2d";
  o["count"] = set->predicted.size();
  o["keypoints"] = d.size();
  o["epe_mean"] = e.mean;
  o["epe_median"] = e.median;
  o["pck_threshold"] = threshold;
  o["pck"] = p;
  o["auc"] = curve.auc;
  o["range"] = {t_min, t_max};
  o["steps"] = opt.steps;
  if (opt.stb_convert) o["stb_root"] = opt.stb_mode == StbRootMode::FromMcp ? "from_mcp" : "from_palm";

  EvalOutput out;
  out.json = o.dump(2) + "\n";
  out.csv = "threshold,pck\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out.csv += number_text(curve.thresholds[i]) + "," + number_text(curve.values[i]) + "\n";
  }
  return out;
}

EvalOutput evaluate_files(const std::string& pred_path, const std::string& gt_path, const EvalOptions& opt) {
  PredictionSet set = align_by_id(read_poses(pred_path), read_poses(gt_path), opt.space);
  return evaluate_set(set, opt);
}

// ---------------------------------------------------------------------------
// Small reports

std::string index_summary_json(const PQIndex& index, const PQTrainParams& params) {
  ojson o;
  o["n"] = index.size();
  o["dim"] = index.dim();
  o["m"] = index.m();
  o["k"] = index.k();
  o["iters"] = params.iters;
  o["seed"] = params.seed;
  o["train_sample"] = params.train_sample;
  o["mse"] = index.training_mse();
  return o.dump();
}

std::string retrieval_json(const HandPose& target, const RetrievalResult& result) {
  ojson o;
  o["target"] = target.id();
  auto arr = ojson::array();
  for (const auto& m : result.matches) {
    ojson x;
    x["id"] = m.candidate_id;
    x["bank_index"] = m.bank_index;
    x["score"] = m.score;
    x["transform"] = transform_json(m.transform);
    arr.push_back(std::move(x));
  }
  o["matches"] = std::move(arr);
  o["skipped_degenerate"] = result.skipped_degenerate;
  return o.dump();
}

std::string loss_report_json(const LossReport& r, const LossWeights& w, std::size_t bins, ColorReference reference) {
  ojson o;
  o["shape"] = r.shape;
  o["color"] = r.color;
  o["ta"] = r.ta;
  o["gan"] = r.gan;
  o["lambda1"] = w.lambda1;
  o["lambda2"] = w.lambda2;
  o["bins"] = bins;
  o["color_reference"] = reference == ColorReference::BlurMap ? "blur" : "target";
  return o.dump(2) + "\n";
}

}  // namespace posefuse
