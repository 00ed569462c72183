#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posefuse/affine.hpp"
#include "posefuse/image.hpp"
#include "posefuse/loss.hpp"
#include "posefuse/metrics.hpp"
#include "posefuse/pose.hpp"
#include "posefuse/pq_index.hpp"

namespace posefuse {

// ---------------------------------------------------------------------------
// Composite manifests

struct ManifestJob {
  std::string name;
  std::string foreground;       ///< resolved paths; may be empty in target mode
  std::string mask;
  std::string background;
  std::optional<Keypoints2D> keypoints;  ///< inline keypoints
  std::string keypoints_path;            ///< or first pose of a JSONL file
  std::optional<Affine2D> transform;
  std::string target_pose_path;          ///< retrieval-driven placement
};

struct BankReference {
  std::string poses;        ///< JSONL with optional image/mask per pose
  std::string index;        ///< empty = exact retrieval
  std::size_t shortlist = 200;
};

struct Manifest {
  std::string output_dir;
  std::size_t blur_radius = kDefaultBlurRadius;
  std::size_t histogram_bins = kDefaultHistogramBins;
  bool compute_loss = false;
  LossWeights weights;
  std::uint64_t seed = 0;
  std::optional<BankReference> bank;
  std::vector<ManifestJob> jobs;
};

/// Parses manifest JSON; relative paths resolve against base_dir.
/// Throws ParseError (malformed, missing fields, transform and target both
/// given, duplicate names) or InvalidArgument (bad values).
Manifest parse_manifest(const std::string& json_text, const std::string& base_dir);
Manifest load_manifest(const std::string& path);

struct JobOutcome {
  std::string name;
  std::string status = "ok";  ///< "ok" or the error name
  std::string message;
  std::string output;         ///< file name inside output_dir
  std::size_t covered_pixels = 0;
  Affine2D transform;
  std::string bank_id;        ///< set in target mode
  std::optional<HandPose> keypoints;  ///< transformed, background frame
  std::optional<LossReport> loss;
  double millis = 0.0;
  bool ok() const { return status == "ok"; }
};

struct RunReport {
  std::vector<JobOutcome> jobs;  ///< manifest order
  std::uint64_t seed = 0;
  std::size_t failed() const;
};

/// Runs every job (in parallel), writes <output_dir>/<name>.png for each
/// success, then annotations.jsonl, report.json and run_timing.json. Job
/// failures are recorded, not thrown. The report and annotation bytes do not
/// depend on thread count or timing.
RunReport run_manifest(const Manifest& manifest, std::size_t threads = 0);

std::string run_report_json(const RunReport& report);
std::string annotations_jsonl(const RunReport& report, const Manifest& manifest);

// ---------------------------------------------------------------------------
// Evaluation files

struct EvalOptions {
  MetricSpace space = MetricSpace::Pixels2D;
  std::optional<double> pck_threshold;  ///< default: 5 px / 20 mm
  std::optional<double> t_min, t_max;   ///< default: 0-30 px / 20-50 mm
  std::size_t steps = 100;
  bool stb_convert = false;             ///< convert ground-truth roots first
  StbRootMode stb_mode = StbRootMode::FromMcp;
};

struct EvalOutput {
  std::string json;
  std::string csv;
};

/// Pairs predictions with ground truth by id (ground-truth file order).
/// Throws IdMismatch listing missing, extra or duplicate ids.
PredictionSet align_by_id(std::vector<HandPose> predicted, std::vector<HandPose> ground_truth,
                          MetricSpace space);
EvalOutput evaluate_set(const PredictionSet& set, const EvalOptions& options);
EvalOutput evaluate_files(const std::string& pred_path, const std::string& gt_path,
                          const EvalOptions& options);

// ---------------------------------------------------------------------------
// Small JSON reports shared by the command surface

std::string index_summary_json(const PQIndex& index, const PQTrainParams& params);
/// One JSON object (single line) describing the matches for one target.
std::string retrieval_json(const HandPose& target, const RetrievalResult& result);
std::string loss_report_json(const LossReport& report, const LossWeights& weights, std::size_t bins,
                             ColorReference reference);

}  // namespace posefuse
