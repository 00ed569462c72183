#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "posefuse/affine.hpp"
#include "posefuse/pose.hpp"

namespace posefuse {

/// Row-major float matrix of feature vectors.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  std::span<const float> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

struct PQTrainParams {
  std::size_t m = 4;         ///< subspaces; must divide the dimension
  std::size_t k = 256;       ///< centroids per subspace, <= 256
  std::size_t iters = 25;    ///< Lloyd iteration cap
  std::uint64_t seed = 0;
  /// Train codebooks on a seeded sample of this many vectors (0 = all). Every
  /// input vector is encoded either way.
  std::size_t train_sample = 0;
  std::size_t threads = 0;
};

/// Snapshot handed to a training observer after every accepted Lloyd step
/// (iteration 0 is the k-means++ seeding).
struct KMeansIteration {
  std::size_t subspace = 0;
  std::size_t iteration = 0;
  std::size_t k = 0;
  std::size_t dsub = 0;
  std::span<const float> centroids;  ///< k x dsub
  double mse = 0.0;                  ///< mean squared distance to the assigned centroid
};

using KMeansObserver = std::function<void(const KMeansIteration&)>;

struct AdcHit {
  std::size_t index = 0;
  double distance = 0.0;  ///< approximate squared L2
};

class PQIndex {
 public:
  static constexpr std::uint32_t kVersion = 1;

  PQIndex(std::size_t dim, std::size_t m, std::size_t k, std::vector<float> codebooks,
          std::vector<std::uint8_t> codes, std::vector<std::string> ids,
          std::vector<double> raw_norms = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t dsub() const noexcept { return dim_ / m_; }
  std::size_t size() const noexcept { return ids_.size(); }

  std::span<const float> codebooks() const noexcept { return codebooks_; }
  std::span<const std::uint8_t> codes() const noexcept { return codes_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  /// Feature norms before normalization. Diagnostic only; not persisted.
  const std::vector<double>& raw_norms() const noexcept { return raw_norms_; }
  void set_raw_norms(std::vector<double> norms);

  std::span<const float> centroid(std::size_t subspace, std::size_t c) const;
  std::span<const std::uint8_t> code(std::size_t i) const { return {codes_.data() + i * m_, m_}; }

  /// Nearest centroid per subspace, lowest index on ties. Throws DimMismatch.
  std::vector<std::uint8_t> encode(std::span<const double> vector) const;
  std::vector<std::uint8_t> encode(std::span<const float> vector) const;
  std::vector<double> reconstruct(std::size_t i) const;

  /// Query-to-centroid squared distances, m x k row-major.
  std::vector<double> distance_table(std::span<const double> query) const;

  /// n stored entries with the smallest approximate distance, ascending,
  /// ties by insertion index.
  std::vector<AdcHit> adc_search(std::span<const double> query, std::size_t n) const;

  /// Training-set quantization MSE (0 for loaded indexes).
  double training_mse() const noexcept { return training_mse_; }
  void set_training_mse(double mse) { training_mse_ = mse; }

  /// Equality over the persisted state (codebooks, codes, ids, shape).
  bool same_contents(const PQIndex& other) const;

 private:
  std::size_t dim_, m_, k_;
  std::vector<float> codebooks_;
  std::vector<std::uint8_t> codes_;
  std::vector<std::string> ids_;
  std::vector<double> raw_norms_;
  double training_mse_ = 0.0;
};

/// Per-subspace Lloyd k-means with k-means++ seeding; encodes all inputs.
/// Inputs must be unit norm. Errors: EmptyInput, IndivisibleDim,
/// TooFewVectors, InvalidArgument.
PQIndex train_codebooks(const FeatureMatrix& vectors, std::vector<std::string> ids,
                        const PQTrainParams& params, const KMeansObserver& observer = {});

/// Unit-normalized oriented pose features (see oriented_feature), one row
/// each. Throws DegeneratePose naming the first zero-norm pose. Optionally
/// reports the pre-normalization norms.
FeatureMatrix normalized_features(std::span<const HandPose> bank, std::vector<double>* raw_norms);

/// normalized_features + train_codebooks, carrying ids and raw norms.
PQIndex build_pose_index(std::span<const HandPose> bank, const PQTrainParams& params,
                         const KMeansObserver& observer = {});

struct SearchParams {
  std::size_t shortlist_n = 200;
  std::size_t k = 1;
};

/// ADC shortlist on the normalized oriented feature, then exact aligned
/// re-ranking. Errors: EmptyIndex, IdMismatch, KTooLarge, InvalidArgument.
RetrievalResult retrieve_pq(const PQIndex& index, std::span<const HandPose> bank,
                            const HandPose& target, const SearchParams& params,
                            std::size_t threads = 0);

std::vector<std::uint8_t> serialize_index(const PQIndex& index);
PQIndex deserialize_index(std::span<const std::uint8_t> bytes);
void save_index(const PQIndex& index, const std::string& path);
PQIndex load_index(const std::string& path);

}  // namespace posefuse
