#include "posefuse/pq_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <queue>

#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"

namespace posefuse {

namespace {

template <typename T>
double sqdist(const T* a, const float* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += t * t;
  }
  return s;
}

template <typename T>
std::size_t nearest_centroid(const T* x, const float* centroids, std::size_t k, std::size_t d,
                             double* best_distance) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double dist = sqdist(x, centroids + c * d, d);
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  if (best_distance) *best_distance = best_d;
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// PQIndex

PQIndex::PQIndex(std::size_t dim, std::size_t m, std::size_t k, std::vector<float> codebooks,
                 std::vector<std::uint8_t> codes, std::vector<std::string> ids,
                 std::vector<double> raw_norms)
    : dim_(dim),
      m_(m),
      k_(k),
      codebooks_(std::move(codebooks)),
      codes_(std::move(codes)),
      ids_(std::move(ids)),
      raw_norms_(std::move(raw_norms)) {
  if (m_ == 0 || dim_ == 0) throw Error(ErrorCode::InvalidArgument, "dim and m must be positive");
  if (dim_ % m_ != 0) {
    throw Error(ErrorCode::IndivisibleDim,
                std::to_string(dim_) + " is not divisible by m = " + std::to_string(m_));
  }
  if (k_ == 0 || k_ > 256) throw Error(ErrorCode::InvalidArgument, "k must be in [1, 256]");
  if (codebooks_.size() != m_ * k_ * dsub()) {
    throw Error(ErrorCode::InvalidArgument, "codebook size does not match m * k * dsub");
  }
  if (codes_.size() != ids_.size() * m_) {
    throw Error(ErrorCode::InvalidArgument, "code count does not match id count");
  }
  for (std::uint8_t c : codes_) {
    if (c >= k_) throw Error(ErrorCode::InvalidArgument, "code references a missing centroid");
  }
  if (!raw_norms_.empty() && raw_norms_.size() != ids_.size()) {
    throw Error(ErrorCode::InvalidArgument, "raw norm count does not match id count");
  }
}

void PQIndex::set_raw_norms(std::vector<double> norms) {
  if (!norms.empty() && norms.size() != ids_.size()) {
    throw Error(ErrorCode::InvalidArgument, "raw norm count does not match id count");
  }
  raw_norms_ = std::move(norms);
}

std::span<const float> PQIndex::centroid(std::size_t subspace, std::size_t c) const {
  return {codebooks_.data() + (subspace * k_ + c) * dsub(), dsub()};
}

std::vector<std::uint8_t> PQIndex::encode(std::span<const double> v) const {
  if (v.size() != dim_) {
    throw Error(ErrorCode::DimMismatch,
                "vector has " + std::to_string(v.size()) + " dims, index has " + std::to_string(dim_));
  }
  std::vector<std::uint8_t> code(m_);
  const std::size_t d = dsub();
  for (std::size_t s = 0; s < m_; ++s) {
    code[s] = static_cast<std::uint8_t>(
        nearest_centroid(v.data() + s * d, codebooks_.data() + s * k_ * d, k_, d, nullptr));
  }
  return code;
}

std::vector<std::uint8_t> PQIndex::encode(std::span<const float> v) const {
  if (v.size() != dim_) {
    throw Error(ErrorCode::DimMismatch,
                "vector has " + std::to_string(v.size()) + " dims, index has " + std::to_string(dim_));
  }
  std::vector<std::uint8_t> code(m_);
  const std::size_t d = dsub();
  for (std::size_t s = 0; s < m_; ++s) {
    code[s] = static_cast<std::uint8_t>(
        nearest_centroid(v.data() + s * d, codebooks_.data() + s * k_ * d, k_, d, nullptr));
  }
  return code;
}

std::vector<double> PQIndex::reconstruct(std::size_t i) const {
  std::vector<double> out(dim_);
  const std::size_t d = dsub();
  for (std::size_t s = 0; s < m_; ++s) {
    const auto c = centroid(s, codes_[i * m_ + s]);
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(s * d));
  }
  return out;
}

std::vector<double> PQIndex::distance_table(std::span<const double> query) const {
  if (query.size() != dim_) {
    throw Error(ErrorCode::DimMismatch, "query has " + std::to_string(query.size()) +
                                            " dims, index has " + std::to_string(dim_));
  }
  const std::size_t d = dsub();
  std::vector<double> table(m_ * k_);
  for (std::size_t s = 0; s < m_; ++s) {
    for (std::size_t c = 0; c < k_; ++c) {
      table[s * k_ + c] = sqdist(query.data() + s * d, codebooks_.data() + (s * k_ + c) * d, d);
    }
  }
  return table;
}

std::vector<AdcHit> PQIndex::adc_search(std::span<const double> query, std::size_t n) const {
  const std::vector<double> table = distance_table(query);
  n = std::min(n, size());
  if (n == 0) return {};

  const auto worse = [](const AdcHit& a, const AdcHit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  };
  // Max-heap on (distance, index) holding the n best seen so far.
  std::priority_queue<AdcHit, std::vector<AdcHit>, decltype(worse)> heap(worse);
  const std::uint8_t* code = codes_.data();
  for (std::size_t i = 0; i < size(); ++i, code += m_) {
    double dist = 0.0;
    for (std::size_t s = 0; s < m_; ++s) dist += table[s * k_ + code[s]];
    if (heap.size() < n) {
      heap.push({i, dist});
    } else if (dist < heap.top().distance) {
      heap.pop();
      heap.push({i, dist});
    }
  }
  std::vector<AdcHit> out(heap.size());
  for (std::size_t r = out.size(); r-- > 0;) {
    out[r] = heap.top();
    heap.pop();
  }
  return out;
}

bool PQIndex::same_contents(const PQIndex& o) const {
  if (dim_ != o.dim_ || m_ != o.m_ || k_ != o.k_ || ids_ != o.ids_ || codes_ != o.codes_) return false;
  if (codebooks_.size() != o.codebooks_.size()) return false;
  for (std::size_t i = 0; i < codebooks_.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(codebooks_[i]) != std::bit_cast<std::uint32_t>(o.codebooks_[i])) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct SubspaceResult {
  std::vector<float> centroids;
  double mse = 0.0;
};

// Lloyd's algorithm on one contiguous (n x d) block of sub-vectors.
SubspaceResult kmeans_subspace(const std::vector<float>& x, std::size_t n, std::size_t d,
                               std::size_t k, std::size_t iters, std::uint64_t seed,
                               std::size_t subspace, std::size_t threads,
                               const KMeansObserver& observer) {
  Rng rng(seed);
  std::vector<float> centroids(k * d);
  std::vector<double> min_dist(n);

  // k-means++ seeding.
  std::vector<char> chosen(n, 0);
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  std::copy_n(x.data() + first * d, d, centroids.data());
  chosen[first] = 1;
  parallel_for(
      n,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) min_dist[i] = sqdist(x.data() + i * d, centroids.data(), d);
      },
      threads);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : min_dist) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += min_dist[i];
        if (min_dist[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (min_dist[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point already coincides with a centroid; fall back to a seeded unchosen index.
      std::size_t start = static_cast<std::size_t>(rng.below(n));
      for (std::size_t t = 0; t < n && pick == n; ++t) {
        if (!chosen[(start + t) % n]) pick = (start + t) % n;
      }
      if (pick == n) pick = start;
    }
    chosen[pick] = 1;
    float* cnew = centroids.data() + c * d;
    std::copy_n(x.data() + pick * d, d, cnew);
    parallel_for(
        n,
        [&](std::size_t b, std::size_t e) {
          for (std::size_t i = b; i < e; ++i) {
            min_dist[i] = std::min(min_dist[i], sqdist(x.data() + i * d, cnew, d));
          }
        },
        threads);
  }

  std::vector<std::uint32_t> assign(n);
  const auto assign_all = [&](const std::vector<float>& cents) {
    parallel_for(
        n,
        [&](std::size_t b, std::size_t e) {
          for (std::size_t i = b; i < e; ++i) {
            assign[i] = static_cast<std::uint32_t>(
                nearest_centroid(x.data() + i * d, cents.data(), k, d, &min_dist[i]));
          }
        },
        threads);
    double sum = 0.0;
    for (double v : min_dist) sum += v;
    return sum / static_cast<double>(n);
  };

  double mse = assign_all(centroids);
  if (observer) observer({subspace, 0, k, d, centroids, mse});

  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 1; it <= iters && mse > 0.0; ++it) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = assign[i];
      ++counts[c];
      const float* xi = x.data() + i * d;
      double* sc = sums.data() + c * d;
      for (std::size_t j = 0; j < d; ++j) sc[j] += xi[j];
    }
    std::vector<float> next(k * d);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        next[c * d + j] = static_cast<float>(sums[c * d + j] / static_cast<double>(counts[c]));
      }
    }
    // Empty clusters take the farthest member of the current largest cluster.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      const std::size_t largest = static_cast<std::size_t>(
          std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] != largest) continue;
        const double di = sqdist(x.data() + i * d, next.data() + largest * d, d);
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      if (far == n || counts[largest] < 2) continue;
      std::copy_n(x.data() + far * d, d, next.data() + c * d);
      assign[far] = static_cast<std::uint32_t>(c);
      --counts[largest];
      ++counts[c];
    }
    // A cluster left empty keeps its previous centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) std::copy_n(centroids.data() + c * d, d, next.data() + c * d);
    }

    std::vector<std::uint32_t> prev_assign = assign;
    std::vector<double> prev_dist = min_dist;
    const double next_mse = assign_all(next);
    if (next_mse > mse) {
      // Float rounding of the means can cost a few ulps at convergence; keep
      // the better codebook so the accepted sequence never increases.
      assign.swap(prev_assign);
      min_dist.swap(prev_dist);
      break;
    }
    const double improvement = mse - next_mse;
    centroids.swap(next);
    const double prev = mse;
    mse = next_mse;
    if (observer) observer({subspace, it, k, d, centroids, mse});
    if (improvement <= 1e-6 * prev) break;
  }
  return {std::move(centroids), mse};
}

void check_unit_norm(const FeatureMatrix& v) {
  for (std::size_t i = 0; i < v.rows; ++i) {
    double s = 0.0;
    for (float f : v.row(i)) s += static_cast<double>(f) * f;
    if (std::abs(std::sqrt(s) - 1.0) > 1e-4) {
      throw Error(ErrorCode::InvalidArgument,
                  "vector " + std::to_string(i) + " is not unit norm (" + std::to_string(std::sqrt(s)) + ")");
    }
  }
}

}  // namespace

PQIndex train_codebooks(const FeatureMatrix& vectors, std::vector<std::string> ids,
                        const PQTrainParams& p, const KMeansObserver& observer) {
  if (vectors.rows == 0 || vectors.cols == 0) throw Error(ErrorCode::EmptyInput, "no vectors to index");
  if (p.m == 0) throw Error(ErrorCode::InvalidArgument, "m must be positive");
  if (vectors.cols % p.m != 0) {
    throw Error(ErrorCode::IndivisibleDim, std::to_string(vectors.cols) +
                                               " is not divisible by m = " + std::to_string(p.m));
  }
  if (p.k == 0 || p.k > 256) throw Error(ErrorCode::InvalidArgument, "k must be in [1, 256]");
  if (ids.size() != vectors.rows) throw Error(ErrorCode::InvalidArgument, "one id per vector required");
  check_unit_norm(vectors);

  const std::size_t n_all = vectors.rows;
  // Seeded training subset (partial Fisher-Yates), sorted for locality.
  std::vector<std::size_t> sample(n_all);
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  if (p.train_sample != 0 && p.train_sample < n_all) {
    Rng rng(mix_seed(p.seed, 0xC0DEB00C));
    for (std::size_t i = 0; i < p.train_sample; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n_all - i));
      std::swap(sample[i], sample[j]);
    }
    sample.resize(p.train_sample);
    std::sort(sample.begin(), sample.end());
  }
  const std::size_t n = sample.size();
  if (n < p.k) {
    throw Error(ErrorCode::TooFewVectors,
                std::to_string(n) + " training vectors for k = " + std::to_string(p.k));
  }

  const std::size_t dim = vectors.cols;
  const std::size_t d = dim / p.m;
  std::vector<float> codebooks(p.m * p.k * d);
  double total_mse = 0.0;
  std::vector<float> block(n * d);
  for (std::size_t s = 0; s < p.m; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(vectors.data.data() + sample[i] * dim + s * d, d, block.data() + i * d);
    }
    auto res = kmeans_subspace(block, n, d, p.k, p.iters, mix_seed(p.seed, s), s, p.threads, observer);
    std::copy(res.centroids.begin(), res.centroids.end(),
              codebooks.begin() + static_cast<std::ptrdiff_t>(s * p.k * d));
    total_mse += res.mse;
  }

  std::vector<std::uint8_t> codes(n_all * p.m);
  parallel_for(
      n_all,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          const float* xi = vectors.data.data() + i * dim;
          for (std::size_t s = 0; s < p.m; ++s) {
            codes[i * p.m + s] = static_cast<std::uint8_t>(
                nearest_centroid(xi + s * d, codebooks.data() + s * p.k * d, p.k, d, nullptr));
          }
        }
      },
      p.threads);

  PQIndex index(dim, p.m, p.k, std::move(codebooks), std::move(codes), std::move(ids));
  index.set_training_mse(total_mse);
  return index;
}

FeatureMatrix normalized_features(std::span<const HandPose> bank, std::vector<double>* raw_norms) {
  FeatureMatrix m(bank.size(), kFeatureDim);
  if (raw_norms) raw_norms->assign(bank.size(), 0.0);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const PoseFeature f = oriented_feature(bank[i]);
    const double norm = l2_norm(f);
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::DegeneratePose, "pose '" + bank[i].id() + "' (entry " +
                                                 std::to_string(i) + ") has coincident keypoints");
    }
    if (raw_norms) (*raw_norms)[i] = norm;
    auto row = m.row(i);
    for (std::size_t j = 0; j < kFeatureDim; ++j) row[j] = static_cast<float>(f.values[j] / norm);
  }
  return m;
}

PQIndex build_pose_index(std::span<const HandPose> bank, const PQTrainParams& params,
                         const KMeansObserver& observer) {
  if (bank.empty()) throw Error(ErrorCode::EmptyInput, "pose bank is empty");
  std::vector<double> norms;
  const FeatureMatrix features = normalized_features(bank, &norms);
  std::vector<std::string> ids;
  ids.reserve(bank.size());
  for (const auto& p : bank) ids.push_back(p.id());
  PQIndex index = train_codebooks(features, std::move(ids), params, observer);
  index.set_raw_norms(std::move(norms));
  return index;
}

RetrievalResult retrieve_pq(const PQIndex& index, std::span<const HandPose> bank,
                            const HandPose& target, const SearchParams& params,
                            std::size_t threads) {
  if (index.size() == 0) throw Error(ErrorCode::EmptyIndex, "index holds no vectors");
  if (index.dim() != kFeatureDim) {
    throw Error(ErrorCode::DimMismatch, "index dimension " + std::to_string(index.dim()) +
                                            " is not the pose feature dimension");
  }
  if (bank.size() != index.size()) {
    throw Error(ErrorCode::IdMismatch, "bank has " + std::to_string(bank.size()) +
                                           " poses, index has " + std::to_string(index.size()));
  }
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (bank[i].id() != index.ids()[i]) {
      throw Error(ErrorCode::IdMismatch, "entry " + std::to_string(i) + ": bank id '" + bank[i].id() +
                                             "' vs index id '" + index.ids()[i] + "'");
    }
  }
  if (params.k == 0 || params.k > bank.size()) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(params.k) + " outside [1, " +
                                          std::to_string(bank.size()) + "]");
  }
  if (params.k > params.shortlist_n) {
    throw Error(ErrorCode::InvalidArgument, "k must not exceed shortlist_n");
  }

  const PoseFeature q = normalize_feature(oriented_feature(target));
  const auto hits = index.adc_search(q.values, params.shortlist_n);
  std::vector<std::size_t> shortlist;
  shortlist.reserve(hits.size());
  for (const auto& h : hits) shortlist.push_back(h.index);
  return rerank_exact(bank, shortlist, target, params.k, threads);
}

// ---------------------------------------------------------------------------
// Serialization: little-endian "TAPQ" container.

namespace {

constexpr char kMagic[4] = {'T', 'A', 'P', 'Q'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::CorruptPayload, std::string("file truncated while reading ") + what);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_index(const PQIndex& index) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(PQIndex::kVersion);
  w.u32(static_cast<std::uint32_t>(index.dim()));
  w.u32(static_cast<std::uint32_t>(index.m()));
  w.u32(static_cast<std::uint32_t>(index.k()));
  w.u64(index.size());
  for (float f : index.codebooks()) w.f32(f);
  w.bytes(index.codes().data(), index.codes().size());
  for (const auto& id : index.ids()) {
    w.u32(static_cast<std::uint32_t>(id.size()));
    w.bytes(id.data(), id.size());
  }
  return w.take();
}

PQIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorCode::BadMagic, "not a TAPQ index file");
  }
  const std::uint32_t version = r.u32("version");
  if (version != PQIndex::kVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "index version " + std::to_string(version));
  }
  const std::uint32_t dim = r.u32("dim");
  const std::uint32_t m = r.u32("m");
  const std::uint32_t k = r.u32("k");
  const std::uint64_t n = r.u64("n");
  if (m == 0 || dim == 0 || dim % m != 0 || k == 0 || k > 256) {
    throw Error(ErrorCode::CorruptPayload, "inconsistent header (dim " + std::to_string(dim) + ", m " +
                                               std::to_string(m) + ", k " + std::to_string(k) + ")");
  }
  const std::size_t n_floats = static_cast<std::size_t>(k) * dim;
  const auto cb = r.take(n_floats * 4, "codebooks");
  std::vector<float> codebooks(n_floats);
  for (std::size_t i = 0; i < n_floats; ++i) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(cb[i * 4 + b]) << (8 * b);
    codebooks[i] = std::bit_cast<float>(v);
  }
  if (n > r.remaining() / m) throw Error(ErrorCode::CorruptPayload, "file truncated while reading codes");
  const auto code_bytes = r.take(static_cast<std::size_t>(n) * m, "codes");
  std::vector<std::uint8_t> codes(code_bytes.begin(), code_bytes.end());
  for (std::uint8_t c : codes) {
    if (c >= k) throw Error(ErrorCode::CorruptPayload, "code references centroid beyond k");
  }
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, r.remaining() / 4)));
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t len = r.u32("id length");
    const auto s = r.take(len, "id");
    ids.emplace_back(reinterpret_cast<const char*>(s.data()), s.size());
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::CorruptPayload, std::to_string(r.remaining()) + " trailing bytes");
  }
  return PQIndex(dim, m, k, std::move(codebooks), std::move(codes), std::move(ids));
}

void save_index(const PQIndex& index, const std::string& path) {
  const auto bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

PQIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open index '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for '" + path + "'");
  return deserialize_index(bytes);
}

}  // namespace posefuse
