#include "posefuse/affine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "posefuse/error.hpp"
#include "posefuse/parallel.hpp"

namespace posefuse {

Affine2D Affine2D::from_row_major(std::span<const double> six) {
  if (six.size() != 6) {
    throw Error(ErrorCode::InvalidArgument, "affine transform needs 6 numbers, got " +
                                                std::to_string(six.size()));
  }
  Affine2D t{six[0], six[1], six[3], six[4], six[2], six[5]};
  if (!t.is_finite()) throw Error(ErrorCode::NonFiniteCoordinate, "affine transform is not finite");
  return t;
}

bool Affine2D::is_finite() const {
  return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) && std::isfinite(a22) &&
         std::isfinite(tx) && std::isfinite(ty);
}

Keypoints2D Affine2D::apply(const Keypoints2D& kp) const {
  Keypoints2D out;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) out[i] = apply(kp[i]);
  return out;
}

HandPose Affine2D::apply(const HandPose& pose) const {
  return HandPose(pose.id(), apply(pose.keypoints()), pose.keypoints3d());
}

Affine2D Affine2D::inverse() const {
  const double det = determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error(ErrorCode::DegenerateConfiguration, "affine transform is not invertible");
  }
  Affine2D inv;
  inv.a11 = a22 / det;
  inv.a12 = -a12 / det;
  inv.a21 = -a21 / det;
  inv.a22 = a11 / det;
  inv.tx = -(inv.a11 * tx + inv.a12 * ty);
  inv.ty = -(inv.a21 * tx + inv.a22 * ty);
  return inv;
}

Affine2D Affine2D::compose(const Affine2D& o) const {
  Affine2D r;
  r.a11 = a11 * o.a11 + a12 * o.a21;
  r.a12 = a11 * o.a12 + a12 * o.a22;
  r.a21 = a21 * o.a11 + a22 * o.a21;
  r.a22 = a21 * o.a12 + a22 * o.a22;
  r.tx = a11 * o.tx + a12 * o.ty + tx;
  r.ty = a21 * o.tx + a22 * o.ty + ty;
  return r;
}

double affine_residual(const Affine2D& t, const HandPose& source, const HandPose& target) {
  double r = 0.0;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    const Point2 p = t.apply(source.keypoints()[i]);
    const double dx = p.x - target.keypoints()[i].x;
    const double dy = p.y - target.keypoints()[i].y;
    r += dx * dx + dy * dy;
  }
  return r;
}

Affine2D fit_affine(const HandPose& source, const HandPose& target) {
  const auto& u = source.keypoints();
  const auto& v = target.keypoints();
  constexpr double n = static_cast<double>(kNumKeypoints);

  double mux = 0, muy = 0, mvx = 0, mvy = 0;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    mux += u[i].x;
    muy += u[i].y;
    mvx += v[i].x;
    mvy += v[i].y;
  }
  mux /= n;
  muy /= n;
  mvx /= n;
  mvy /= n;

  // With centered coordinates the 3x3 normal matrix is block-diagonal:
  // the 2x2 source scatter S and the count n. Only S can be singular.
  double sxx = 0, sxy = 0, syy = 0;
  double cxx = 0, cxy = 0, cyx = 0, cyy = 0;  // C = sum v~ u~^T
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    const double ux = u[i].x - mux, uy = u[i].y - muy;
    const double vx = v[i].x - mvx, vy = v[i].y - mvy;
    sxx += ux * ux;
    sxy += ux * uy;
    syy += uy * uy;
    cxx += vx * ux;
    cxy += vx * uy;
    cyx += vy * ux;
    cyy += vy * uy;
  }

  const double half_trace = 0.5 * (sxx + syy);
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, half_trace * half_trace - det));
  const double lmax = half_trace + disc;
  const double lmin = half_trace - disc;
  if (!(lmax > 0.0) || !(lmin > 0.0) || lmax / lmin > kMaxNormalCondition || !(det > 0.0)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "source keypoints of '" + source.id() + "' are collinear or coincident");
  }

  // A = C S^-1
  const double i11 = syy / det, i12 = -sxy / det, i22 = sxx / det;
  Affine2D g;
  g.a11 = cxx * i11 + cxy * i12;
  g.a12 = cxx * i12 + cxy * i22;
  g.a21 = cyx * i11 + cyy * i12;
  g.a22 = cyx * i12 + cyy * i22;
  g.tx = mvx - (g.a11 * mux + g.a12 * muy);
  g.ty = mvy - (g.a21 * mux + g.a22 * muy);
  return g;
}

namespace {

double dot(const PoseFeature& a, const PoseFeature& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureDim; ++i) s += a.values[i] * b.values[i];
  return s;
}

double aligned_cosine(const HandPose& candidate, const Affine2D& g, const PoseFeature& target_feature,
                      double target_norm) {
  const PoseFeature fu = extract_feature(g.apply(candidate.keypoints()));
  const double nu = l2_norm(fu);
  if (!(nu > 0.0)) {
    throw Error(ErrorCode::DegeneratePose, "aligned candidate '" + candidate.id() + "' collapses");
  }
  return std::clamp(dot(fu, target_feature) / (nu * target_norm), -1.0, 1.0);
}

}  // namespace

SimilarityResult similarity(const HandPose& candidate, const HandPose& target) {
  const PoseFeature fv = extract_feature(target);
  const double nv = l2_norm(fv);
  if (!(nv > 0.0)) throw Error(ErrorCode::DegeneratePose, "target '" + target.id() + "' is degenerate");
  if (!(l2_norm(extract_feature(candidate)) > 0.0)) {
    throw Error(ErrorCode::DegeneratePose, "candidate '" + candidate.id() + "' is degenerate");
  }
  const Affine2D g = fit_affine(candidate, target);
  return {aligned_cosine(candidate, g, fv, nv), g};
}

RetrievalResult rerank_exact(std::span<const HandPose> bank, std::span<const std::size_t> indices,
                             const HandPose& target, std::size_t k, std::size_t threads) {
  const PoseFeature fv = extract_feature(target);
  const double nv = l2_norm(fv);
  if (!(nv > 0.0)) throw Error(ErrorCode::DegeneratePose, "target '" + target.id() + "' is degenerate");

  std::vector<std::optional<SimilarityResult>> scored(indices.size());
  parallel_for(
      indices.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          const HandPose& cand = bank[indices[s]];
          try {
            const Affine2D g = fit_affine(cand, target);
            scored[s] = SimilarityResult{aligned_cosine(cand, g, fv, nv), g};
          } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateConfiguration &&
                e.code() != ErrorCode::DegeneratePose) {
              throw;
            }
          }
        }
      },
      threads);

  RetrievalResult result;
  std::vector<std::size_t> order;
  order.reserve(indices.size());
  for (std::size_t s = 0; s < indices.size(); ++s) {
    if (scored[s]) {
      order.push_back(s);
    } else {
      ++result.skipped_degenerate;
    }
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scored[a]->score != scored[b]->score) return scored[a]->score > scored[b]->score;
    return indices[a] < indices[b];
  };
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    better);
  result.matches.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    const std::size_t s = order[r];
    const std::size_t idx = indices[s];
    result.matches.push_back({idx, bank[idx].id(), scored[s]->score, scored[s]->transform});
  }
  return result;
}

RetrievalResult retrieve_exact(std::span<const HandPose> bank, const HandPose& target, std::size_t k,
                               std::size_t threads) {
  if (bank.empty()) throw Error(ErrorCode::EmptyBank, "pose bank is empty");
  if (k == 0 || k > bank.size()) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " outside [1, " +
                                          std::to_string(bank.size()) + "]");
  }
  std::vector<std::size_t> all(bank.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return rerank_exact(bank, all, target, k, threads);
}

}  // namespace posefuse
