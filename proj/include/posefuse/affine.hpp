#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "posefuse/pose.hpp"

namespace posefuse {

/// x' = a11 x + a12 y + tx,  y' = a21 x + a22 y + ty.
struct Affine2D {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  double tx = 0.0, ty = 0.0;

  static Affine2D identity() { return {}; }
  /// Row-major [a11, a12, tx, a21, a22, ty], the order used in every file format.
  static Affine2D from_row_major(std::span<const double> six);
  std::array<double, 6> row_major() const { return {a11, a12, tx, a21, a22, ty}; }

  double determinant() const { return a11 * a22 - a12 * a21; }
  bool is_finite() const;

  Point2 apply(Point2 p) const { return {a11 * p.x + a12 * p.y + tx, a21 * p.x + a22 * p.y + ty}; }
  Keypoints2D apply(const Keypoints2D& kp) const;
  HandPose apply(const HandPose& pose) const;

  /// Throws DegenerateConfiguration when the linear part is singular.
  Affine2D inverse() const;
  /// (this o other)(p) = this(other(p)).
  Affine2D compose(const Affine2D& other) const;

  friend bool operator==(const Affine2D&, const Affine2D&) = default;
};

/// Sum of squared keypoint residuals |T(source_i) - target_i|^2.
double affine_residual(const Affine2D& transform, const HandPose& source, const HandPose& target);

/// Least-squares 6-parameter affine map taking source keypoints onto target
/// keypoints. Throws DegenerateConfiguration for collinear/coincident source
/// points (normal-matrix condition number above 1e10).
Affine2D fit_affine(const HandPose& source, const HandPose& target);

inline constexpr double kMaxNormalCondition = 1e10;

struct SimilarityResult {
  double score = 0.0;  ///< cosine of aligned features, clamped to [-1, 1]
  Affine2D transform;  ///< candidate -> target alignment
};

/// Cosine of f(g(candidate)) and f(target), g = fit_affine(candidate, target).
SimilarityResult similarity(const HandPose& candidate, const HandPose& target);

struct Match {
  std::size_t bank_index = 0;
  std::string candidate_id;
  double score = 0.0;
  Affine2D transform;
};

struct RetrievalResult {
  std::vector<Match> matches;      ///< descending score, ties by bank index
  std::size_t skipped_degenerate = 0;
};

/// Exhaustive arg-max of the aligned similarity over the bank.
/// Errors: EmptyBank, KTooLarge (k == 0 or k > bank size), DegeneratePose for
/// a degenerate target.
RetrievalResult retrieve_exact(std::span<const HandPose> bank, const HandPose& target,
                               std::size_t k, std::size_t threads = 0);

/// Scores a subset of bank indices exactly and keeps the best k; shared by
/// the exhaustive and the shortlist re-ranking paths.
RetrievalResult rerank_exact(std::span<const HandPose> bank, std::span<const std::size_t> indices,
                             const HandPose& target, std::size_t k, std::size_t threads = 0);

}  // namespace posefuse
