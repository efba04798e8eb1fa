#ifndef ECDSHEAF_LINALG_HPP
#define ECDSHEAF_LINALG_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ecdsheaf/rational.hpp"

namespace ecdsheaf {

using Mat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;

inline Mat mat_zero(Eigen::Index r, Eigen::Index c) { return Mat::Zero(r, c); }
inline Mat mat_id(Eigen::Index n) { return Mat::Identity(n, n); }

/// In-place reduced row echelon form; returns pivot columns.
std::vector<Eigen::Index> rref(Mat& a);

Eigen::Index rank_of(const Mat& a);

/// Columns span ker(a); returns an (cols x k) matrix.
Mat kernel_basis(const Mat& a);

/// Reduced basis of the column space (k columns).
Mat image_basis(const Mat& a);

/// Solve a*x = b for all columns of b; nullopt if inconsistent.
std::optional<Mat> solve(const Mat& a, const Mat& b);

/// True if every column of v lies in span(columns of basis).
bool span_contains(const Mat& basis, const Mat& v);

/// Coordinates of v in the given column basis (throws if not in span).
Mat coords_in(const Mat& basis, const Mat& v);

/// Columns of the n-dim standard space completing span(sub) to the whole.
Mat complement_basis(const Mat& sub, Eigen::Index n);

/// Horizontal concatenation (all same row count; empty list gives 0x0).
Mat hcat(const std::vector<Mat>& parts);
/// Vertical concatenation.
Mat vcat(const std::vector<Mat>& parts);

/// Basis (columns) of the intersection of two column spans in Q^n.
Mat intersect_spans(const Mat& a, const Mat& b);

/// dim ker(next) - rank(prev); callers must have next*prev = 0.
Eigen::Index homology_dim(const Mat& prev, const Mat& next);

/// Basis data for ker(next)/im(prev) plus coordinate maps.
struct HomologySpace {
  Mat reps;       // columns: homology class representatives (in ambient coords)
  Mat ker;        // basis of ker(next)
  Mat boundaries; // basis of im(prev)
  /// Coordinates of an ambient cycle in `reps` modulo boundaries.
  Vec classify(const Vec& cycle) const;
  Eigen::Index dim() const { return reps.cols(); }
};
HomologySpace homology_space(const Mat& prev, const Mat& next);

}  // namespace ecdsheaf

#endif
