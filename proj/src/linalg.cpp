#include "ecdsheaf/linalg.hpp"

#include <stdexcept>

namespace ecdsheaf {

Rat rat_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

std::string rat_print(const Rat& x) { return x.get_str(); }

std::vector<Eigen::Index> rref(Mat& a) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index p = -1;
    for (Eigen::Index i = row; i < a.rows(); ++i)
      if (a(i, col) != 0) { p = i; break; }
    if (p < 0) continue;
    if (p != row) a.row(p).swap(a.row(row));
    Rat inv = 1 / a(row, col);
    for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) *= inv;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      Rat f = a(i, col);
      for (Eigen::Index j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

Eigen::Index rank_of(const Mat& a) {
  Mat m = a;
  return static_cast<Eigen::Index>(rref(m).size());
}

Mat kernel_basis(const Mat& a) {
  Mat m = a;
  auto pivots = rref(m);
  std::vector<char> is_pivot(static_cast<size_t>(a.cols()), 0);
  for (auto p : pivots) is_pivot[static_cast<size_t>(p)] = 1;
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
  Mat k = Mat::Zero(a.cols(), static_cast<Eigen::Index>(free_cols.size()));
  for (size_t fi = 0; fi < free_cols.size(); ++fi) {
    Eigen::Index fc = free_cols[fi];
    k(fc, static_cast<Eigen::Index>(fi)) = 1;
    for (size_t pi = 0; pi < pivots.size(); ++pi)
      k(pivots[pi], static_cast<Eigen::Index>(fi)) = -m(static_cast<Eigen::Index>(pi), fc);
  }
  return k;
}

Mat image_basis(const Mat& a) {
  Mat m = a.transpose();
  auto pivots = rref(m);
  Mat b(a.rows(), static_cast<Eigen::Index>(pivots.size()));
  for (size_t i = 0; i < pivots.size(); ++i)
    b.col(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(i)).transpose();
  return b;
}

std::optional<Mat> solve(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: row mismatch");
  Mat aug(a.rows(), a.cols() + b.cols());
  aug << a, b;
  auto pivots = rref(aug);
  // inconsistent iff a pivot lands in the b-block
  for (auto p : pivots)
    if (p >= a.cols()) return std::nullopt;
  Mat x = Mat::Zero(a.cols(), b.cols());
  for (size_t i = 0; i < pivots.size(); ++i)
    x.row(pivots[i]) = aug.block(static_cast<Eigen::Index>(i), a.cols(), 1, b.cols());
  return x;
}

bool span_contains(const Mat& basis, const Mat& v) {
  if (v.cols() == 0) return true;
  return solve(basis, v).has_value();
}

Mat coords_in(const Mat& basis, const Mat& v) {
  auto x = solve(basis, v);
  if (!x) throw std::logic_error("coords_in: vector not in span");
  return *x;
}

Mat complement_basis(const Mat& sub, Eigen::Index n) {
  std::vector<Eigen::Index> chosen;
  Eigen::Index r = rank_of(sub);
  Mat cur = sub;
  for (Eigen::Index i = 0; i < n && r < n; ++i) {
    Mat cand(n, cur.cols() + 1);
    cand << cur, Mat::Identity(n, n).col(i);
    if (rank_of(cand) > r) {
      chosen.push_back(i);
      cur = cand;
      ++r;
    }
  }
  Mat comp = Mat::Zero(n, static_cast<Eigen::Index>(chosen.size()));
  for (size_t i = 0; i < chosen.size(); ++i) comp(chosen[i], static_cast<Eigen::Index>(i)) = 1;
  return comp;
}

Mat hcat(const std::vector<Mat>& parts) {
  Eigen::Index rows = 0, cols = 0;
  for (auto& p : parts) {
    if (p.rows() > rows) rows = p.rows();
    cols += p.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index at = 0;
  for (auto& p : parts) {
    if (p.cols() > 0 && p.rows() > 0) out.block(0, at, p.rows(), p.cols()) = p;
    at += p.cols();
  }
  return out;
}

Mat vcat(const std::vector<Mat>& parts) {
  Eigen::Index rows = 0, cols = 0;
  for (auto& p : parts) {
    rows += p.rows();
    if (p.cols() > cols) cols = p.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index at = 0;
  for (auto& p : parts) {
    if (p.rows() > 0 && p.cols() > 0) out.block(at, 0, p.rows(), p.cols()) = p;
    at += p.rows();
  }
  return out;
}

Mat intersect_spans(const Mat& a, const Mat& b) {
  if (a.cols() == 0 || b.cols() == 0) return Mat::Zero(a.rows(), 0);
  Mat joint(a.rows(), a.cols() + b.cols());
  joint << a, -b;
  Mat k = kernel_basis(joint);
  Mat vecs = a * k.topRows(a.cols());
  return image_basis(vecs);
}

Eigen::Index homology_dim(const Mat& prev, const Mat& next) {
  Eigen::Index n = next.cols();
  return (n - rank_of(next)) - rank_of(prev);
}

Vec HomologySpace::classify(const Vec& cycle) const {
  if (reps.cols() == 0) return Vec::Zero(0);
  Mat basis(reps.rows(), reps.cols() + boundaries.cols());
  basis << reps, boundaries;
  Mat x = coords_in(basis, cycle);
  return x.topRows(reps.cols());
}

HomologySpace homology_space(const Mat& prev, const Mat& next) {
  HomologySpace h;
  h.ker = kernel_basis(next);
  h.boundaries = image_basis(prev);
  // representatives: kernel vectors extending the boundary span
  Mat cur = h.boundaries;
  std::vector<Mat> reps;
  Eigen::Index r = rank_of(cur);
  for (Eigen::Index i = 0; i < h.ker.cols(); ++i) {
    Mat cand(h.ker.rows(), cur.cols() + 1);
    cand << cur, h.ker.col(i);
    if (rank_of(cand) > r) {
      reps.push_back(h.ker.col(i));
      cur = cand;
      ++r;
    }
  }
  h.reps = Mat::Zero(next.cols(), static_cast<Eigen::Index>(reps.size()));
  for (size_t i = 0; i < reps.size(); ++i) h.reps.col(static_cast<Eigen::Index>(i)) = reps[i];
  return h;
}

}  // namespace ecdsheaf
