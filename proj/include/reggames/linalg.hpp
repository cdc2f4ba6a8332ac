#pragma once

// Small dense matrices with a one-sided Jacobi SVD. Everything here targets
// desk-scale problems (dimensions in the tens), where simplicity and
// numerical robustness beat asymptotics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace reggames {

class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Mat operator*(const Mat& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("Mat: dimension mismatch in product");
    Mat out(rows_, other.cols_);
    for (int r = 0; r < rows_; ++r)
      for (int k = 0; k < cols_; ++k) {
        const double v = (*this)(r, k);
        if (v == 0.0) continue;
        for (int c = 0; c < other.cols_; ++c) out(r, c) += v * other(k, c);
      }
    return out;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("Mat: apply size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (int c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
      y[r] = acc;
    }
    return y;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

struct SvdResult {
  Mat u;                      // m x n, orthonormal columns where sigma > 0
  std::vector<double> sigma;  // n values, descending
  Mat v;                      // n x n orthogonal
};

// One-sided Jacobi SVD (Hestenes). Requires rows >= cols; callers with wide
// matrices should pad or transpose (see svd() below).
namespace detail {

inline SvdResult jacobi_svd_tall(const Mat& a) {
  const int m = a.rows(), n = a.cols();
  Mat w = a;
  Mat v = Mat::identity(n);
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, g = 0.0;
        for (int r = 0; r < m; ++r) {
          alpha += w(r, p) * w(r, p);
          beta += w(r, q) * w(r, q);
          g += w(r, p) * w(r, q);
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::fabs(g) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int r = 0; r < m; ++r) {
          const double wp = w(r, p), wq = w(r, q);
          w(r, p) = c * wp - s * wq;
          w(r, q) = s * wp + c * wq;
        }
        for (int r = 0; r < n; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  SvdResult out;
  out.sigma.assign(n, 0.0);
  out.u = Mat(m, n);
  std::vector<int> order(n);
  std::vector<double> norms(n, 0.0);
  for (int c = 0; c < n; ++c) {
    double acc = 0.0;
    for (int r = 0; r < m; ++r) acc += w(r, c) * w(r, c);
    norms[c] = std::sqrt(acc);
  }
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return norms[i] > norms[j]; });
  Mat vs(n, n);
  for (int c = 0; c < n; ++c) {
    const int src = order[c];
    out.sigma[c] = norms[src];
    if (norms[src] > 0.0)
      for (int r = 0; r < m; ++r) out.u(r, c) = w(r, src) / norms[src];
    for (int r = 0; r < n; ++r) vs(r, c) = v(r, src);
  }
  out.v = std::move(vs);
  return out;
}

}  // namespace detail

// SVD valid for any shape. For rows < cols the input is padded with zero rows,
// which leaves the singular values and right vectors unchanged.
inline SvdResult svd(const Mat& a) {
  if (a.rows() >= a.cols()) return detail::jacobi_svd_tall(a);
  Mat padded(a.cols(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) padded(r, c) = a(r, c);
  SvdResult res = detail::jacobi_svd_tall(padded);
  Mat u(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) u(r, c) = res.u(r, c);
  res.u = std::move(u);
  return res;
}

inline std::vector<double> singular_values(const Mat& a) { return svd(a).sigma; }

// sigma_min / sigma_max; 0 for a zero matrix, +inf for an empty one.
inline double min_singular_ratio(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return std::numeric_limits<double>::infinity();
  std::vector<double> s = singular_values(a);
  const int k = std::min(a.rows(), a.cols());
  const double smax = s.front();
  if (smax == 0.0) return 0.0;
  return s[k - 1] / smax;
}

struct LstsqResult {
  std::vector<double> x;
  int rank = 0;
  double residual = 0.0;  // max-norm of A x - b
};

// Minimum-norm least squares via SVD. Rank is counted at rank_tol_rel
// relative to the largest singular value.
inline LstsqResult solve_least_squares(const Mat& a, const std::vector<double>& b,
                                       double rank_tol_rel = 1e-10) {
  if (static_cast<int>(b.size()) != a.rows()) throw std::invalid_argument("lstsq: rhs size mismatch");
  SvdResult s = svd(a);
  const int n = a.cols();
  LstsqResult out;
  out.x.assign(n, 0.0);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  const double cut = smax * rank_tol_rel;
  for (size_t j = 0; j < s.sigma.size(); ++j) {
    if (s.sigma[j] <= cut || s.sigma[j] == 0.0) continue;
    ++out.rank;
    double proj = 0.0;
    for (int r = 0; r < a.rows(); ++r) proj += s.u(r, static_cast<int>(j)) * b[r];
    proj /= s.sigma[j];
    for (int c = 0; c < n; ++c) out.x[c] += s.v(c, static_cast<int>(j)) * proj;
  }
  std::vector<double> ax = a.apply(out.x);
  for (int r = 0; r < a.rows(); ++r) out.residual = std::max(out.residual, std::fabs(ax[r] - b[r]));
  return out;
}

// Orthonormal basis of the nullspace, one column per basis vector.
inline Mat nullspace(const Mat& a, double rank_tol_rel = 1e-10) {
  SvdResult s = svd(a);
  const int n = a.cols();
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  const double cut = smax * rank_tol_rel;
  std::vector<int> null_cols;
  for (int j = 0; j < n; ++j)
    if (s.sigma[j] <= cut) null_cols.push_back(j);
  Mat basis(n, static_cast<int>(null_cols.size()));
  for (size_t c = 0; c < null_cols.size(); ++c)
    for (int r = 0; r < n; ++r) basis(r, static_cast<int>(c)) = s.v(r, null_cols[c]);
  return basis;
}

}  // namespace reggames
