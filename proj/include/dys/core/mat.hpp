#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "dys/core/vec.hpp"
#include "dys/errors.hpp"

namespace dys {

/// Dense row-major real matrix with explicit dimensions.
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    data_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw DimensionMismatch("ragged initializer");
      for (double x : r) data_.push_back(x);
    }
  }

  static Mat zeros(int rows, int cols) { return Mat(rows, cols); }
  static Mat identity(int n) {
    Mat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }
  static Mat diag(const Vec& d) {
    Mat D(d.size(), d.size());
    for (int i = 0; i < d.size(); ++i) D(i, i) = d[i];
    return D;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  Mat& operator+=(const Mat& o) {
    check_same_shape(o);
    for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same_shape(o);
    for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Mat& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }

private:
  void check_same_shape(const Mat& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionMismatch("matrix shape mismatch");
  }
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator-(Mat a, const Mat& b) { return a -= b; }
inline Mat operator*(double s, Mat a) { return a *= s; }
inline Mat operator*(Mat a, double s) { return a *= s; }
inline Mat operator-(Mat a) { return a *= -1.0; }

inline Vec operator*(const Mat& M, const Vec& x) {
  if (M.cols() != x.size()) throw DimensionMismatch("matvec: shape mismatch");
  Vec y(M.rows());
  for (int i = 0; i < M.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < M.cols(); ++j) s += M(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline Mat operator*(const Mat& A, const Mat& B) {
  if (A.cols() != B.rows()) throw DimensionMismatch("matmul: shape mismatch");
  Mat C(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int k = 0; k < A.cols(); ++k) {
      double a = A(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
    }
  return C;
}

inline Vec matvec(const Mat& M, const Vec& x) { return M * x; }
inline Mat matmul(const Mat& A, const Mat& B) { return A * B; }

inline Mat transpose(const Mat& M) {
  Mat T(M.cols(), M.rows());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) T(j, i) = M(i, j);
  return T;
}

/// Max absolute row sum.
inline double norm_inf(const Mat& M) {
  double m = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < M.cols(); ++j) s += std::abs(M(i, j));
    m = std::max(m, s);
  }
  return m;
}

/// Max absolute column sum.
inline double norm_1(const Mat& M) {
  double m = 0.0;
  for (int j = 0; j < M.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < M.rows(); ++i) s += std::abs(M(i, j));
    m = std::max(m, s);
  }
  return m;
}

inline double norm_fro(const Mat& M) {
  double s = 0.0;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) s += M(i, j) * M(i, j);
  return std::sqrt(s);
}

/// Max absolute entry of M - M^T, the asymmetry measure used by symmetry checks.
inline double asymmetry_inf(const Mat& M) {
  double m = 0.0;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) m = std::max(m, std::abs(M(i, j) - M(j, i)));
  return m;
}

inline bool is_symmetric(const Mat& M, double rel_tol = 1e-10) {
  if (M.rows() != M.cols()) return false;
  return asymmetry_inf(M) <= rel_tol * (1.0 + norm_inf(M));
}

inline Mat symmetrize(const Mat& M) {
  Mat S(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) S(i, j) = 0.5 * (M(i, j) + M(j, i));
  return S;
}

}  // namespace dys
