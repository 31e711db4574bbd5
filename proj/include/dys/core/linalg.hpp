#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "dys/core/mat.hpp"
#include "dys/core/vec.hpp"
#include "dys/errors.hpp"

namespace dys {

/// LU factorization with partial pivoting, kept around so one factorization
/// can serve several right-hand sides.
class LuFactor {
public:
  explicit LuFactor(const Mat& M) : lu_(M), perm_(M.rows()) {
    if (M.rows() != M.cols()) throw DimensionMismatch("LU: matrix must be square");
    const int n = M.rows();
    std::iota(perm_.begin(), perm_.end(), 0);
    const double pivot_floor = 1e-14 * norm_inf(M);
    for (int k = 0; k < n; ++k) {
      int piv = k;
      double best = std::abs(lu_(k, k));
      for (int i = k + 1; i < n; ++i) {
        double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best <= pivot_floor)
        throw SingularMatrix("pivot " + std::to_string(best) + " below floor at column " +
                             std::to_string(k));
      if (piv != k) {
        for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      for (int i = k + 1; i < n; ++i) {
        lu_(i, k) /= lu_(k, k);
        double lik = lu_(i, k);
        if (lik == 0.0) continue;
        for (int j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
      }
    }
  }

  Vec solve(const Vec& b) const {
    const int n = lu_.rows();
    if (b.size() != n) throw DimensionMismatch("LU solve: rhs size mismatch");
    Vec y(n);
    for (int i = 0; i < n; ++i) {
      double s = b[perm_[i]];
      for (int j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
      y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * y[j];
      y[i] = s / lu_(i, i);
    }
    return y;
  }

private:
  Mat lu_;
  std::vector<int> perm_;
};

/// Solves M y = b by partial-pivot LU. Throws SingularMatrix on pivot collapse.
inline Vec solve_linear(const Mat& M, const Vec& b) { return LuFactor(M).solve(b); }

inline Mat inverse(const Mat& M) {
  const int n = M.rows();
  LuFactor lu(M);
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    Vec col = lu.solve(Vec::unit(n, j));
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

/// 1-norm condition number computed from the explicit inverse; adequate at
/// desk scale. Returns +inf when the factorization fails.
inline double cond_1(const Mat& M) {
  try {
    return norm_1(M) * norm_1(inverse(M));
  } catch (const SingularMatrix&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct SymEigen {
  Vec eigenvalues;   // ascending
  Mat eigenvectors;  // columns, matching order
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Sweeps run until
/// the off-diagonal Frobenius norm drops below 1e-12 * ||M||_F.
inline SymEigen sym_eigen(const Mat& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("sym_eigen: matrix must be square");
  if (!is_symmetric(M))
    throw NotSymmetric("asymmetry " + std::to_string(asymmetry_inf(M)) + " exceeds tolerance");
  const int n = M.rows();
  Mat A = symmetrize(M);
  Mat V = Mat::identity(n);
  const double stop = 1e-12 * std::max(norm_fro(A), 1e-300);

  auto off_fro = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += A(i, j) * A(i, j);
    return std::sqrt(s);
  };

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_fro() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (apq == 0.0) continue;
        double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) < A(b, b); });

  SymEigen out;
  out.eigenvalues = Vec(n);
  out.eigenvectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = A(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = V(i, order[j]);
  }
  return out;
}

inline double lambda_min(const Mat& symmetric) { return sym_eigen(symmetric).eigenvalues[0]; }

/// Principal square root of a symmetric positive semidefinite matrix.
inline Mat sqrtm_spd(const Mat& M) {
  SymEigen eig = sym_eigen(M);
  const int n = M.rows();
  Mat S(n, n);
  for (int j = 0; j < n; ++j) {
    double lam = eig.eigenvalues[j];
    if (lam < -1e-10 * (1.0 + norm_inf(M)))
      throw NotSymmetric("sqrtm_spd: matrix has negative eigenvalue " + std::to_string(lam));
    double r = std::sqrt(std::max(lam, 0.0));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) S(i, k) += r * eig.eigenvectors(i, j) * eig.eigenvectors(k, j);
  }
  return S;
}

}  // namespace dys
