#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "dys/core/mat.hpp"
#include "dys/core/vec.hpp"
#include "dys/errors.hpp"

namespace dys {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

/// Default central-difference step: eps^(1/3) * (1 + ||z||), the usual
/// truncation/roundoff balance for first derivatives.
inline double fd_default_step(const Vec& z) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm(z));
}

/// Step for second differences of function values: eps^(1/4) * (1 + ||z||).
inline double fd_default_step2(const Vec& z) {
  return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + norm(z));
}

namespace detail {
inline double probe(const ScalarField& fn, const Vec& z) {
  double v = fn(z);
  if (!std::isfinite(v)) throw NonFiniteValue("finite difference probe returned non-finite value");
  return v;
}
inline Vec probe(const VectorField& fn, const Vec& z) {
  Vec v = fn(z);
  if (!v.all_finite()) throw NonFiniteValue("finite difference probe returned non-finite vector");
  return v;
}
}  // namespace detail

/// Componentwise central difference (fn(z + h e_i) - fn(z - h e_i)) / (2h).
inline Vec fd_gradient(const ScalarField& fn, const Vec& z, double h = 0.0) {
  if (h <= 0.0) h = fd_default_step(z);
  Vec g(z.size());
  Vec zp = z, zm = z;
  for (int i = 0; i < z.size(); ++i) {
    zp[i] = z[i] + h;
    zm[i] = z[i] - h;
    g[i] = (detail::probe(fn, zp) - detail::probe(fn, zm)) / (2.0 * h);
    zp[i] = z[i];
    zm[i] = z[i];
  }
  return g;
}

/// Central-difference Jacobian, one column per coordinate of z.
inline Mat fd_jacobian(const VectorField& map, const Vec& z, double h = 0.0) {
  if (h <= 0.0) h = fd_default_step(z);
  Vec zp = z, zm = z;
  Mat J;
  for (int j = 0; j < z.size(); ++j) {
    zp[j] = z[j] + h;
    zm[j] = z[j] - h;
    Vec col = (1.0 / (2.0 * h)) * (detail::probe(map, zp) - detail::probe(map, zm));
    if (j == 0) J = Mat(col.size(), z.size());
    for (int i = 0; i < col.size(); ++i) J(i, j) = col[i];
    zp[j] = z[j];
    zm[j] = z[j];
  }
  return J;
}

/// Second-difference Hessian of a scalar field from function values only.
inline Mat fd_hessian(const ScalarField& fn, const Vec& z, double h = 0.0) {
  if (h <= 0.0) h = fd_default_step2(z);
  const int n = z.size();
  Mat H(n, n);
  const double f0 = detail::probe(fn, z);
  Vec w = z;
  for (int i = 0; i < n; ++i) {
    w[i] = z[i] + h;
    double fp = detail::probe(fn, w);
    w[i] = z[i] - h;
    double fm = detail::probe(fn, w);
    w[i] = z[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      w[i] = z[i] + h;
      w[j] = z[j] + h;
      double fpp = detail::probe(fn, w);
      w[j] = z[j] - h;
      double fpm = detail::probe(fn, w);
      w[i] = z[i] - h;
      w[j] = z[j] + h;
      double fmp = detail::probe(fn, w);
      w[j] = z[j] - h;
      double fmm = detail::probe(fn, w);
      w[i] = z[i];
      w[j] = z[j];
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace dys
