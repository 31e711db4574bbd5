#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "dys/core/linalg.hpp"
#include "dys/core/mat.hpp"
#include "dys/core/vec.hpp"
#include "dys/errors.hpp"
#include "dys/model/extreal.hpp"

namespace dys {

/// A Lipschitz-differentiable function R^d -> R with a declared gradient
/// Lipschitz constant. The Hessian callback is optional; it is required only
/// by the metric/Jacobian formulas.
struct SmoothFn {
  int dim = 0;
  bool is_zero = false;
  double lipschitz_grad = 0.0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;

  bool has_hessian() const { return static_cast<bool>(hessian); }

  static SmoothFn zero(int n) {
    SmoothFn z;
    z.dim = n;
    z.is_zero = true;
    z.lipschitz_grad = 0.0;
    z.value = [](const Vec&) { return 0.0; };
    z.gradient = [n](const Vec&) { return Vec::zeros(n); };
    z.hessian = [n](const Vec&) { return Mat(n, n); };
    return z;
  }
};

/// A proper lsc prox-friendly function: possibly nonsmooth, possibly
/// extended-valued, weakly convex with declared modulus. Either a closed-form
/// prox or (gradient, optionally hessian) for the Newton subproblem solver.
struct ProxableFn {
  int dim = 0;
  bool is_zero = false;
  double weak_convexity = 0.0;                 // beta such that f + (beta/2)||.||^2 is convex
  std::optional<double> lipschitz_hess_bound;  // L_f: Hessian norm bound at prox points
  std::function<ExtReal(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;               // optional
  std::function<Mat(const Vec&)> hessian;                // optional
  std::function<Vec(double, const Vec&)> closed_form_prox;  // optional, (gamma, z) -> point

  bool has_gradient() const { return static_cast<bool>(gradient); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
  bool has_closed_form_prox() const { return static_cast<bool>(closed_form_prox); }

  static ProxableFn zero(int n) {
    ProxableFn z;
    z.dim = n;
    z.is_zero = true;
    z.weak_convexity = 0.0;
    z.lipschitz_hess_bound = 0.0;
    z.value = [](const Vec&) { return ExtReal(0.0); };
    z.gradient = [n](const Vec&) { return Vec::zeros(n); };
    z.hessian = [n](const Vec&) { return Mat(n, n); };
    z.closed_form_prox = [](double, const Vec& v) { return v; };
    return z;
  }
};

/// Treats a smooth function as proxable. Any L-Lipschitz-differentiable
/// function is L-weakly convex, which is what the prox subproblem needs.
inline ProxableFn as_proxable(const SmoothFn& s) {
  ProxableFn p;
  p.dim = s.dim;
  p.is_zero = s.is_zero;
  p.weak_convexity = s.lipschitz_grad;
  p.value = [v = s.value](const Vec& x) { return ExtReal(v(x)); };
  p.gradient = s.gradient;
  p.hessian = s.hessian;
  if (s.is_zero) p.closed_form_prox = [](double, const Vec& v) { return v; };
  return p;
}

/// Linear operator x -> Lx with its precomputed operator norm.
struct LinearMap {
  Mat matrix;      // m x n
  double op_norm = 0.0;

  int rows() const { return matrix.rows(); }
  int cols() const { return matrix.cols(); }
  Vec apply(const Vec& x) const { return matrix * x; }
  Vec apply_transpose(const Vec& y) const { return transpose(matrix) * y; }

  static LinearMap identity(int n) {
    LinearMap l;
    l.matrix = Mat::identity(n);
    l.op_norm = 1.0;
    return l;
  }

  /// Builds a map from its matrix, computing ||L|| as sqrt(lambda_max(L^T L)).
  static LinearMap from_matrix(Mat M) {
    LinearMap l;
    Mat MtM = transpose(M) * M;
    SymEigen eig = sym_eigen(symmetrize(MtM));
    l.op_norm = std::sqrt(std::max(0.0, eig.eigenvalues[eig.eigenvalues.size() - 1]));
    l.matrix = std::move(M);
    return l;
  }
};

/// The additive composite objective: phi(x) = f(x) + g(x) + h(Lx).
/// g is proxable but must also be twice differentiable wherever the metric
/// formulas are evaluated; f may be nonsmooth.
struct ProblemTriple {
  std::string name;
  ProxableFn f;
  ProxableFn g;
  SmoothFn h;
  LinearMap L;
  int dim = 0;    // n
  int range = 0;  // m
  double probe_radius = 2.0;  // box radius on which declared constants are valid

  void check_dims() const {
    if (f.dim != dim || g.dim != dim)
      throw DimensionMismatch("problem '" + name + "': f/g dimension mismatch");
    if (h.dim != range) throw DimensionMismatch("problem '" + name + "': h dimension mismatch");
    if (L.rows() != range || L.cols() != dim)
      throw DimensionMismatch("problem '" + name + "': linear map shape mismatch");
  }
};

inline ExtReal phi_value(const ProblemTriple& P, const Vec& x) {
  ExtReal fv = P.f.value(x);
  if (!fv.finite()) return ExtReal::infinity();
  ExtReal gv = P.g.value(x);
  if (!gv.finite()) return ExtReal::infinity();
  return ExtReal(fv.value() + gv.value() + P.h.value(P.L.apply(x)));
}

/// Gradient of phi at x; valid where f is differentiable.
inline Vec phi_gradient(const ProblemTriple& P, const Vec& x) {
  if (!P.f.has_gradient())
    throw HessianUnavailable("phi_gradient: f has no gradient at requested point");
  if (!P.g.has_gradient())
    throw HessianUnavailable("phi_gradient: g has no gradient at requested point");
  return P.f.gradient(x) + P.g.gradient(x) + P.L.apply_transpose(P.h.gradient(P.L.apply(x)));
}

/// Hessian of phi at x, assembled as Hf + Hg + L^T Hh L.
inline Mat phi_hessian(const ProblemTriple& P, const Vec& x) {
  if (!P.f.has_hessian())
    throw HessianUnavailable("phi_hessian: f has no Hessian at requested point");
  if (!P.g.has_hessian() || !P.h.has_hessian())
    throw HessianUnavailable("phi_hessian: g or h has no Hessian");
  Mat Lt = transpose(P.L.matrix);
  return P.f.hessian(x) + P.g.hessian(x) + Lt * P.h.hessian(P.L.apply(x)) * P.L.matrix;
}

}  // namespace dys
