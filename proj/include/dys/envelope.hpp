#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "dys/core/linalg.hpp"
#include "dys/core/mat.hpp"
#include "dys/core/vec.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"
#include "dys/splitting.hpp"

namespace dys {

/// Envelope quantities at a point. The envelope is defined with the forward
/// term evaluated at prox_{gamma g}(z), so these functions always use that
/// convention internally regardless of the iteration's q_at_prox flag.
struct EnvelopeEval {
  double value = 0.0;
  Vec gradient;
  Mat metric;
  std::optional<Mat> hessian;
};

namespace detail {

inline DysState envelope_state(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  SplitParams esp = sp;
  esp.q_at_prox = true;
  return compute_state(P, esp, z);
}

/// (I + gamma hess g(proxg))^{-1}, the Jacobian of prox_{gamma g} at z.
inline Mat prox_g_jacobian(const ProblemTriple& P, double gamma, const Vec& proxg) {
  if (!P.g.has_hessian())
    throw HessianUnavailable("envelope metric needs the Hessian of g");
  Mat M = P.g.hessian(proxg);
  const int n = M.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = (i == j ? 1.0 : 0.0) + gamma * M(i, j);
  try {
    return inverse(M);
  } catch (const SingularMatrix&) {
    throw MetricSingular("I + gamma hess g is singular; gamma too large for g's curvature");
  }
}

inline Mat metric_from_state(const ProblemTriple& P, double gamma, const DysState& s) {
  const int n = P.dim;
  Mat B = prox_g_jacobian(P, gamma, s.proxg);
  // hess of the Moreau envelope of g: (1/gamma)(I - B)
  Mat Hge = Mat::zeros(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Hge(i, j) = ((i == j ? 1.0 : 0.0) - B(i, j)) / gamma;
  if (!P.h.has_hessian())
    throw HessianUnavailable("envelope metric needs the Hessian of h");
  Mat Hh = P.h.hessian(P.L.apply(s.proxg));
  Mat Lt = transpose(P.L.matrix);
  Mat inner = Mat::identity(n) + (-gamma) * Hge;              // I - gamma hess g^gamma
  Mat A = Mat::identity(n) + (-2.0 * gamma) * Hge +
          (-gamma) * (Lt * (Hh * (P.L.matrix * inner)));
  try {
    LuFactor check(A);
  } catch (const SingularMatrix&) {
    throw MetricSingular("metric A(z) is numerically singular");
  }
  double cond = cond_1(A);
  if (!(cond <= 1e12))
    throw MetricSingular("metric A(z) has condition estimate " + std::to_string(cond) +
                         "; gamma is outside the invertibility range");
  return A;
}

}  // namespace detail

/// Metric A(z) = I - 2 gamma hess g^gamma(z)
///             - gamma L' hess h(L proxg) L (I - gamma hess g^gamma(z)).
inline Mat env_metric(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  DysState s = detail::envelope_state(P, sp, z);
  return detail::metric_from_state(P, sp.gamma, s);
}

/// Envelope value assembled from intermediates of an already computed state.
/// The state must have been produced with q at the prox point.
inline double env_value_from_state(const DysState& s, double gamma) {
  return s.g_env - gamma * dot(s.g_env_grad, s.g_env_grad) - gamma * dot(s.q, s.g_env_grad) +
         s.h_at_Lproxg - 0.5 * gamma * dot(s.q, s.q) + s.f_env;
}

inline double env_value(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  DysState s = detail::envelope_state(P, sp, z);
  return env_value_from_state(s, sp.gamma);
}

/// grad phi^gamma(z) = -(1/gamma) A(z) (p(z) - proxg(z)).
inline Vec env_gradient(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  DysState s = detail::envelope_state(P, sp, z);
  Mat A = detail::metric_from_state(P, sp.gamma, s);
  return (-1.0 / sp.gamma) * matvec(A, s.w);
}

inline EnvelopeEval env_eval(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  DysState s = detail::envelope_state(P, sp, z);
  EnvelopeEval e;
  e.metric = detail::metric_from_state(P, sp.gamma, s);
  e.value = env_value_from_state(s, sp.gamma);
  e.gradient = (-1.0 / sp.gamma) * matvec(e.metric, s.w);
  return e;
}

/// Envelope Hessian at a critical point zstar:
///   -(1/gamma) A (I + gamma hess f(p))^{-1} A + (1/gamma) A (I + gamma hess g(proxg))^{-1}.
/// Valid only where the envelope gradient vanishes; the curvature of f at p
/// must satisfy gamma ||hess f(p)|| < 1 (and stay within any declared bound).
/// The result is provably symmetric when h = 0 or g = 0; in those modes the
/// symmetry is asserted and the symmetrized matrix returned. In mixed modes
/// the raw product is returned as is.
inline Mat env_hessian_at_critical(const ProblemTriple& P, const SplitParams& sp,
                                   const Vec& zstar) {
  const double gamma = sp.gamma;
  DysState s = detail::envelope_state(P, sp, zstar);
  if (s.resid > 1e-8 * (1.0 + norm(zstar)))
    throw NotCritical("point has residual " + std::to_string(s.resid) +
                      ", not a critical point of the envelope");
  if (!P.f.has_hessian())
    throw HessianUnavailable("envelope Hessian needs the Hessian of f at p");

  Mat Hf = P.f.hessian(s.p);
  SymEigen ef = sym_eigen(symmetrize(Hf));
  double hf_norm = 0.0;
  for (int i = 0; i < ef.eigenvalues.size(); ++i)
    hf_norm = std::max(hf_norm, std::abs(ef.eigenvalues[i]));
  if (P.f.lipschitz_hess_bound && hf_norm > *P.f.lipschitz_hess_bound * (1.0 + 1e-8) + 1e-12)
    throw AssumptionThreeViolated("||hess f(p)|| = " + std::to_string(hf_norm) +
                                  " exceeds declared bound " +
                                  std::to_string(*P.f.lipschitz_hess_bound));
  if (gamma * hf_norm >= 1.0)
    throw AssumptionThreeViolated("gamma ||hess f(p)|| = " + std::to_string(gamma * hf_norm) +
                                  " >= 1; envelope Hessian formula undefined");

  const int n = P.dim;
  Mat IgHf = Mat::identity(n) + gamma * Hf;
  Mat Mf;
  try {
    Mf = inverse(IgHf);
  } catch (const SingularMatrix&) {
    throw AssumptionThreeViolated("I + gamma hess f(p) is singular");
  }
  Mat Mg = detail::prox_g_jacobian(P, gamma, s.proxg);
  Mat A = detail::metric_from_state(P, gamma, s);

  Mat H = (-1.0 / gamma) * (A * (Mf * A)) + (1.0 / gamma) * (A * Mg);
  if (P.h.is_zero || P.g.is_zero) {
    double dev = asymmetry_inf(H);
    if (dev > 1e-8 * (1.0 + norm_inf(H)))
      throw NotSymmetric("envelope Hessian asymmetry " + std::to_string(dev) +
                         " in a mode where it must be symmetric");
    return symmetrize(H);
  }
  return H;
}

/// ||T(z) - (z - alpha gamma A^{-1}(z) grad phi^gamma(z))||. The iteration is
/// exactly metric gradient descent on the envelope, so this deviation should
/// be at roundoff level whenever q is evaluated at the prox point.
inline double equivalence_check(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  Vec t = dys_step(P, sp, z).z_next;
  DysState s = detail::envelope_state(P, sp, z);
  Mat A = detail::metric_from_state(P, sp.gamma, s);
  Vec grad = (-1.0 / sp.gamma) * matvec(A, s.w);
  Vec via_grad = z - (sp.alpha * sp.gamma) * solve_linear(A, grad);
  return norm(t - via_grad);
}

}  // namespace dys
