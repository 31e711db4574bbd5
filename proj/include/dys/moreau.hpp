#pragma once

#include <cmath>
#include <string>

#include "dys/core/finite_diff.hpp"
#include "dys/core/linalg.hpp"
#include "dys/core/rng.hpp"
#include "dys/core/vec.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"

namespace dys {

/// Output of one proximal evaluation of xi at z: the prox point, the Moreau
/// envelope value xi^gamma(z), and its gradient (z - point)/gamma.
struct ProxResult {
  Vec point;
  double envelope_value = 0.0;
  Vec envelope_gradient;
};

namespace detail {

inline void check_gamma_range(const ProxableFn& xi, double gamma) {
  if (gamma <= 0.0) throw GammaOutOfRange("gamma must be positive, got " + std::to_string(gamma));
  if (xi.weak_convexity > 0.0 && gamma >= 1.0 / xi.weak_convexity)
    throw GammaOutOfRange("gamma = " + std::to_string(gamma) + " not below 1/beta = " +
                          std::to_string(1.0 / xi.weak_convexity));
}

inline double finite_value(const ProxableFn& xi, const Vec& u) {
  ExtReal v = xi.value(u);
  if (!v.finite()) throw NonFiniteValue("prox subproblem reached infinite objective value");
  return v.value();
}

/// Minimizes G(u) = xi(u) + ||u - z||^2 / (2 gamma) by damped Newton with
/// Armijo backtracking. G is strongly convex with modulus 1/gamma - beta > 0,
/// so descent steps cannot stall away from the minimizer for smooth xi.
inline Vec prox_newton(const ProxableFn& xi, double gamma, const Vec& z, const Vec& start) {
  const int n = z.size();
  auto value_fn = [&](const Vec& u) { return finite_value(xi, u); };
  auto grad_xi = [&](const Vec& u) -> Vec {
    if (xi.has_gradient()) return xi.gradient(u);
    return fd_gradient(value_fn, u);
  };
  auto objective = [&](const Vec& u) {
    Vec d = u - z;
    return finite_value(xi, u) + dot(d, d) / (2.0 * gamma);
  };
  auto grad_obj = [&](const Vec& u) { return grad_xi(u) + (1.0 / gamma) * (u - z); };

  const double grad_tol = 1e-10;
  const int max_iter = 200;
  Vec u = start;
  double fu = objective(u);
  for (int it = 0; it < max_iter; ++it) {
    Vec grad = grad_obj(u);
    if (norm(grad) <= grad_tol) {
      if (!u.all_finite()) throw NonFiniteValue("prox produced non-finite point");
      return u;
    }
    Mat H = xi.has_hessian() ? xi.hessian(u) : symmetrize(fd_jacobian(grad_xi, u));
    for (int i = 0; i < n; ++i) H(i, i) += 1.0 / gamma;
    Vec dir;
    try {
      dir = LuFactor(H).solve(-grad);
    } catch (const SingularMatrix&) {
      dir = -gamma * grad;
    }
    double slope = dot(grad, dir);
    if (slope >= 0.0) {  // not a descent direction (degenerate curvature model)
      dir = -gamma * grad;
      slope = dot(grad, dir);
    }
    double t = 1.0;
    bool moved = false;
    while (t > 1e-18) {
      Vec trial = u + t * dir;
      double ft;
      try {
        ft = objective(trial);
      } catch (const NonFiniteValue&) {
        t *= 0.5;
        continue;
      }
      // The roundoff allowance keeps the search from rejecting full Newton
      // steps once the true decrease drops below double resolution.
      if (ft <= fu + 1e-4 * t * slope + 1e-14 * (1.0 + std::abs(fu))) {
        u = trial;
        fu = ft;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;  // line search exhausted; gradient check below decides
  }
  if (norm(grad_obj(u)) <= grad_tol) return u;
  throw SubproblemNotConverged("prox Newton stalled after " + std::to_string(max_iter) +
                               " iterations, |grad| = " + std::to_string(norm(grad_obj(u))));
}

}  // namespace detail

/// prox_{gamma xi}(z) together with the envelope value and gradient, starting
/// the Newton subproblem (when there is no closed form) from a given point.
inline ProxResult prox_from_start(const ProxableFn& xi, double gamma, const Vec& z,
                                  const Vec& start) {
  detail::check_gamma_range(xi, gamma);
  ProxResult r;
  if (xi.has_closed_form_prox()) {
    r.point = xi.closed_form_prox(gamma, z);
  } else {
    r.point = detail::prox_newton(xi, gamma, z, start);
  }
  if (!r.point.all_finite()) throw NonFiniteValue("prox point has non-finite entries");
  Vec d = z - r.point;
  r.envelope_value = detail::finite_value(xi, r.point) + dot(d, d) / (2.0 * gamma);
  r.envelope_gradient = (1.0 / gamma) * d;
  return r;
}

/// prox_{gamma xi}(z); requires 0 < gamma < 1/beta so the prox is
/// single-valued.
inline ProxResult prox(const ProxableFn& xi, double gamma, const Vec& z) {
  return prox_from_start(xi, gamma, z, z);
}

/// Samples pairs in the box [-radius, radius]^dim and returns the largest
/// observed ratio ||prox(z1) - prox(z2)|| / ||z1 - z2||. The prox of a
/// beta-weakly convex function is 1/(1 - gamma beta)-Lipschitz, so the result
/// should not exceed that constant (up to solver tolerance).
inline double prox_lipschitz_probe(const ProxableFn& xi, double gamma, int samples, double radius,
                                   std::uint64_t seed) {
  detail::check_gamma_range(xi, gamma);
  TrialRng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec z1 = rng.uniform_vec(xi.dim, -radius, radius);
    Vec z2 = rng.uniform_vec(xi.dim, -radius, radius);
    double dz = norm(z1 - z2);
    if (dz < 1e-12) continue;
    Vec p1 = prox(xi, gamma, z1).point;
    Vec p2 = prox(xi, gamma, z2).point;
    worst = std::max(worst, norm(p1 - p2) / dz);
  }
  return worst;
}

}  // namespace dys
