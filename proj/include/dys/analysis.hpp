#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dys/core/finite_diff.hpp"
#include "dys/core/linalg.hpp"
#include "dys/core/rng.hpp"
#include "dys/driver.hpp"
#include "dys/envelope.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"
#include "dys/moreau.hpp"
#include "dys/splitting.hpp"

namespace dys {

/// Eigenvalue threshold separating strict saddles / local-minimum candidates
/// from numerically flat curvature.
inline constexpr double kEigTol = 1e-7;

enum class PointClass { NotCritical, Critical, StrictSaddle, LocalMinCandidate, Indeterminate };

inline const char* point_class_name(PointClass c) {
  switch (c) {
    case PointClass::NotCritical: return "not_critical";
    case PointClass::Critical: return "critical";
    case PointClass::StrictSaddle: return "strict_saddle";
    case PointClass::LocalMinCandidate: return "local_min_candidate";
    case PointClass::Indeterminate: return "indeterminate";
  }
  return "?";
}

/// Two-sided report on a point: curvature of the envelope at z and of the
/// objective at x = prox_{gamma g}(z). Eigenvalue fields are meaningful only
/// when the matching has_* flag is set (second derivatives may be missing,
/// and envelope curvature is only classified in the symmetric modes).
struct PointReport {
  Vec z;
  Vec x;
  double resid = 0.0;
  double grad_env_norm = 0.0;
  bool has_env_eig = false;
  double lambda_min_env = 0.0;
  PointClass classification = PointClass::NotCritical;
  bool has_phi = false;
  double phi_grad_norm = 0.0;
  bool has_phi_eig = false;
  double lambda_min_phi = 0.0;
  PointClass phi_classification = PointClass::NotCritical;
};

namespace detail {

inline PointClass class_from_lambda_min(double lmin) {
  if (lmin < -kEigTol) return PointClass::StrictSaddle;
  if (lmin > kEigTol) return PointClass::LocalMinCandidate;
  return PointClass::Indeterminate;
}

}  // namespace detail

/// Classifies z for the envelope and x = prox_{gamma g}(z) for the objective,
/// and cross-checks that the two sides agree: an envelope-critical z must give
/// a stationary x, and in the symmetric modes (h = 0 or g = 0) the minimal
/// eigenvalues must agree in sign. Disagreement raises CorrespondenceViolated.
inline PointReport classify(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  PointReport rep;
  DysState s = detail::envelope_state(P, sp, z);
  rep.z = z;
  rep.x = s.proxg;
  rep.resid = s.resid;
  Mat A = detail::metric_from_state(P, sp.gamma, s);
  rep.grad_env_norm = norm((-1.0 / sp.gamma) * matvec(A, s.w));

  const bool critical = s.resid <= 1e-8 * (1.0 + norm(z));
  const bool symmetric_mode = P.h.is_zero || P.g.is_zero;

  // objective side, where second derivatives exist
  try {
    Vec gphi = phi_gradient(P, rep.x);
    rep.has_phi = true;
    rep.phi_grad_norm = norm(gphi);
    bool phi_stationary = rep.phi_grad_norm <= 1e-6 * (1.0 + norm(rep.x));
    if (!phi_stationary) {
      rep.phi_classification = PointClass::NotCritical;
    } else {
      try {
        Mat Hphi = symmetrize(phi_hessian(P, rep.x));
        rep.has_phi_eig = true;
        rep.lambda_min_phi = lambda_min(Hphi);
        rep.phi_classification = detail::class_from_lambda_min(rep.lambda_min_phi);
      } catch (const HessianUnavailable&) {
        rep.phi_classification = PointClass::Critical;
      }
    }
  } catch (const HessianUnavailable&) {
    rep.has_phi = false;
  }

  if (!critical) {
    rep.classification = PointClass::NotCritical;
    return rep;
  }

  rep.classification = PointClass::Critical;
  if (symmetric_mode && P.f.has_hessian()) {
    Mat Henv = env_hessian_at_critical(P, sp, z);
    rep.has_env_eig = true;
    rep.lambda_min_env = lambda_min(symmetrize(Henv));
    rep.classification = detail::class_from_lambda_min(rep.lambda_min_env);
  }

  // criticality of the envelope must transfer to stationarity of phi
  if (rep.has_phi) {
    double slack = (10.0 / sp.gamma) * 1e-8 * (1.0 + norm(z)) + 1e-9;
    if (rep.phi_grad_norm > slack)
      throw CorrespondenceViolated("envelope-critical point maps to x with |grad phi| = " +
                                   std::to_string(rep.phi_grad_norm));
  }
  // sign agreement of minimal curvature, where both sides are classified
  if (rep.has_env_eig && rep.has_phi_eig && std::abs(rep.lambda_min_env) > kEigTol &&
      std::abs(rep.lambda_min_phi) > kEigTol) {
    if ((rep.lambda_min_env < 0.0) != (rep.lambda_min_phi < 0.0))
      throw CorrespondenceViolated(
          "curvature sign mismatch: lambda_min_env = " + std::to_string(rep.lambda_min_env) +
          ", lambda_min_phi = " + std::to_string(rep.lambda_min_phi));
  }
  return rep;
}

/// Step-size ranges inside which the iteration map stays a local
/// diffeomorphism. alpha1 applies when h = 0, alpha2 when g = 0; an
/// inapplicable or vacuous bound is +inf.
struct StepBounds {
  double alpha1 = std::numeric_limits<double>::infinity();
  double alpha2 = std::numeric_limits<double>::infinity();
  double lambda_min_jt_probe = std::numeric_limits<double>::quiet_NaN();
};

inline StepBounds step_bounds(const ProblemTriple& P, const SplitParams& sp) {
  if (!P.g.is_zero && !P.h.is_zero)
    throw ModeMismatch("step bounds are defined only when h = 0 or g = 0");
  if (!P.f.lipschitz_hess_bound)
    throw BadConfig("f has no declared curvature bound; step bounds unavailable");
  if (!P.g.lipschitz_hess_bound)
    throw BadConfig("g has no declared curvature bound; step bounds unavailable");
  const double gamma = sp.gamma;
  const double Lf = *P.f.lipschitz_hess_bound;
  const double Lg = *P.g.lipschitz_hess_bound;
  const double Lh = P.h.lipschitz_grad;
  const double Lnorm = P.L.op_norm;
  StepBounds b;
  if (P.h.is_zero) {
    double ratio = ((1.0 - gamma * Lg) / (1.0 + gamma * Lg)) *
                   ((1.0 - gamma * Lf) / (1.0 + gamma * Lf));
    double denom = 1.0 - ratio;
    if (denom > 0.0) b.alpha1 = 2.0 / denom;
  }
  if (P.g.is_zero) {
    double denom = gamma * (Lh * Lnorm * Lnorm + Lf);
    if (denom > 0.0) b.alpha2 = (1.0 + gamma * Lf) / denom;
  }
  return b;
}

/// Jacobian of the iteration map,
///   J_T(z) = I + alpha ((I + gamma hess f(p))^{-1} A(z) - (I + gamma hess g(proxg))^{-1}).
inline Mat jacobian_T(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  DysState s = detail::envelope_state(P, sp, z);
  if (!P.f.has_hessian()) throw HessianUnavailable("jacobian_T needs the Hessian of f at p");
  const int n = P.dim;
  Mat A = detail::metric_from_state(P, sp.gamma, s);
  Mat IgHf = Mat::identity(n) + sp.gamma * P.f.hessian(s.p);
  Mat Mf;
  try {
    Mf = inverse(IgHf);
  } catch (const SingularMatrix&) {
    throw AssumptionThreeViolated("I + gamma hess f(p) is singular");
  }
  Mat B = detail::prox_g_jacobian(P, sp.gamma, s.proxg);
  return Mat::identity(n) + sp.alpha * (Mf * A - B);
}

/// Smallest eigenvalue of J_T at a fixed point. In the reducible modes the
/// spectrum is real and is computed through an exact symmetric similarity:
///   gd  : J_T = I - alpha gamma C itself symmetric (C = L' hess h L),
///   fbs : J_T ~ (1-alpha) I + alpha Mf^{1/2} (I - gamma C) Mf^{1/2},
///   bfs : J_T ~ (1-alpha) I + alpha B^{1/2} (I - gamma C) B^{1/2},
///   drs : J_T ~ (1-alpha/2) I + alpha S (B - I/2) S,  S = (2 Mf - I)^{1/2}.
/// For full three-part problems no real-spectrum guarantee exists and the
/// value returned is the minimal eigenvalue of the symmetrized J_T.
inline double diffeo_probe(const ProblemTriple& P, const SplitParams& sp, const Vec& zstar) {
  DysState s = detail::envelope_state(P, sp, zstar);
  if (s.resid > 1e-8 * (1.0 + norm(zstar)))
    throw NotFixedPoint("diffeo probe requires a fixed point; residual = " +
                        std::to_string(s.resid));
  const int n = P.dim;
  const double gamma = sp.gamma;
  const double alpha = sp.alpha;

  Mat C = transpose(P.L.matrix) * (P.h.hessian(P.L.apply(s.proxg)) * P.L.matrix);
  Mat ImgC = Mat::identity(n) + (-gamma) * C;
  auto mf_inv = [&]() {
    if (!P.f.has_hessian()) throw HessianUnavailable("diffeo probe needs the Hessian of f");
    Mat IgHf = Mat::identity(n) + gamma * P.f.hessian(s.p);
    try {
      return inverse(IgHf);
    } catch (const SingularMatrix&) {
      throw AssumptionThreeViolated("I + gamma hess f(p) is singular");
    }
  };

  switch (mode_of(P)) {
    case Mode::GD:
      return lambda_min(symmetrize(Mat::identity(n) + (-alpha * gamma) * C));
    case Mode::FBS: {
      Mat S = sqrtm_spd(symmetrize(mf_inv()));
      Mat M = (1.0 - alpha) * Mat::identity(n) + alpha * (S * (ImgC * S));
      return lambda_min(symmetrize(M));
    }
    case Mode::BFS: {
      Mat S = sqrtm_spd(symmetrize(detail::prox_g_jacobian(P, gamma, s.proxg)));
      Mat M = (1.0 - alpha) * Mat::identity(n) + alpha * (S * (ImgC * S));
      return lambda_min(symmetrize(M));
    }
    case Mode::DRS: {
      Mat Mf = mf_inv();
      Mat T = 2.0 * Mf - Mat::identity(n);  // (I+gamma Hf)^{-1}(I-gamma Hf), PD under A3
      Mat S;
      try {
        S = sqrtm_spd(symmetrize(T));
      } catch (const NotSymmetric&) {
        throw AssumptionThreeViolated("2(I + gamma hess f)^{-1} - I is not positive definite");
      }
      Mat B = detail::prox_g_jacobian(P, gamma, s.proxg);
      Mat Bh = B + (-0.5) * Mat::identity(n);
      Mat M = (1.0 - 0.5 * alpha) * Mat::identity(n) + alpha * (S * (Bh * S));
      return lambda_min(symmetrize(M));
    }
    case Mode::DYS:
      return lambda_min(symmetrize(jacobian_T(P, sp, zstar)));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Evidence that a converged z* corresponds to a minimizer of the objective:
/// the envelope value equals phi at x* = prox_{gamma g}(z*), and phi does not
/// decrease along random directions around x*.
struct CorrespondenceReport {
  double envelope_value = 0.0;
  double phi_at_x = 0.0;
  double gap = 0.0;                 // |envelope - phi(x*)|
  double min_probe_increase = 0.0;  // min over directions of phi(x+r u) - phi(x)
  bool passed = false;
};

inline CorrespondenceReport minimizer_correspondence_check(const ProblemTriple& P,
                                                           const SplitParams& sp,
                                                           const Vec& zstar,
                                                           std::uint64_t seed = 12345,
                                                           int directions = 100,
                                                           double radius = 1e-3) {
  DysState s = detail::envelope_state(P, sp, zstar);
  if (s.resid > 1e-7 * (1.0 + norm(zstar)))
    throw NotFixedPoint("correspondence check requires a converged point; residual = " +
                        std::to_string(s.resid));
  CorrespondenceReport rep;
  rep.envelope_value = env_value_from_state(s, sp.gamma);
  ExtReal pv = phi_value(P, s.proxg);
  if (!pv.finite())
    throw CorrespondenceViolated("phi is infinite at prox_{gamma g}(z*)");
  rep.phi_at_x = pv.value();
  rep.gap = std::abs(rep.envelope_value - rep.phi_at_x);
  if (rep.gap > 1e-7 * (1.0 + std::abs(rep.phi_at_x)))
    throw CorrespondenceViolated("envelope and objective disagree at the fixed point by " +
                                 std::to_string(rep.gap));

  TrialRng rng(seed);
  double min_inc = std::numeric_limits<double>::infinity();
  for (int k = 0; k < directions; ++k) {
    Vec u = rng.normal_vec(P.dim);
    double nu = norm(u);
    if (nu < 1e-12) continue;
    Vec probe = s.proxg + (radius / nu) * u;
    ExtReal fv = phi_value(P, probe);
    double inc = fv.finite() ? fv.value() - rep.phi_at_x
                             : std::numeric_limits<double>::infinity();
    min_inc = std::min(min_inc, inc);
  }
  rep.min_probe_increase = min_inc;
  if (min_inc < -1e-10 * (1.0 + std::abs(rep.phi_at_x)))
    throw CorrespondenceViolated("phi decreases near the reported minimizer by " +
                                 std::to_string(-min_inc));
  rep.passed = true;
  return rep;
}

/// One named pass/fail measurement inside the invariant suite.
struct CheckItem {
  std::string name;
  bool passed = false;
  double measure = 0.0;  // worst observed value; meaning depends on the check
  double threshold = 0.0;
  std::string note;
};

/// Violation amounts for the envelope sandwich at one point; nonpositive
/// values mean the inequality holds.
struct SandwichReport {
  double lower_violation = 0.0;  // phi(p) + C1|w|^2 - envelope
  double upper_violation = 0.0;  // envelope - phi(p) - C2|w|^2
  double prox_violation = 0.0;   // envelope - phi(proxg)
};

inline SandwichReport sandwich_check(const ProblemTriple& P, const SplitParams& sp,
                                     const Vec& z) {
  if (!P.g.lipschitz_hess_bound)
    throw BadConfig("sandwich constants need g's curvature bound");
  DysState s = detail::envelope_state(P, sp, z);
  const double gamma = sp.gamma;
  double curv = P.h.lipschitz_grad * P.L.op_norm * P.L.op_norm + *P.g.lipschitz_hess_bound;
  double c1 = (1.0 - gamma * curv) / (2.0 * gamma);
  double c2 = (1.0 + gamma * curv) / (2.0 * gamma);
  double env = env_value_from_state(s, sp.gamma);
  double w2 = dot(s.w, s.w);
  ExtReal phip = phi_value(P, s.p);
  ExtReal phig = phi_value(P, s.proxg);
  SandwichReport r;
  r.lower_violation = phip.finite() ? phip.value() + c1 * w2 - env
                                    : std::numeric_limits<double>::infinity();
  r.upper_violation = phip.finite() ? env - phip.value() - c2 * w2
                                    : -std::numeric_limits<double>::infinity();
  r.prox_violation = phig.finite() ? env - phig.value()
                                   : -std::numeric_limits<double>::infinity();
  return r;
}

/// Runs the cross-cutting identities on one problem instance with sampled
/// points: iteration/gradient-descent equivalence, the envelope sandwich,
/// agreement of analytic and finite-difference envelope gradients, agreement
/// of the analytic Jacobian of T with finite differences, the mode reduction,
/// and the prox Lipschitz bound. Pure measurement; never throws on a failed
/// check, only on broken preconditions.
inline std::vector<CheckItem> invariant_suite(const ProblemTriple& P, const SplitParams& sp,
                                              std::uint64_t seed = 2024, int samples = 50) {
  std::vector<CheckItem> items;
  TrialRng rng(seed);
  const double radius = P.probe_radius;
  auto sample = [&]() { return rng.uniform_vec(P.dim, -radius, radius); };

  {
    CheckItem it{"iteration_matches_metric_gradient_descent", false, 0.0, 0.0, ""};
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
      Vec z = sample();
      worst = std::max(worst, equivalence_check(P, sp, z) / (1.0 + norm(z)));
    }
    it.measure = worst;
    it.threshold = 1e-9;
    it.passed = worst <= it.threshold;
    items.push_back(it);
  }
  {
    CheckItem it{"envelope_sandwich", false, 0.0, 1e-8, ""};
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
      SandwichReport r = sandwich_check(P, sp, sample());
      worst = std::max({worst, r.lower_violation, r.upper_violation, r.prox_violation});
    }
    it.measure = worst;
    it.passed = worst <= it.threshold;
    items.push_back(it);
  }
  {
    // the envelope and the objective share their infimum; compare dense grid
    // minima on low-dimensional instances
    CheckItem it{"envelope_infimum_matches_objective", false, 0.0, 0.0, ""};
    if (P.dim <= 2) {
      const int pts = P.dim == 1 ? 401 : 81;
      const double step = 2.0 * radius / (pts - 1);
      double min_env = std::numeric_limits<double>::infinity();
      double min_phi = std::numeric_limits<double>::infinity();
      Vec x(P.dim);
      for (int i = 0; i < pts; ++i) {
        x[0] = -radius + step * i;
        const int jend = P.dim == 2 ? pts : 1;
        for (int j = 0; j < jend; ++j) {
          if (P.dim == 2) x[1] = -radius + step * j;
          min_env = std::min(min_env, env_value(P, sp, x));
          ExtReal v = phi_value(P, x);
          if (v.finite()) min_phi = std::min(min_phi, v.value());
        }
      }
      double curv = P.h.lipschitz_grad * P.L.op_norm * P.L.op_norm +
                    (P.g.lipschitz_hess_bound ? *P.g.lipschitz_hess_bound : 0.0) +
                    (P.f.lipschitz_hess_bound ? *P.f.lipschitz_hess_bound : 0.0);
      it.threshold = (1.0 + curv) * step * step * P.dim;
      it.measure = std::abs(min_env - min_phi);
      it.passed = it.measure <= it.threshold;
    } else {
      it.note = "skipped: grid comparison limited to dimension <= 2";
      it.passed = true;
    }
    items.push_back(it);
  }
  {
    CheckItem it{"envelope_gradient_matches_finite_differences", false, 0.0, 1e-5, ""};
    double worst = 0.0;
    for (int k = 0; k < std::min(samples, 20); ++k) {
      Vec z = sample();
      Vec g = env_gradient(P, sp, z);
      Vec gfd = fd_gradient([&](const Vec& y) { return env_value(P, sp, y); }, z);
      worst = std::max(worst, norm(g - gfd) / (1.0 + norm(g)));
    }
    it.measure = worst;
    it.passed = worst <= it.threshold;
    items.push_back(it);
  }
  {
    CheckItem it{"jacobian_matches_finite_differences", false, 0.0, 1e-5, ""};
    if (P.f.has_hessian()) {
      double worst = 0.0;
      for (int k = 0; k < std::min(samples, 10); ++k) {
        Vec z = sample();
        Mat J = jacobian_T(P, sp, z);
        Mat Jfd = fd_jacobian([&](const Vec& y) { return dys_step(P, sp, y).z_next; }, z);
        worst = std::max(worst, norm_inf(J - Jfd) / (1.0 + norm_inf(J)));
      }
      it.measure = worst;
      it.passed = worst <= it.threshold;
    } else {
      it.note = "skipped: f has no Hessian";
      it.passed = true;
    }
    items.push_back(it);
  }
  {
    CheckItem it{"mode_reduction", false, 0.0, 1e-12, ""};
    double worst = 0.0;
    for (int k = 0; k < samples; ++k)
      worst = std::max(worst, reduction_check(P, sp, sample()).max_abs_diff);
    it.measure = worst;
    it.passed = worst <= it.threshold;
    items.push_back(it);
  }
  {
    CheckItem it{"prox_lipschitz_bound", false, 0.0, 0.0, ""};
    double beta = P.f.weak_convexity;
    double bound = beta > 0.0 ? 1.0 / (1.0 - sp.gamma * beta) : 1.0;
    it.threshold = bound * (1.0 + 1e-6) + 1e-8;
    it.measure = prox_lipschitz_probe(P.f, sp.gamma, std::min(samples, 30), radius, seed + 1);
    it.passed = it.measure <= it.threshold;
    items.push_back(it);
  }
  {
    CheckItem it{"fixed_point_gradient_agreement", false, 0.0, 1e-6, ""};
    double worst = 0.0;
    bool found = false;
    for (int k = 0; k < 3; ++k) {
      RunResult rr = run(P, sp, sample(), StopRule{1e-11, 20000});
      if (!rr.converged) continue;
      found = true;
      worst = std::max(worst, norm(env_gradient(P, sp, rr.z_final)));
    }
    it.measure = worst;
    it.passed = worst <= it.threshold;
    if (!found) it.note = "no run converged within the probe budget";
    items.push_back(it);
  }
  return items;
}

}  // namespace dys
