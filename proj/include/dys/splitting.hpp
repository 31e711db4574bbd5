#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dys/core/vec.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"
#include "dys/moreau.hpp"

namespace dys {

/// Special cases of the three-operator iteration, determined by which parts
/// vanish. GD = plain gradient descent on h(Lx); FBS = forward-backward
/// (prox of f after a gradient step); BFS = backward-forward (gradient step
/// after the prox of g); DRS = Douglas-Rachford (two proxes, no smooth term);
/// DYS = all three parts active.
enum class Mode { GD, FBS, DRS, BFS, DYS };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::GD: return "gd";
    case Mode::FBS: return "fbs";
    case Mode::DRS: return "drs";
    case Mode::BFS: return "bfs";
    case Mode::DYS: return "dys";
  }
  return "?";
}

inline Mode mode_of(const ProblemTriple& P) {
  if (P.f.is_zero && P.g.is_zero) return Mode::GD;
  if (P.g.is_zero) return Mode::FBS;
  if (P.f.is_zero) return Mode::BFS;
  if (P.h.is_zero) return Mode::DRS;
  return Mode::DYS;
}

struct SplitParams {
  double gamma = 0.0;
  double alpha = 1.0;
  /// Evaluate the forward term q = L' grad h(L .) at prox_{gamma g}(z) rather
  /// than at z itself. The two agree when g = 0; the prox-point form is the
  /// one the envelope identities assume.
  bool q_at_prox = true;
};

/// Largest admissible gamma from the smooth-part curvature:
/// gamma < 1 / (L_g + L_h ||L||^2). Returns +inf when both constants vanish.
inline double gamma_upper_bound(const ProblemTriple& P) {
  if (!P.g.lipschitz_hess_bound)
    throw BadConfig("problem '" + P.name + "': g has no declared gradient Lipschitz constant");
  double denom = *P.g.lipschitz_hess_bound + P.h.lipschitz_grad * P.L.op_norm * P.L.op_norm;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

/// Rejects parameter choices outside the admissible region: alpha must be
/// positive, gamma must be positive, below the smooth-curvature bound, below
/// 1/beta_f so prox of f is single-valued, and below 1/L_f (when declared) so
/// I + gamma hess f stays invertible at stationary points.
inline void validate_params(const ProblemTriple& P, const SplitParams& sp) {
  if (sp.alpha <= 0.0)
    throw AlphaNonPositive("alpha must be positive, got " + std::to_string(sp.alpha));
  if (sp.gamma <= 0.0)
    throw GammaOutOfRange("gamma must be positive, got " + std::to_string(sp.gamma));
  double bound = gamma_upper_bound(P);
  if (sp.gamma >= bound)
    throw GammaOutOfRange("gamma = " + std::to_string(sp.gamma) +
                          " not below curvature bound " + std::to_string(bound));
  if (P.f.weak_convexity > 0.0 && sp.gamma >= 1.0 / P.f.weak_convexity)
    throw GammaOutOfRange("gamma = " + std::to_string(sp.gamma) + " not below 1/beta_f = " +
                          std::to_string(1.0 / P.f.weak_convexity));
  if (P.f.lipschitz_hess_bound && *P.f.lipschitz_hess_bound > 0.0 &&
      sp.gamma >= 1.0 / *P.f.lipschitz_hess_bound)
    throw GammaOutOfRange("gamma = " + std::to_string(sp.gamma) + " not below 1/L_f = " +
                          std::to_string(1.0 / *P.f.lipschitz_hess_bound));
  if (P.g.weak_convexity > 0.0 && sp.gamma >= 1.0 / P.g.weak_convexity)
    throw GammaOutOfRange("gamma = " + std::to_string(sp.gamma) + " not below 1/beta_g = " +
                          std::to_string(1.0 / P.g.weak_convexity));
}

/// All intermediates of one iteration at z:
///   proxg = prox_{gamma g}(z),      r = 2 proxg - z,
///   q     = L' grad h(L proxg)      (or at L z with q_at_prox = false),
///   p     = prox_{gamma f}(r - gamma q),
///   w     = p - proxg,              z_next = z + alpha w.
/// Envelope ingredients computed along the way are cached so the envelope
/// value costs nothing extra per iteration.
struct DysState {
  Vec z;
  Vec proxg;
  Vec q;
  Vec r;
  Vec p;
  Vec w;
  Vec z_next;
  double resid = 0.0;        // ||w||, the fixed-point residual
  double g_env = 0.0;        // g^gamma(z)
  Vec g_env_grad;            // grad g^gamma(z) = (z - proxg)/gamma
  double f_env = 0.0;        // f^gamma(r - gamma q)
  double h_at_Lproxg = 0.0;  // h(L proxg)
};

inline DysState compute_state(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  if (z.size() != P.dim)
    throw DimensionMismatch("compute_state: z has size " + std::to_string(z.size()) +
                            ", problem dimension is " + std::to_string(P.dim));
  DysState s;
  s.z = z;
  ProxResult pg = prox(P.g, sp.gamma, z);
  s.proxg = pg.point;
  s.g_env = pg.envelope_value;
  s.g_env_grad = pg.envelope_gradient;

  const Vec& q_base = sp.q_at_prox ? s.proxg : z;
  s.q = P.L.apply_transpose(P.h.gradient(P.L.apply(q_base)));
  s.h_at_Lproxg = P.h.value(P.L.apply(s.proxg));

  s.r = 2.0 * s.proxg - z;
  ProxResult pf = prox(P.f, sp.gamma, s.r - sp.gamma * s.q);
  s.p = pf.point;
  s.f_env = pf.envelope_value;

  s.w = s.p - s.proxg;
  s.resid = norm(s.w);
  s.z_next = z + sp.alpha * s.w;
  if (!s.z_next.all_finite()) throw NonFiniteValue("iteration produced non-finite iterate");
  return s;
}

/// One iteration: z + alpha (prox_{gamma f}(2 prox_{gamma g}(z) - z - gamma q)
/// - prox_{gamma g}(z)), returned with all intermediates.
inline DysState dys_step(const ProblemTriple& P, const SplitParams& sp, const Vec& z) {
  return compute_state(P, sp, z);
}

struct ReductionCheck {
  Mode mode = Mode::DYS;
  Vec general_step;
  Vec specialized_step;
  double max_abs_diff = 0.0;
};

/// Computes one step twice: through the general three-operator formula and
/// through an independently coded specialization for the detected mode. The
/// two must agree to machine precision; a disagreement means the general
/// formula does not reduce correctly.
inline ReductionCheck reduction_check(const ProblemTriple& P, const SplitParams& sp,
                                      const Vec& z) {
  ReductionCheck rc;
  rc.mode = mode_of(P);
  rc.general_step = dys_step(P, sp, z).z_next;

  const double gamma = sp.gamma;
  const double alpha = sp.alpha;
  auto grad_hL = [&](const Vec& x) { return P.L.apply_transpose(P.h.gradient(P.L.apply(x))); };

  switch (rc.mode) {
    case Mode::GD: {
      // z - alpha gamma L' grad h(Lz); prox of the zero g is the identity,
      // so both q conventions coincide.
      rc.specialized_step = z - (alpha * gamma) * grad_hL(z);
      break;
    }
    case Mode::FBS: {
      // forward gradient step on h(L.), backward prox step on f
      Vec inner = z - gamma * grad_hL(z);
      Vec pf = prox(P.f, gamma, inner).point;
      rc.specialized_step = z + alpha * (pf - z);
      break;
    }
    case Mode::DRS: {
      // two proxes, no forward term
      Vec pg = prox(P.g, gamma, z).point;
      Vec pf = prox(P.f, gamma, 2.0 * pg - z).point;
      rc.specialized_step = z + alpha * (pf - pg);
      break;
    }
    case Mode::BFS: {
      // backward prox step on g, then a forward gradient step
      Vec pg = prox(P.g, gamma, z).point;
      Vec q = sp.q_at_prox ? grad_hL(pg) : grad_hL(z);
      rc.specialized_step = z + alpha * (pg - z - gamma * q);
      break;
    }
    case Mode::DYS: {
      // plain transcription of the full iteration
      Vec pg = prox(P.g, gamma, z).point;
      Vec q = sp.q_at_prox ? grad_hL(pg) : grad_hL(z);
      Vec pf = prox(P.f, gamma, 2.0 * pg - z - gamma * q).point;
      rc.specialized_step = z + alpha * (pf - pg);
      break;
    }
  }
  rc.max_abs_diff = norm_inf(rc.general_step - rc.specialized_step);
  return rc;
}

}  // namespace dys
