#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "dys/analysis.hpp"
#include "dys/core/rng.hpp"
#include "dys/core/vec.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"
#include "dys/splitting.hpp"

namespace dys {

enum class InitKind { UniformBox, Gaussian, Fixed };

enum class TrialLabel { ConvergedToMin, ConvergedToSaddle, NotConverged, Escaped };

inline const char* trial_label_name(TrialLabel l) {
  switch (l) {
    case TrialLabel::ConvergedToMin: return "converged_to_min";
    case TrialLabel::ConvergedToSaddle: return "converged_to_saddle";
    case TrialLabel::NotConverged: return "not_converged";
    case TrialLabel::Escaped: return "escaped";
  }
  return "?";
}

/// Monte-Carlo experiment description: initial distribution, declared
/// attractors in x-space with their capture radii, and stopping rules.
struct McConfig {
  int trials = 1000;
  std::uint64_t seed = 1;
  InitKind init = InitKind::UniformBox;
  double box_lo = -1.0;
  double box_hi = 1.0;
  Vec gaussian_mean;  // defaults to the origin when empty
  double gaussian_sigma = 1.0;
  Vec fixed_start;  // used by InitKind::Fixed; deliberately measure-zero
  std::vector<Vec> minimizers;
  std::vector<Vec> saddles;
  double delta_min = 1e-3;
  double delta_saddle = 1e-4;
  double tol = 1e-9;
  long max_iter = 10000;
  double escape_radius = 1e6;
};

struct TrialResult {
  TrialLabel label = TrialLabel::NotConverged;
  int attractor = -1;  // index into minimizers or saddles, by label
  Vec x_final;
  long iters = 0;
  double resid = 0.0;
};

struct McOutcome {
  int trials = 0;
  int to_min = 0;
  int to_saddle = 0;
  int not_converged = 0;
  int escaped = 0;
  std::uint64_t seed = 0;
  std::vector<TrialResult> per_trial;
};

namespace detail {

inline void validate_mc(const ProblemTriple& P, const SplitParams& sp, const McConfig& cfg) {
  validate_params(P, sp);
  if (cfg.trials < 1) throw BadConfig("trial count must be >= 1");
  if (cfg.delta_min <= 0.0 || cfg.delta_saddle <= 0.0)
    throw BadConfig("attractor radii must be positive");
  if (cfg.init == InitKind::UniformBox && !(cfg.box_lo < cfg.box_hi))
    throw BadConfig("init box is empty");
  if (cfg.init == InitKind::Gaussian && cfg.gaussian_sigma <= 0.0)
    throw BadConfig("gaussian sigma must be positive");
  if (cfg.init == InitKind::Fixed && cfg.fixed_start.size() != P.dim)
    throw BadConfig("fixed start must have the problem dimension");
  for (const Vec& m : cfg.minimizers)
    for (const Vec& s : cfg.saddles)
      if (norm(m - s) <= cfg.delta_min + cfg.delta_saddle)
        throw BadConfig("declared minimizer and saddle overlap at their radii");
  // stay inside the step range where the iteration map is a diffeomorphism
  if (P.h.is_zero || P.g.is_zero) {
    StepBounds b = step_bounds(P, sp);
    double limit = std::min(b.alpha1, b.alpha2);
    if (sp.alpha >= limit)
      throw BadConfig("alpha = " + std::to_string(sp.alpha) +
                      " is not below the diffeomorphism bound " + std::to_string(limit));
  }
}

inline Vec draw_start(const McConfig& cfg, int dim, std::uint64_t trial) {
  if (cfg.init == InitKind::Fixed) return cfg.fixed_start;
  TrialRng rng(cfg.seed, trial);
  if (cfg.init == InitKind::UniformBox) return rng.uniform_vec(dim, cfg.box_lo, cfg.box_hi);
  Vec x = rng.normal_vec(dim);
  Vec mean = cfg.gaussian_mean.size() == dim ? cfg.gaussian_mean : Vec::zeros(dim);
  return mean + cfg.gaussian_sigma * x;
}

inline TrialResult run_trial(const ProblemTriple& P, const SplitParams& sp, const McConfig& cfg,
                             std::uint64_t trial) {
  TrialResult tr;
  Vec z = draw_start(cfg, P.dim, trial);
  for (long k = 0;; ++k) {
    DysState s;
    try {
      s = compute_state(P, sp, z);
    } catch (const NonFiniteValue&) {
      tr.label = TrialLabel::Escaped;
      tr.x_final = z;
      tr.iters = k;
      return tr;
    }
    tr.iters = k;
    tr.resid = s.resid;
    if (s.resid <= cfg.tol * (1.0 + norm(z))) {
      tr.x_final = s.proxg;
      for (std::size_t i = 0; i < cfg.minimizers.size(); ++i)
        if (norm(tr.x_final - cfg.minimizers[i]) <= cfg.delta_min) {
          tr.label = TrialLabel::ConvergedToMin;
          tr.attractor = static_cast<int>(i);
          return tr;
        }
      for (std::size_t i = 0; i < cfg.saddles.size(); ++i)
        if (norm(tr.x_final - cfg.saddles[i]) <= cfg.delta_saddle) {
          tr.label = TrialLabel::ConvergedToSaddle;
          tr.attractor = static_cast<int>(i);
          return tr;
        }
      // converged, but outside every declared attractor
      tr.label = TrialLabel::Escaped;
      return tr;
    }
    if (norm(s.z_next) > cfg.escape_radius) {
      tr.label = TrialLabel::Escaped;
      tr.x_final = s.proxg;
      return tr;
    }
    if (k >= cfg.max_iter) {
      tr.label = TrialLabel::NotConverged;
      tr.x_final = s.proxg;
      return tr;
    }
    z = s.z_next;
  }
}

}  // namespace detail

/// Runs cfg.trials independent trajectories from seeded random starts and
/// labels each terminal point against the declared attractors. Trial i
/// depends only on (seed, i), so the outcome is identical for any worker
/// count, including 1.
inline McOutcome mc_run(const ProblemTriple& P, const SplitParams& sp, const McConfig& cfg,
                        int workers = 1) {
  detail::validate_mc(P, sp, cfg);
  if (workers < 1) workers = 1;
  McOutcome out;
  out.trials = cfg.trials;
  out.seed = cfg.seed;
  out.per_trial.resize(static_cast<std::size_t>(cfg.trials));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      out.per_trial[static_cast<std::size_t>(i)] =
          detail::run_trial(P, sp, cfg, static_cast<std::uint64_t>(i));
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const TrialResult& tr : out.per_trial) {
    switch (tr.label) {
      case TrialLabel::ConvergedToMin: ++out.to_min; break;
      case TrialLabel::ConvergedToSaddle: ++out.to_saddle; break;
      case TrialLabel::NotConverged: ++out.not_converged; break;
      case TrialLabel::Escaped: ++out.escaped; break;
    }
  }
  return out;
}

struct GridSpec {
  double lo = -2.0;
  double hi = 2.0;
  int points_per_dim = 7;
};

/// Multistart critical-point search: Newton on the fixed-point residual
/// w(z) = 0 from a grid of starts, which reaches saddles as well as
/// minimizers. Converged points are deduplicated within 1e-5 and classified.
/// Starts that fail to converge or classify are dropped.
inline std::vector<PointReport> discover_saddles(const ProblemTriple& P, const SplitParams& sp,
                                                 const GridSpec& grid = GridSpec{}) {
  const int n = P.dim;
  std::vector<PointReport> found;
  if (grid.points_per_dim < 1 || n > 4) return found;

  auto residual = [&](const Vec& z) { return compute_state(P, sp, z).w; };
  long total = 1;
  for (int i = 0; i < n; ++i) total *= grid.points_per_dim;

  for (long code = 0; code < total; ++code) {
    Vec z(n);
    long c = code;
    for (int i = 0; i < n; ++i) {
      long t = c % grid.points_per_dim;
      c /= grid.points_per_dim;
      double frac = grid.points_per_dim == 1
                        ? 0.5
                        : static_cast<double>(t) / (grid.points_per_dim - 1);
      z[i] = grid.lo + frac * (grid.hi - grid.lo);
    }
    bool ok = true;
    try {
      for (int it = 0; it < 60; ++it) {
        DysState s = compute_state(P, sp, z);
        if (s.resid <= 1e-12 * (1.0 + norm(z))) break;
        Mat Jw;
        if (P.f.has_hessian()) {
          Mat Jt = jacobian_T(P, sp, z);
          Jw = (1.0 / sp.alpha) * (Jt - Mat::identity(n));
        } else {
          Jw = fd_jacobian(residual, z);
        }
        Vec dz = solve_linear(Jw, -s.w);
        double step = 1.0;
        // keep Newton from leaping out of the region where constants hold
        double cap = 2.0 * (std::abs(grid.lo) + std::abs(grid.hi));
        if (norm(dz) > cap) step = cap / norm(dz);
        z = z + step * dz;
        if (!z.all_finite()) throw NonFiniteValue("search iterate diverged");
      }
      DysState s = compute_state(P, sp, z);
      if (s.resid > 1e-10 * (1.0 + norm(z))) ok = false;
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) continue;
    bool dup = false;
    for (const PointReport& r : found)
      if (norm(r.z - z) <= 1e-5) {
        dup = true;
        break;
      }
    if (dup) continue;
    try {
      found.push_back(classify(P, sp, z));
    } catch (const Error&) {
      // a point we cannot classify is not reported
    }
  }
  return found;
}

}  // namespace dys
