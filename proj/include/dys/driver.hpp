#pragma once

#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "dys/core/vec.hpp"
#include "dys/envelope.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"
#include "dys/splitting.hpp"

namespace dys {

struct StopRule {
  double tol = 1e-9;  // stop when ||w|| <= tol (1 + ||z||)
  long max_iter = 100000;
};

struct TrajectoryRecord {
  long iter = 0;
  Vec z;
  double resid = 0.0;
  double envelope = 0.0;
  double elapsed_sec = 0.0;
};

struct RunResult {
  std::vector<TrajectoryRecord> trajectory;
  bool converged = false;
  Vec z_final;
  Vec x_final;  // prox_{gamma g}(z_final), the point reported in x-space
  double resid_final = 0.0;
};

/// Iterates z <- z + alpha w until the fixed-point residual passes the stop
/// rule or max_iter is hit. Every visited iterate is recorded with its
/// residual and envelope value. Never throws on non-convergence; the result
/// carries a converged flag instead.
inline RunResult run(const ProblemTriple& P, const SplitParams& sp, const Vec& z0,
                     const StopRule& stop = StopRule{}) {
  RunResult out;
  auto t0 = std::chrono::steady_clock::now();
  Vec z = z0;
  for (long k = 0;; ++k) {
    DysState s = compute_state(P, sp, z);
    double env = sp.q_at_prox ? env_value_from_state(s, sp.gamma) : env_value(P, sp, z);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.trajectory.push_back({k, z, s.resid, env, elapsed});
    bool done = s.resid <= stop.tol * (1.0 + norm(z));
    if (done || k >= stop.max_iter) {
      out.converged = done;
      out.z_final = z;
      out.x_final = s.proxg;
      out.resid_final = s.resid;
      break;
    }
    z = s.z_next;
  }
  return out;
}

/// CSV export: header iter,z_0..z_{n-1},resid,envelope then one row per
/// record, full double precision.
inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRecord>& traj) {
  if (traj.empty()) {
    os << "iter,resid,envelope\n";
    return;
  }
  const int n = traj.front().z.size();
  os << "iter";
  for (int i = 0; i < n; ++i) os << ",z_" << i;
  os << ",resid,envelope\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  for (const TrajectoryRecord& r : traj) {
    os << r.iter;
    for (int i = 0; i < n; ++i) put(r.z[i]);
    put(r.resid);
    put(r.envelope);
    os << '\n';
  }
}

}  // namespace dys
