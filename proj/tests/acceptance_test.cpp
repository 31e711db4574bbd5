// Acceptance harness: one pass/fail line per shipped guarantee, exit 0 only
// if every criterion holds. Runs standalone (no test framework) so the
// output reads as a checklist.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dys/analysis.hpp"
#include "dys/driver.hpp"
#include "dys/envelope.hpp"
#include "dys/errors.hpp"
#include "dys/model/registry.hpp"
#include "dys/moreau.hpp"
#include "dys/saddle_lab.hpp"
#include "dys/splitting.hpp"
#include "oracles.hpp"

using namespace dys;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& evidence) {
  std::printf("%s criterion-%d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              evidence.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> dv(std::initializer_list<double> xs) { return std::vector<double>(xs); }

struct Instance {
  std::string label;
  ProblemTriple P;
  SplitParams sp;
};

// A spread of validated instances covering every detected mode, reused by
// several criteria below.
std::vector<Instance> representative_instances() {
  std::vector<Instance> out;
  auto add = [&](const std::string& label, const char* name, ParamMap params, double gamma,
                 double alpha) {
    Instance inst{label, registry_make(name, std::move(params)), SplitParams{gamma, alpha}};
    validate_params(inst.P, inst.sp);
    out.push_back(std::move(inst));
  };
  add("quadratic-two-prox", "quadratic",
      {{"qf", dv({1.0, 0.5})}, {"bf", dv({0.3, -0.2})}, {"qg", dv({0.5, 1.0})}}, 0.4, 1.0);
  add("quadratic-three-part", "quadratic",
      {{"n", 5.0},
       {"qf", dv({1.0, 0.5, 0.25, 0.75, 0.6})},
       {"bf", dv({0.1, -0.2, 0.3, 0.0, 0.05})},
       {"qg", dv({0.5, 1.0, 0.3, 0.8, 0.2})},
       {"qh", dv({0.4, 0.6, 0.2, 0.9, 0.1})}},
      0.25, 0.9);
  add("matfac", "matfac_toy", {}, 0.2, 1.0);
  add("quartic", "quartic_well", {{"n", 2.0}}, 0.4, 0.9);
  add("saddle-forward-backward", "saddle_quadratic", {{"split", std::string("fbs")}}, 0.5, 1.0);
  add("logistic-with-l1", "logistic_smooth", {{"l1", 0.4}}, 0.5, 0.9);
  return out;
}

void criterion_1_equivalence() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<Instance> instances = representative_instances();
  double worst_ratio = 0.0;
  bool pass = true;
  for (const Instance& inst : instances) {
    TrialRng rng(101);
    double R = std::min(inst.P.probe_radius, 2.0);
    for (int k = 0; k < 100; ++k) {
      Vec z = rng.uniform_vec(inst.P.dim, -R, R);
      double dev = equivalence_check(inst.P, inst.sp, z);
      double ratio = dev / (1e-9 * (1.0 + norm(z)));
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > 1.0) pass = false;
    }
  }
  double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) pass = false;
  report(1, "iteration-equals-metric-gradient-step", pass,
         "max deviation at " + fmt(worst_ratio) + "x the 1e-9*(1+|z|) budget over " +
             std::to_string(instances.size()) + " instances x 100 points in " + fmt(elapsed) +
             " s");
}

void criterion_2_sandwich() {
  std::vector<Instance> instances = representative_instances();
  double worst = 0.0;
  for (const Instance& inst : instances) {
    TrialRng rng(202);
    double R = std::min(inst.P.probe_radius, 2.0);
    for (int k = 0; k < 1000; ++k) {
      Vec z = rng.uniform_vec(inst.P.dim, -R, R);
      SandwichReport r = sandwich_check(inst.P, inst.sp, z);
      worst = std::max({worst, r.lower_violation, r.upper_violation, r.prox_violation});
    }
  }
  report(2, "envelope-bracketed-by-objective", worst <= 1e-8,
         "max violation " + fmt(worst) + " (allowed 1e-8) over " +
             std::to_string(instances.size()) + " instances x 1000 points");
}

void criterion_3_moreau_layer() {
  struct Fn {
    std::string label;
    ProxableFn xi;
    double gamma;
    double radius;
  };
  std::vector<Fn> fns;
  fns.push_back({"quartic", registry_make("quartic_well", {}).f, 0.4, 2.0});
  fns.push_back({"factorization", registry_make("matfac_toy", {}).f, 0.2, 2.0});
  fns.push_back({"l1", registry_make("logistic_smooth", {{"l1", 0.4}}).f, 0.5, 2.0});
  {
    RegistryEntry e = registry_build(
        "quadratic", {{"qf", dv({2.0, 0.5})}, {"bf", dv({0.3, 0.0})}});
    fns.push_back({"quadratic", e.triple.f, 0.3, 2.0});
  }

  double worst_fd = 0.0;
  double worst_lip_excess = -1.0;
  bool pass = true;
  for (const Fn& c : fns) {
    TrialRng rng(303);
    for (int k = 0; k < 25; ++k) {
      Vec z = rng.uniform_vec(c.xi.dim, -c.radius, c.radius);
      ProxResult pr = prox(c.xi, c.gamma, z);
      Vec fd = fd_gradient(
          [&](const Vec& y) { return prox(c.xi, c.gamma, y).envelope_value; }, z);
      double err = norm_inf(pr.envelope_gradient - fd) / (1.0 + norm_inf(fd));
      worst_fd = std::max(worst_fd, err);
      if (err > 1e-5) pass = false;
    }
    double bound = 1.0 / (1.0 - c.gamma * c.xi.weak_convexity);
    double probe = prox_lipschitz_probe(c.xi, c.gamma, 300, c.radius, 404);
    worst_lip_excess = std::max(worst_lip_excess, probe - bound);
    if (probe > bound + 1e-6) pass = false;
  }

  // closed-form proximal maps against an independent grid search
  double worst_prox = 0.0;
  for (const Fn& c : fns) {
    if (!c.xi.closed_form_prox) continue;
    TrialRng rng(505);
    for (int k = 0; k < 20; ++k) {
      Vec z = rng.uniform_vec(c.xi.dim, -1.5, 1.5);
      Vec fast = prox(c.xi, c.gamma, z).point;
      Vec slow = oracle::brute_force_prox(c.xi, c.gamma, z);
      worst_prox = std::max(worst_prox, norm_inf(fast - slow));
      if (norm_inf(fast - slow) > 1e-5) pass = false;
    }
  }
  report(3, "moreau-envelope-layer", pass,
         "fd gradient err " + fmt(worst_fd) + " (<=1e-5), lipschitz excess " +
             fmt(worst_lip_excess) + " (<=1e-6), closed-form vs grid-search prox err " +
             fmt(worst_prox) + " (<=1e-5)");
}

void criterion_4_reductions() {
  struct Case {
    const char* label;
    ParamMap params;
    double gamma;
  };
  std::vector<Case> cases = {
      {"gd", {{"qh", dv({1.0, 0.5})}}, 0.3},
      {"fbs", {{"qf", dv({1.0, 0.5})}, {"qh", dv({0.5, 0.5})}}, 0.2},
      {"bfs", {{"qg", dv({1.0, 0.5})}, {"qh", dv({0.5, 0.5})}}, 0.2},
      {"drs", {{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}}, 0.4},
      {"dys", {{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}, {"qh", dv({0.5, 0.5})}}, 0.25},
  };
  double worst = 0.0;
  int modes_seen = 0;
  for (const Case& c : cases) {
    ProblemTriple P = registry_make("quadratic", ParamMap(c.params));
    SplitParams sp{c.gamma, 0.9};
    validate_params(P, sp);
    ++modes_seen;
    TrialRng rng(606);
    for (int k = 0; k < 50; ++k) {
      Vec z = rng.uniform_vec(P.dim, -2.0, 2.0);
      worst = std::max(worst, reduction_check(P, sp, z).max_abs_diff);
    }
  }
  report(4, "mode-specializations-match-general-step", worst <= 1e-12,
         "max deviation " + fmt(worst) + " (allowed 1e-12) across " +
             std::to_string(modes_seen) + " modes x 50 points");
}

void criterion_5_correspondence() {
  struct Case {
    const char* label;
    ParamMap params;
    double gamma;
  };
  std::vector<Case> cases = {
      {"two-prox", {{"qf", dv({1.0, 0.5})}, {"bf", dv({0.3, -0.2})}, {"qg", dv({0.5, 1.0})}},
       0.4},
      {"forward-backward", {{"qf", dv({1.0, 0.5})}, {"bf", dv({0.5, 0.1})}, {"qh", dv({0.5, 0.5})}},
       0.2},
      {"gradient", {{"qh", dv({1.0, 0.5})}, {"bh", dv({0.4, -0.3})}}, 0.3},
      {"three-part",
       {{"qf", dv({1.0, 0.5})}, {"bf", dv({0.1, -0.2})}, {"qg", dv({0.5, 1.0})},
        {"qh", dv({0.5, 0.5})}},
       0.25},
  };
  bool pass = true;
  double worst_argmin = 0.0;
  for (const Case& c : cases) {
    RegistryEntry e = registry_build("quadratic", ParamMap(c.params));
    SplitParams sp{c.gamma, 0.9};
    validate_params(e.triple, sp);
    RunResult r = run(e.triple, sp, TrialRng(707).uniform_vec(e.triple.dim, -1.0, 1.0),
                      {1e-12, 50000});
    if (!r.converged) {
      pass = false;
      continue;
    }
    double argmin_err = norm(r.x_final - e.landscape.minimizers[0]);
    worst_argmin = std::max(worst_argmin, argmin_err);
    if (argmin_err > 1e-6) pass = false;
    if (!minimizer_correspondence_check(e.triple, sp, r.z_final).passed) pass = false;
    // fixed point <=> vanishing envelope gradient, both ways
    if (norm(env_gradient(e.triple, sp, r.z_final)) > 1e-6) pass = false;
    TrialRng rng(708);
    for (int k = 0; k < 20; ++k) {
      Vec z = rng.uniform_vec(e.triple.dim, -2.0, 2.0);
      double resid = compute_state(e.triple, sp, z).resid;
      double grad = norm(env_gradient(e.triple, sp, z));
      if (resid > 1e-6 * (1.0 + norm(z)) && grad <= 1e-12) pass = false;
      if (resid <= 1e-12 * (1.0 + norm(z)) && grad > 1e-6) pass = false;
    }
  }
  report(5, "limit-point-is-the-argmin", pass,
         "max |x_final - argmin| " + fmt(worst_argmin) + " (allowed 1e-6) on " +
             std::to_string(cases.size()) +
             " convex instances; residual and envelope gradient vanish together");
}

struct CriticalPoint {
  std::string label;
  ProblemTriple P;
  SplitParams sp;
  Vec zstar;
};

// Every registry fixed point with usable second-order data, mapped to
// z-space (z* = x* + gamma grad g(x*) whenever g is present and smooth).
std::vector<CriticalPoint> registry_critical_points() {
  std::vector<CriticalPoint> pts;
  auto add_entry = [&](const std::string& label, const char* name, ParamMap params,
                       double gamma) {
    RegistryEntry e = registry_build(name, std::move(params));
    SplitParams sp{gamma, 1.0};
    validate_params(e.triple, sp);
    auto to_z = [&](const Vec& x) {
      return e.triple.g.is_zero ? x : x + gamma * e.triple.g.gradient(x);
    };
    int idx = 0;
    for (const Vec& x : e.landscape.minimizers)
      pts.push_back({label + "/min" + std::to_string(idx++), e.triple, sp, to_z(x)});
    idx = 0;
    for (const Vec& x : e.landscape.saddles)
      pts.push_back({label + "/saddle" + std::to_string(idx++), e.triple, sp, to_z(x)});
  };
  add_entry("quadratic-two-prox", "quadratic",
            {{"qf", dv({1.0, 0.5})}, {"bf", dv({0.3, -0.2})}, {"qg", dv({0.5, 1.0})}}, 0.4);
  add_entry("saddle-plain", "saddle_quadratic", {}, 0.5);
  add_entry("saddle-two-prox", "saddle_quadratic", {{"split", std::string("drs")}}, 0.5);
  add_entry("saddle-forward-backward", "saddle_quadratic", {{"split", std::string("fbs")}}, 0.5);
  add_entry("quartic-plain", "quartic_well", {{"n", 2.0}}, 0.4);
  add_entry("quartic-two-prox", "quartic_well", {{"n", 2.0}, {"split", std::string("drs")}}, 0.4);
  add_entry("matfac", "matfac_toy", {}, 0.2);
  return pts;
}

int sign_with_band(double v) {
  if (v > 1e-7) return 1;
  if (v < -1e-7) return -1;
  return 0;
}

void criterion_6_saddle_classification() {
  std::vector<CriticalPoint> pts = registry_critical_points();
  bool pass = true;
  int checked = 0;
  int disagreements = 0;
  for (const CriticalPoint& cp : pts) {
    PointReport rep = classify(cp.P, cp.sp, cp.zstar);
    if (!rep.has_env_eig || !rep.has_phi_eig) {
      pass = false;
      continue;
    }
    ++checked;
    int se = sign_with_band(rep.lambda_min_env);
    int sp_ = sign_with_band(rep.lambda_min_phi);
    if (se != 0 && sp_ != 0 && se != sp_) {
      ++disagreements;
      pass = false;
    }
  }
  if (checked < 15) pass = false;
  report(6, "envelope-and-objective-curvature-signs-agree", pass,
         std::to_string(disagreements) + " sign disagreements at " + std::to_string(checked) +
             " registry critical points (band 1e-7)");
}

void criterion_7_step_bounds() {
  std::vector<CriticalPoint> pts = registry_critical_points();
  bool pass = true;
  int probed = 0;
  double min_probe = std::numeric_limits<double>::infinity();
  for (const CriticalPoint& cp : pts) {
    StepBounds b = step_bounds(cp.P, cp.sp);
    double bound = std::min(b.alpha1, b.alpha2);
    if (!std::isfinite(bound)) continue;
    SplitParams sp = cp.sp;
    sp.alpha = 0.9 * bound;
    double probe = diffeo_probe(cp.P, sp, cp.zstar);
    min_probe = std::min(min_probe, probe);
    ++probed;
    if (probe <= 0.0) pass = false;
  }
  if (probed < 15) pass = false;

  // analytic step Jacobian against finite differences
  double worst_jac = 0.0;
  for (const Instance& inst : representative_instances()) {
    if (!inst.P.f.has_hessian()) continue;
    TrialRng rng(909);
    for (int k = 0; k < 10; ++k) {
      Vec z = rng.uniform_vec(inst.P.dim, -1.5, 1.5);
      Mat J = jacobian_T(inst.P, inst.sp, z);
      Mat Jfd = fd_jacobian([&](const Vec& y) { return dys_step(inst.P, inst.sp, y).z_next; }, z);
      double err = norm_inf(J - Jfd) / (1.0 + norm_inf(J));
      worst_jac = std::max(worst_jac, err);
      if (err > 1e-5) pass = false;
    }
  }
  report(7, "step-jacobian-invertible-below-bound", pass,
         "min eigenvalue probe " + fmt(min_probe) + " > 0 at " + std::to_string(probed) +
             " fixed points with alpha = 0.9*bound; jacobian vs fd err " + fmt(worst_jac) +
             " (<=1e-5)");
}

void criterion_8_saddle_avoidance() {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::ostringstream ev;

  auto run_mc = [&](const char* label, const char* name, ParamMap params, double gamma,
                    McConfig cfg) {
    RegistryEntry e = registry_build(name, std::move(params));
    SplitParams sp{gamma, 1.0};
    StepBounds b = step_bounds(e.triple, sp);
    sp.alpha = 0.9 * std::min(b.alpha1, b.alpha2);
    if (cfg.minimizers.empty()) cfg.minimizers = e.landscape.minimizers;
    if (cfg.saddles.empty()) cfg.saddles = e.landscape.saddles;
    McOutcome out = mc_run(e.triple, sp, cfg, 4);
    if (out.to_min + out.to_saddle + out.not_converged + out.escaped != out.trials) pass = false;
    ev << label << " to_saddle=" << out.to_saddle << "/" << out.trials << "; ";
    return out;
  };

  McConfig base;
  base.trials = 1000;
  base.seed = 2024;
  base.max_iter = 20000;

  McOutcome a = run_mc("saddle-fbs", "saddle_quadratic", {{"split", std::string("fbs")}}, 0.5,
                       base);
  if (a.to_saddle != 0) pass = false;
  McOutcome b = run_mc("saddle-drs", "saddle_quadratic", {{"split", std::string("drs")}}, 0.5,
                       base);
  if (b.to_saddle != 0) pass = false;
  McConfig mbase = base;
  mbase.box_lo = -2.0;
  mbase.box_hi = 2.0;
  McOutcome c = run_mc("matfac", "matfac_toy", {}, 0.2, mbase);
  if (c.to_saddle != 0) pass = false;

  // deliberate measure-zero start: exactly on the saddle
  McConfig control = base;
  control.trials = 1;
  control.init = InitKind::Fixed;
  control.fixed_start = Vec::zeros(2);
  McOutcome d = run_mc("control-start-on-saddle", "saddle_quadratic",
                       {{"split", std::string("fbs")}}, 0.5, control);
  if (d.to_saddle != 1) pass = false;

  double elapsed = seconds_since(t0);
  if (elapsed >= 300.0) pass = false;
  ev << fmt(elapsed) << " s";
  report(8, "random-starts-avoid-strict-saddles", pass, ev.str());
}

void criterion_9_determinism() {
  RegistryEntry e = registry_build("saddle_quadratic", {{"split", std::string("fbs")}});
  SplitParams sp{0.5, 1.95};
  McConfig cfg;
  cfg.trials = 500;
  cfg.seed = 99;
  cfg.saddles = e.landscape.saddles;

  auto summarize = [](const McOutcome& o) {
    std::ostringstream ss;
    ss << "{\"trials\":" << o.trials << ",\"to_min\":" << o.to_min
       << ",\"to_saddle\":" << o.to_saddle << ",\"not_converged\":" << o.not_converged
       << ",\"escaped\":" << o.escaped << ",\"seed\":" << o.seed << "}";
    return ss.str();
  };

  McOutcome w1 = mc_run(e.triple, sp, cfg, 1);
  McOutcome w4 = mc_run(e.triple, sp, cfg, 4);
  bool pass = summarize(w1) == summarize(w4);
  for (std::size_t i = 0; i < w1.per_trial.size() && pass; ++i) {
    if (w1.per_trial[i].label != w4.per_trial[i].label) pass = false;
    if (w1.per_trial[i].iters != w4.per_trial[i].iters) pass = false;
    if (norm(w1.per_trial[i].x_final - w4.per_trial[i].x_final) != 0.0) pass = false;
  }
  report(9, "experiment-summary-independent-of-worker-count", pass,
         "workers 1 vs 4 on 500 trials: summaries " +
             std::string(pass ? "identical" : "DIFFER") + " " + summarize(w1));
}

}  // namespace

int main() {
  try {
    criterion_1_equivalence();
    criterion_2_sandwich();
    criterion_3_moreau_layer();
    criterion_4_reductions();
    criterion_5_correspondence();
    criterion_6_saddle_classification();
    criterion_7_step_bounds();
    criterion_8_saddle_avoidance();
    criterion_9_determinism();
  } catch (const Error& e) {
    std::printf("FAIL unexpected-error: %s\n", e.what());
    return 1;
  }
  if (g_failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
