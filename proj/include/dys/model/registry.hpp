#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dys/core/linalg.hpp"
#include "dys/core/rng.hpp"
#include "dys/errors.hpp"
#include "dys/model/functions.hpp"

namespace dys {

using ParamValue = std::variant<double, std::vector<double>, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

/// Known stationary structure of a registry problem, in x-space. Lists may be
/// empty when the problem has no isolated points of that kind (or none are
/// known in closed form).
struct Landscape {
  std::vector<Vec> minimizers;
  std::vector<Vec> saddles;
};

struct RegistryEntry {
  ProblemTriple triple;
  Landscape landscape;
};

namespace detail {

/// Typed parameter access that records which keys were consumed so leftovers
/// can be rejected.
class ParamReader {
 public:
  explicit ParamReader(const ParamMap& params, std::string problem)
      : params_(params), problem_(std::move(problem)) {}

  double get_double(const std::string& key, double fallback) {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    used_.insert(key);
    const double* v = std::get_if<double>(&it->second);
    if (!v) throw BadParams(problem_ + ": parameter '" + key + "' must be a number");
    return *v;
  }

  int get_int(const std::string& key, int fallback) {
    double v = get_double(key, static_cast<double>(fallback));
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
      throw BadParams(problem_ + ": parameter '" + key + "' must be an integer");
    return static_cast<int>(r);
  }

  std::optional<std::vector<double>> get_vec(const std::string& key) {
    auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    used_.insert(key);
    const std::vector<double>* v = std::get_if<std::vector<double>>(&it->second);
    if (!v) throw BadParams(problem_ + ": parameter '" + key + "' must be a list of numbers");
    return *v;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    used_.insert(key);
    const std::string* v = std::get_if<std::string>(&it->second);
    if (!v) throw BadParams(problem_ + ": parameter '" + key + "' must be a string");
    return *v;
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      (void)value;
      if (!used_.count(key))
        throw BadParams(problem_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  const ParamMap& params_;
  std::string problem_;
  std::set<std::string> used_;
};

/// f(x) = 1/2 x^T diag(q) x + b^T x as a SmoothFn. Used for the quadratic
/// family; the caller supplies the Hessian norm bound.
inline SmoothFn diag_quadratic_smooth(std::vector<double> q, std::vector<double> b) {
  const int n = static_cast<int>(q.size());
  SmoothFn fn;
  fn.dim = n;
  fn.is_zero = false;
  double lmax = 0.0;
  for (double qi : q) lmax = std::max(lmax, std::abs(qi));
  fn.lipschitz_grad = lmax;
  fn.value = [q, b](const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += 0.5 * q[i] * x[i] * x[i] + b[i] * x[i];
    return s;
  };
  fn.gradient = [q, b](const Vec& x) {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) g[i] = q[i] * x[i] + b[i];
    return g;
  };
  fn.hessian = [q, n](const Vec&) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = q[i];
    return Mat::diag(d);
  };
  return fn;
}

/// Same quadratic as a ProxableFn with the closed-form prox
/// u_i = (z_i - gamma b_i) / (1 + gamma q_i). Valid while gamma < 1/beta,
/// which keeps every denominator positive.
inline ProxableFn diag_quadratic_proxable(std::vector<double> q, std::vector<double> b) {
  SmoothFn s = diag_quadratic_smooth(q, b);
  ProxableFn fn = as_proxable(s);
  double beta = 0.0;
  for (double qi : q) beta = std::max(beta, -qi);
  fn.weak_convexity = beta;
  fn.lipschitz_hess_bound = s.lipschitz_grad;
  fn.closed_form_prox = [q, b](double gamma, const Vec& z) {
    Vec u(z.size());
    for (int i = 0; i < z.size(); ++i) u[i] = (z[i] - gamma * b[i]) / (1.0 + gamma * q[i]);
    return u;
  };
  return fn;
}

inline void require_nonnegative(const std::vector<double>& q, const std::string& where) {
  for (double qi : q)
    if (qi < 0.0)
      throw BadParams(where + " declares a convex part but has a negative curvature entry " +
                      std::to_string(qi));
}

inline std::vector<double> fixed_size(std::optional<std::vector<double>> v, int n, double fill,
                                      const std::string& problem, const std::string& key) {
  if (!v) return std::vector<double>(static_cast<std::size_t>(n), fill);
  if (static_cast<int>(v->size()) != n)
    throw BadParams(problem + ": parameter '" + key + "' must have length " + std::to_string(n));
  return *v;
}

// ---------------------------------------------------------------------------
// zero: every part identically zero. Iteration is the identity map; useful as
// a smoke test and as the trivial GD-mode instance.
inline RegistryEntry make_zero(ParamReader& p) {
  int n = p.get_int("n", 2);
  p.finish();
  if (n < 1) throw BadParams("zero: n must be >= 1");
  RegistryEntry e;
  e.triple.name = "zero";
  e.triple.dim = n;
  e.triple.range = n;
  e.triple.f = ProxableFn::zero(n);
  e.triple.g = ProxableFn::zero(n);
  e.triple.h = SmoothFn::zero(n);
  e.triple.L = LinearMap::identity(n);
  e.triple.check_dims();
  return e;
}

// ---------------------------------------------------------------------------
// quadratic: convex diagonal quadratics for each part,
//   f = 1/2 x'diag(qf)x + bf'x, g likewise, h(y) = 1/2 y'diag(qh)y + bh'y,
// composed with L = diag(Ldiag). Parts default to zero when their q,b are
// absent. All curvature entries must be >= 0.
inline RegistryEntry make_quadratic(ParamReader& p) {
  int n = p.get_int("n", 2);
  if (n < 1) throw BadParams("quadratic: n must be >= 1");
  auto qf = p.get_vec("qf");
  auto bf = p.get_vec("bf");
  auto qg = p.get_vec("qg");
  auto bg = p.get_vec("bg");
  auto qh = p.get_vec("qh");
  auto bh = p.get_vec("bh");
  auto ld = p.get_vec("Ldiag");
  p.finish();

  RegistryEntry e;
  e.triple.name = "quadratic";
  e.triple.dim = n;
  e.triple.range = n;

  auto part = [&](std::optional<std::vector<double>> q, std::optional<std::vector<double>> b,
                  const std::string& tag) -> std::optional<std::pair<std::vector<double>, std::vector<double>>> {
    if (!q && !b) return std::nullopt;
    std::vector<double> qv = fixed_size(q, n, 0.0, "quadratic", "q" + tag);
    std::vector<double> bv = fixed_size(b, n, 0.0, "quadratic", "b" + tag);
    require_nonnegative(qv, "quadratic part " + tag);
    return std::make_pair(qv, bv);
  };

  auto pf = part(qf, bf, "f");
  auto pg = part(qg, bg, "g");
  auto ph = part(qh, bh, "h");

  e.triple.f = pf ? diag_quadratic_proxable(pf->first, pf->second) : ProxableFn::zero(n);
  e.triple.g = pg ? diag_quadratic_proxable(pg->first, pg->second) : ProxableFn::zero(n);
  e.triple.h = ph ? diag_quadratic_smooth(ph->first, ph->second) : SmoothFn::zero(n);
  if (ld) {
    std::vector<double> lv = fixed_size(ld, n, 1.0, "quadratic", "Ldiag");
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = lv[i];
    e.triple.L = LinearMap::from_matrix(Mat::diag(d));
  } else {
    e.triple.L = LinearMap::identity(n);
  }
  e.triple.check_dims();

  // Total objective is quadratic; the unique minimizer solves the normal
  // equations when the combined curvature is nonsingular.
  Mat A = Mat::zeros(n, n);
  Vec rhs(n);
  auto add = [&](const std::vector<double>& q, const std::vector<double>& b, const Mat& Lm) {
    Mat Q = Mat::zeros(n, n);
    for (int i = 0; i < n; ++i) Q(i, i) = q[i];
    Mat LtQL = matmul(transpose(Lm), matmul(Q, Lm));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) += LtQL(i, j);
    Vec bv(n);
    for (int i = 0; i < n; ++i) bv[i] = b[i];
    Vec Ltb = matvec(transpose(Lm), bv);
    for (int i = 0; i < n; ++i) rhs[i] -= Ltb[i];
  };
  Mat I = Mat::identity(n);
  if (pf) add(pf->first, pf->second, I);
  if (pg) add(pg->first, pg->second, I);
  if (ph) add(ph->first, ph->second, e.triple.L.matrix);
  try {
    e.landscape.minimizers.push_back(LuFactor(A).solve(rhs));
  } catch (const SingularMatrix&) {
    // flat directions: no isolated minimizer to report
  }
  return e;
}

// ---------------------------------------------------------------------------
// saddle_quadratic: phi(x) = 1/2 x'diag(d)x with at least one negative entry,
// so the origin is a strict saddle. The 'split' parameter distributes the
// curvature across parts without changing phi:
//   plain: f = quad(d), g = h = 0
//   drs:   f = quad(d - mu), g = mu/2 |x|^2
//   fbs:   f = quad(d - mu), h = mu/2 |y|^2, L = I
inline RegistryEntry make_saddle_quadratic(ParamReader& p) {
  auto dv = p.get_vec("d");
  std::string split = p.get_string("split", "plain");
  double mu = p.get_double("mu", 0.25);
  p.finish();

  std::vector<double> d = dv ? *dv : std::vector<double>{1.0, -1.0};
  const int n = static_cast<int>(d.size());
  if (n < 1) throw BadParams("saddle_quadratic: d must be nonempty");
  double dmin = *std::min_element(d.begin(), d.end());
  if (dmin >= 0.0)
    throw BadParams("saddle_quadratic: d must contain a negative entry for a strict saddle");
  if (split != "plain" && mu <= 0.0)
    throw BadParams("saddle_quadratic: mu must be positive for split '" + split + "'");

  RegistryEntry e;
  e.triple.name = "saddle_quadratic";
  e.triple.dim = n;
  e.triple.range = n;
  std::vector<double> zeros_b(static_cast<std::size_t>(n), 0.0);

  if (split == "plain") {
    e.triple.f = diag_quadratic_proxable(d, zeros_b);
    e.triple.g = ProxableFn::zero(n);
    e.triple.h = SmoothFn::zero(n);
    e.triple.L = LinearMap::identity(n);
  } else if (split == "drs" || split == "fbs") {
    std::vector<double> dm(d);
    for (double& x : dm) x -= mu;
    e.triple.f = diag_quadratic_proxable(dm, zeros_b);
    std::vector<double> muv(static_cast<std::size_t>(n), mu);
    if (split == "drs") {
      e.triple.g = diag_quadratic_proxable(muv, zeros_b);
      e.triple.h = SmoothFn::zero(n);
      e.triple.L = LinearMap::identity(n);
    } else {
      e.triple.g = ProxableFn::zero(n);
      e.triple.h = diag_quadratic_smooth(muv, zeros_b);
      e.triple.L = LinearMap::identity(n);
    }
  } else {
    throw BadParams("saddle_quadratic: split must be plain, drs, or fbs");
  }
  e.triple.check_dims();
  e.landscape.saddles.push_back(Vec::zeros(n));
  return e;
}

// ---------------------------------------------------------------------------
// quartic_well: separable double well f(x) = sum_i (x_i^2 - 1)^2 / 4.
// Minimizers are the sign patterns in {-1,+1}^n; any coordinate at 0 gives a
// strict saddle (curvature -1 there). Weak convexity constant is 1 since
// f''(u) = 3u^2 - 1 >= -1. The Hessian bound 2 covers all stationary points
// where |x_i| is 0 or 1. split=drs moves mu/2 |x|^2 from f into g.
inline RegistryEntry make_quartic_well(ParamReader& p) {
  int n = p.get_int("n", 1);
  std::string split = p.get_string("split", "plain");
  double mu = p.get_double("mu", 0.25);
  double box = p.get_double("box", 2.0);
  p.finish();
  if (n < 1) throw BadParams("quartic_well: n must be >= 1");
  if (box <= 1.0) throw BadParams("quartic_well: box must exceed 1 to contain the minimizers");
  bool drs = (split == "drs");
  if (!drs && split != "plain")
    throw BadParams("quartic_well: split must be plain or drs");
  if (drs && mu <= 0.0) throw BadParams("quartic_well: mu must be positive for split drs");

  double shift = drs ? mu : 0.0;
  ProxableFn f;
  f.dim = n;
  f.is_zero = false;
  f.weak_convexity = 1.0 + shift;
  f.lipschitz_hess_bound = std::max(2.0 - shift, 1.0 + shift);
  f.value = [shift](const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      double c = x[i] * x[i] - 1.0;
      s += 0.25 * c * c - 0.5 * shift * x[i] * x[i];
    }
    return ExtReal(s);
  };
  f.gradient = [shift](const Vec& x) {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) g[i] = (x[i] * x[i] - 1.0) * x[i] - shift * x[i];
    return g;
  };
  f.hessian = [shift](const Vec& x) {
    Vec d(x.size());
    for (int i = 0; i < x.size(); ++i) d[i] = 3.0 * x[i] * x[i] - 1.0 - shift;
    return Mat::diag(d);
  };

  RegistryEntry e;
  e.triple.name = "quartic_well";
  e.triple.dim = n;
  e.triple.range = n;
  e.triple.probe_radius = box;
  e.triple.f = f;
  if (drs) {
    std::vector<double> muv(static_cast<std::size_t>(n), mu);
    std::vector<double> zb(static_cast<std::size_t>(n), 0.0);
    e.triple.g = diag_quadratic_proxable(muv, zb);
  } else {
    e.triple.g = ProxableFn::zero(n);
  }
  e.triple.h = SmoothFn::zero(n);
  e.triple.L = LinearMap::identity(n);
  e.triple.check_dims();

  // Enumerate {-1, 0, +1}^n for small n: all-nonzero patterns are minimizers,
  // anything with a zero coordinate is a strict saddle.
  if (n <= 3) {
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      Vec x(n);
      int c = code;
      bool has_zero = false;
      for (int i = 0; i < n; ++i) {
        int t = c % 3;
        c /= 3;
        x[i] = static_cast<double>(t - 1);
        if (t == 1) has_zero = true;
      }
      (has_zero ? e.landscape.saddles : e.landscape.minimizers).push_back(x);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// logistic_smooth: ridge-regularized logistic fit,
//   g = lam/2 |x|^2, h(y) = (1/m) sum_i [log(1 + e^{y_i}) - c_i y_i], L = A
// with A an m x n matrix and targets c_i in (0,1), both drawn from the seed.
// Optional l1 > 0 adds f = l1 |x|_1 with the soft-threshold prox; that part
// has no Hessian, so it exercises the unavailable-second-derivative paths.
inline RegistryEntry make_logistic_smooth(ParamReader& p) {
  int n = p.get_int("n", 2);
  int m = p.get_int("m", 4);
  double lam = p.get_double("lam", 0.1);
  double l1 = p.get_double("l1", 0.0);
  int seed = p.get_int("seed", 7);
  p.finish();
  if (n < 1 || m < 1) throw BadParams("logistic_smooth: n and m must be >= 1");
  if (lam < 0.0 || l1 < 0.0) throw BadParams("logistic_smooth: lam and l1 must be >= 0");

  TrialRng rng(static_cast<std::uint64_t>(seed));
  Mat A = Mat::zeros(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(i)] = rng.uniform(0.1, 0.9);

  auto softplus = [](double y) {
    // log(1 + e^y) without overflow for large |y|
    return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
  };
  auto sigmoid = [](double y) {
    return y > 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
  };

  SmoothFn h;
  h.dim = m;
  h.is_zero = false;
  h.lipschitz_grad = 0.25 / static_cast<double>(m);
  h.value = [c, m, softplus](const Vec& y) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += softplus(y[i]) - c[static_cast<std::size_t>(i)] * y[i];
    return s / static_cast<double>(m);
  };
  h.gradient = [c, m, sigmoid](const Vec& y) {
    Vec g(m);
    for (int i = 0; i < m; ++i) g[i] = (sigmoid(y[i]) - c[static_cast<std::size_t>(i)]) / m;
    return g;
  };
  h.hessian = [m, sigmoid](const Vec& y) {
    Vec d(m);
    for (int i = 0; i < m; ++i) {
      double s = sigmoid(y[i]);
      d[i] = s * (1.0 - s) / m;
    }
    return Mat::diag(d);
  };

  RegistryEntry e;
  e.triple.name = "logistic_smooth";
  e.triple.dim = n;
  e.triple.range = m;
  e.triple.h = h;
  e.triple.L = LinearMap::from_matrix(A);

  if (lam > 0.0) {
    std::vector<double> lamv(static_cast<std::size_t>(n), lam);
    std::vector<double> zb(static_cast<std::size_t>(n), 0.0);
    e.triple.g = diag_quadratic_proxable(lamv, zb);
  } else {
    e.triple.g = ProxableFn::zero(n);
  }

  if (l1 > 0.0) {
    ProxableFn f;
    f.dim = n;
    f.is_zero = false;
    f.weak_convexity = 0.0;
    f.value = [l1](const Vec& x) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::abs(x[i]);
      return ExtReal(l1 * s);
    };
    f.closed_form_prox = [l1](double gamma, const Vec& z) {
      Vec u(z.size());
      double t = gamma * l1;
      for (int i = 0; i < z.size(); ++i)
        u[i] = z[i] > t ? z[i] - t : (z[i] < -t ? z[i] + t : 0.0);
      return u;
    };
    e.triple.f = f;
  } else {
    e.triple.f = ProxableFn::zero(n);
  }
  e.triple.check_dims();

  // Smooth convex case: the unique minimizer is found by Newton on the total
  // gradient. With an l1 part the minimizer is not smooth-stationary, so no
  // landscape point is reported.
  if (l1 == 0.0 && lam > 0.0) {
    Vec x = Vec::zeros(n);
    for (int it = 0; it < 100; ++it) {
      Vec gphi = phi_gradient(e.triple, x);
      if (norm(gphi) < 1e-12) break;
      Mat Hphi = phi_hessian(e.triple, x);
      x = x + LuFactor(Hphi).solve(-gphi);
    }
    if (norm(phi_gradient(e.triple, x)) < 1e-10) e.landscape.minimizers.push_back(x);
  }
  return e;
}

// ---------------------------------------------------------------------------
// matfac_toy: symmetric rank-one factorization f(x) = 1/4 |xx' - M|_F^2 with
// g = h = 0 (gradient-only mode after splitting). For M with a simple largest
// eigenvalue lmax > 0 the minimizers are +/- sqrt(lmax) vmax; the origin and
// the other eigendirections are strict saddles. Weak convexity lmax(M) since
// hess f = |x|^2 I + 2xx' - M >= -M; Hessian bound 2 rho(M) covers all
// stationary points.
inline RegistryEntry make_matfac_toy(ParamReader& p) {
  int n = p.get_int("n", 2);
  auto md = p.get_vec("Mdiag");
  p.finish();
  if (n < 1) throw BadParams("matfac_toy: n must be >= 1");

  std::vector<double> mdiag;
  if (md) {
    if (static_cast<int>(md->size()) != n)
      throw BadParams("matfac_toy: Mdiag must have length n");
    mdiag = *md;
  } else {
    mdiag.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mdiag[static_cast<std::size_t>(i)] = static_cast<double>(n - i);
  }
  Vec mv(n);
  for (int i = 0; i < n; ++i) mv[i] = mdiag[static_cast<std::size_t>(i)];
  Mat M = Mat::diag(mv);

  double lmax = *std::max_element(mdiag.begin(), mdiag.end());
  double rho = 0.0;
  for (double v : mdiag) rho = std::max(rho, std::abs(v));
  if (lmax <= 0.0) throw BadParams("matfac_toy: M must have a positive eigenvalue");

  ProxableFn f;
  f.dim = n;
  f.is_zero = false;
  f.weak_convexity = lmax;
  f.lipschitz_hess_bound = 2.0 * rho;
  f.value = [M, n](const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double r = x[i] * x[j] - M(i, j);
        s += r * r;
      }
    return ExtReal(0.25 * s);
  };
  f.gradient = [M](const Vec& x) {
    double ns = dot(x, x);
    Vec g = ns * x - matvec(M, x);
    return g;
  };
  f.hessian = [M, n](const Vec& x) {
    double ns = dot(x, x);
    Mat H = Mat::zeros(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = 2.0 * x[i] * x[j] - M(i, j);
    for (int i = 0; i < n; ++i) H(i, i) += ns;
    return H;
  };

  RegistryEntry e;
  e.triple.name = "matfac_toy";
  e.triple.dim = n;
  e.triple.range = n;
  e.triple.probe_radius = std::sqrt(lmax) + 1.0;
  e.triple.f = f;
  e.triple.g = ProxableFn::zero(n);
  e.triple.h = SmoothFn::zero(n);
  e.triple.L = LinearMap::identity(n);
  e.triple.check_dims();

  e.landscape.saddles.push_back(Vec::zeros(n));
  int top = static_cast<int>(std::max_element(mdiag.begin(), mdiag.end()) - mdiag.begin());
  for (int i = 0; i < n; ++i) {
    double li = mdiag[static_cast<std::size_t>(i)];
    if (li <= 1e-12) continue;
    Vec x = std::sqrt(li) * Vec::unit(n, i);
    if (i == top) {
      e.landscape.minimizers.push_back(x);
      e.landscape.minimizers.push_back(-1.0 * x);
    } else {
      e.landscape.saddles.push_back(x);
      e.landscape.saddles.push_back(-1.0 * x);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// phase_toy: real phase retrieval, phi(x) = (1/4m) sum_i (<a_i,x>^2 - b_i)^2
// with b_i = <a_i, xstar>^2, split as h(y) = (1/4m) sum (y_i^2 - b_i)^2 and
// L = A; f = 0 and g = lam/2 |x|^2 (lam may be 0). Global minimizers are
// +/- xstar; the origin is a strict saddle for generic A. The curvature bound
// for h holds on the probe box |x| <= box.
inline RegistryEntry make_phase_toy(ParamReader& p) {
  int n = p.get_int("n", 2);
  int m = p.get_int("m", 5);
  int seed = p.get_int("seed", 11);
  double lam = p.get_double("lam", 0.0);
  auto xs = p.get_vec("xstar");
  p.finish();
  if (n < 1 || m < 1) throw BadParams("phase_toy: n and m must be >= 1");
  if (lam < 0.0) throw BadParams("phase_toy: lam must be >= 0");

  TrialRng rng(static_cast<std::uint64_t>(seed));
  Mat A = Mat::zeros(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);

  Vec xstar(n);
  if (xs) {
    if (static_cast<int>(xs->size()) != n)
      throw BadParams("phase_toy: xstar must have length n");
    for (int i = 0; i < n; ++i) xstar[i] = (*xs)[static_cast<std::size_t>(i)];
  } else {
    xstar = rng.uniform_vec(n, -1.0, 1.0);
    double nx = norm(xstar);
    if (nx < 1e-6) xstar = Vec::unit(n, 0);
    else xstar = (1.0 / nx) * xstar;
  }

  LinearMap L = LinearMap::from_matrix(A);
  Vec b = L.apply(xstar);
  std::vector<double> bsq(static_cast<std::size_t>(m));
  double bmax = 0.0;
  for (int i = 0; i < m; ++i) {
    bsq[static_cast<std::size_t>(i)] = b[i] * b[i];
    bmax = std::max(bmax, b[i] * b[i]);
  }

  double box = 2.0 * norm(xstar) + 1.0;
  double ymax = L.op_norm * box;  // range of |y_i| over the probe box
  double md = static_cast<double>(m);

  SmoothFn h;
  h.dim = m;
  h.is_zero = false;
  h.lipschitz_grad = (3.0 * ymax * ymax + bmax) / md;
  h.value = [bsq, m, md](const Vec& y) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      double r = y[i] * y[i] - bsq[static_cast<std::size_t>(i)];
      s += r * r;
    }
    return s / (4.0 * md);
  };
  h.gradient = [bsq, m, md](const Vec& y) {
    Vec g(m);
    for (int i = 0; i < m; ++i)
      g[i] = (y[i] * y[i] - bsq[static_cast<std::size_t>(i)]) * y[i] / md;
    return g;
  };
  h.hessian = [bsq, m, md](const Vec& y) {
    Vec d(m);
    for (int i = 0; i < m; ++i)
      d[i] = (3.0 * y[i] * y[i] - bsq[static_cast<std::size_t>(i)]) / md;
    return Mat::diag(d);
  };

  RegistryEntry e;
  e.triple.name = "phase_toy";
  e.triple.dim = n;
  e.triple.range = m;
  e.triple.probe_radius = box;
  e.triple.f = ProxableFn::zero(n);
  if (lam > 0.0) {
    std::vector<double> lamv(static_cast<std::size_t>(n), lam);
    std::vector<double> zb(static_cast<std::size_t>(n), 0.0);
    e.triple.g = diag_quadratic_proxable(lamv, zb);
  } else {
    e.triple.g = ProxableFn::zero(n);
  }
  e.triple.h = h;
  e.triple.L = L;
  e.triple.check_dims();

  if (lam == 0.0) {
    e.landscape.minimizers.push_back(xstar);
    e.landscape.minimizers.push_back(-1.0 * xstar);
    e.landscape.saddles.push_back(Vec::zeros(n));
  }
  return e;
}

}  // namespace detail

/// Builds a named problem instance and its known stationary structure.
/// Unknown names raise UnknownProblem; unknown or ill-typed parameters raise
/// BadParams.
inline RegistryEntry registry_build(const std::string& name, const ParamMap& params) {
  detail::ParamReader p(params, name);
  if (name == "zero") return detail::make_zero(p);
  if (name == "quadratic") return detail::make_quadratic(p);
  if (name == "saddle_quadratic") return detail::make_saddle_quadratic(p);
  if (name == "quartic_well") return detail::make_quartic_well(p);
  if (name == "logistic_smooth") return detail::make_logistic_smooth(p);
  if (name == "matfac_toy") return detail::make_matfac_toy(p);
  if (name == "phase_toy") return detail::make_phase_toy(p);
  throw UnknownProblem("no registry problem named '" + name + "'");
}

inline ProblemTriple registry_make(const std::string& name, const ParamMap& params) {
  return registry_build(name, params).triple;
}

inline Landscape registry_landscape(const std::string& name, const ParamMap& params) {
  return registry_build(name, params).landscape;
}

inline std::vector<std::string> registry_names() {
  return {"zero",        "quadratic",  "saddle_quadratic", "quartic_well",
          "logistic_smooth", "matfac_toy", "phase_toy"};
}

}  // namespace dys
