#include <gtest/gtest.h>

#include <cmath>

#include "dys/analysis.hpp"
#include "dys/driver.hpp"
#include "dys/errors.hpp"
#include "dys/model/registry.hpp"

using namespace dys;

namespace {

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<double> dv(std::initializer_list<double> xs) { return std::vector<double>(xs); }

ProblemTriple quad(ParamMap params) { return registry_make("quadratic", std::move(params)); }

TEST(Classify, ConvexMinimizerIsLocalMinCandidate) {
  ParamMap params{{"qf", dv({1.0, 0.5})}, {"bf", dv({0.3, -0.2})}, {"qg", dv({0.5, 1.0})}};
  RegistryEntry e = registry_build("quadratic", ParamMap(params));
  SplitParams sp{0.4, 1.0};
  validate_params(e.triple, sp);
  RunResult r = run(e.triple, sp, make_vec({1.0, -1.0}), {1e-12, 20000});
  ASSERT_TRUE(r.converged);
  PointReport rep = classify(e.triple, sp, r.z_final);
  EXPECT_EQ(rep.classification, PointClass::LocalMinCandidate);
  ASSERT_TRUE(rep.has_env_eig);
  EXPECT_GT(rep.lambda_min_env, 0.0);
  ASSERT_TRUE(rep.has_phi_eig);
  EXPECT_GT(rep.lambda_min_phi, 0.0);
  EXPECT_LE(norm(rep.x - e.landscape.minimizers[0]), 1e-6);
}

TEST(Classify, DiagonalSaddleHasKnownCurvatures) {
  ProblemTriple P = registry_make("saddle_quadratic", {});
  SplitParams sp{0.5, 1.0};
  validate_params(P, sp);
  PointReport rep = classify(P, sp, Vec::zeros(2));
  EXPECT_EQ(rep.classification, PointClass::StrictSaddle);
  ASSERT_TRUE(rep.has_env_eig);
  EXPECT_NEAR(rep.lambda_min_env, -2.0, 1e-12);
  ASSERT_TRUE(rep.has_phi_eig);
  EXPECT_NEAR(rep.lambda_min_phi, -1.0, 1e-12);
  EXPECT_EQ(rep.phi_classification, PointClass::StrictSaddle);
}

TEST(Classify, SplitVariantAgreesInSign) {
  // same objective distributed over f and h; curvatures change, signs do not
  ProblemTriple P = registry_make("saddle_quadratic", {{"split", std::string("fbs")}});
  SplitParams sp{0.5, 1.0};
  validate_params(P, sp);
  PointReport rep = classify(P, sp, Vec::zeros(2));
  EXPECT_EQ(rep.classification, PointClass::StrictSaddle);
  EXPECT_NEAR(rep.lambda_min_env, -7.0 / 3.0, 1e-10);
  EXPECT_NEAR(rep.lambda_min_phi, -1.0, 1e-12);
}

TEST(Classify, NonCriticalAndFlatPoints) {
  ProblemTriple P = registry_make("saddle_quadratic", {});
  SplitParams sp{0.5, 1.0};
  PointReport rep = classify(P, sp, make_vec({0.3, 0.7}));
  EXPECT_EQ(rep.classification, PointClass::NotCritical);
  EXPECT_GT(rep.grad_env_norm, 1e-3);

  // identically flat instance: eigenvalues inside the tolerance band
  ProblemTriple flat = quad({{"qf", dv({0.0, 0.0})}});
  PointReport frep = classify(flat, {0.5, 1.0}, make_vec({0.2, -0.4}));
  EXPECT_EQ(frep.classification, PointClass::Indeterminate);
}

TEST(Classify, FixedPointResidualAndGradientAgree) {
  ProblemTriple P = quad({{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}});
  SplitParams sp{0.4, 1.0};
  TrialRng rng(3);
  for (int k = 0; k < 10; ++k) {
    Vec z = rng.uniform_vec(2, -2.0, 2.0);
    PointReport rep = classify(P, sp, z);
    if (rep.resid > 1e-6) EXPECT_GT(rep.grad_env_norm, 1e-12);
    if (rep.resid <= 1e-10) EXPECT_LE(rep.grad_env_norm, 1e-8);
  }
}

TEST(StepBounds, ClosedFormValues) {
  // vacuous bound when both curvatures vanish
  ProblemTriple flat = quad({{"qf", dv({0.0, 0.0})}, {"qg", dv({0.0, 0.0})}});
  StepBounds b0 = step_bounds(flat, {0.1, 1.0});
  EXPECT_TRUE(std::isinf(b0.alpha1));

  // two-prox case: 2 / (1 - (0.9/1.1)^2)
  ProblemTriple drs = quad({{"qf", dv({1.0, 1.0})}, {"qg", dv({1.0, 1.0})}});
  StepBounds b1 = step_bounds(drs, {0.1, 1.0});
  EXPECT_NEAR(b1.alpha1, 6.05, 1e-12);
  EXPECT_TRUE(std::isinf(b1.alpha2));

  // prox-gradient case: (1 + 0.1) / (0.1 * (1 + 1))
  ProblemTriple fbs = quad({{"qf", dv({1.0, 1.0})}, {"qh", dv({1.0, 1.0})}});
  StepBounds b2 = step_bounds(fbs, {0.1, 1.0});
  EXPECT_NEAR(b2.alpha2, 5.5, 1e-12);
  EXPECT_TRUE(std::isinf(b2.alpha1));

  // pure smooth case: 1 / (gamma L_h |L|^2)
  ProblemTriple gd = quad({{"qh", dv({1.0, 1.0})}});
  StepBounds b3 = step_bounds(gd, {0.1, 1.0});
  EXPECT_NEAR(b3.alpha2, 10.0, 1e-12);

  ProblemTriple dys =
      quad({{"qf", dv({1.0, 1.0})}, {"qg", dv({1.0, 1.0})}, {"qh", dv({1.0, 1.0})}});
  EXPECT_THROW(step_bounds(dys, {0.1, 1.0}), ModeMismatch);
}

TEST(JacobianT, ClosedFormsAndFiniteDifferences) {
  ProblemTriple zero = registry_make("zero", {});
  Mat J0 = jacobian_T(zero, {0.7, 0.9}, make_vec({0.4, -0.2}));
  EXPECT_LE(norm_inf(J0 - Mat::identity(2)), 1e-14);

  // pure gradient step: J = (1 - alpha gamma) I
  ProblemTriple gd = quad({{"qh", dv({1.0, 1.0})}});
  Mat Jg = jacobian_T(gd, {0.5, 0.8}, make_vec({1.0, 2.0}));
  EXPECT_LE(norm_inf(Jg - 0.6 * Mat::identity(2)), 1e-12);

  // analytic Jacobian tracks the finite-difference one across modes
  struct Case {
    const char* name;
    ParamMap params;
    double gamma;
  };
  std::vector<Case> cases = {
      {"quadratic", {{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}}, 0.4},
      {"quadratic",
       {{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}, {"qh", dv({0.5, 0.5})}},
       0.3},
      {"quartic_well", {{"n", 2.0}}, 0.4},
      {"matfac_toy", {}, 0.2},
  };
  TrialRng rng(7);
  for (const Case& c : cases) {
    ProblemTriple P = registry_make(c.name, ParamMap(c.params));
    SplitParams sp{c.gamma, 0.9};
    validate_params(P, sp);
    for (int k = 0; k < 5; ++k) {
      Vec z = rng.uniform_vec(P.dim, -1.5, 1.5);
      Mat J = jacobian_T(P, sp, z);
      Mat Jfd = fd_jacobian([&](const Vec& y) { return dys_step(P, sp, y).z_next; }, z);
      EXPECT_LE(norm_inf(J - Jfd), 1e-5 * (1.0 + norm_inf(J))) << c.name;
    }
  }
}

TEST(DiffeoProbe, IdentityAndDiagonalCases) {
  ProblemTriple zero = registry_make("zero", {});
  EXPECT_DOUBLE_EQ(diffeo_probe(zero, {0.5, 1.7}, make_vec({2.0, -3.0})), 1.0);

  // diagonal saddle: J_T entries 1 + alpha (1/(1 + gamma d_i) - 1)
  ProblemTriple P = registry_make("saddle_quadratic", {});
  SplitParams inside{0.5, 2.7};   // alpha2 = 3
  SplitParams outside{0.5, 4.5};  // beyond the bound
  EXPECT_NEAR(diffeo_probe(P, inside, Vec::zeros(2)), 0.1, 1e-12);
  EXPECT_NEAR(diffeo_probe(P, outside, Vec::zeros(2)), -0.5, 1e-12);

  EXPECT_THROW(diffeo_probe(P, inside, make_vec({0.3, 0.1})), NotFixedPoint);
}

TEST(DiffeoProbe, PositiveInsideBoundAcrossModes) {
  struct Case {
    const char* name;
    ParamMap params;
    double gamma;
    Vec zstar;
  };
  std::vector<Case> cases = {
      {"saddle_quadratic", {{"split", std::string("drs")}}, 0.5, Vec::zeros(2)},
      {"saddle_quadratic", {{"split", std::string("fbs")}}, 0.5, Vec::zeros(2)},
      {"saddle_quadratic", {}, 0.5, Vec::zeros(2)},
  };
  for (const Case& c : cases) {
    ProblemTriple P = registry_make(c.name, ParamMap(c.params));
    SplitParams sp{c.gamma, 1.0};
    StepBounds b = step_bounds(P, sp);
    double bound = std::min(b.alpha1, b.alpha2);
    ASSERT_TRUE(std::isfinite(bound)) << c.name;
    sp.alpha = 0.9 * bound;
    validate_params(P, sp);
    EXPECT_GT(diffeo_probe(P, sp, c.zstar), 0.0) << c.name;
  }
}

TEST(Correspondence, ConvexQuadraticEquality) {
  ParamMap params{{"qf", dv({1.0, 2.0})}, {"bf", dv({0.5, -0.5})}, {"qg", dv({1.0, 0.5})}};
  RegistryEntry e = registry_build("quadratic", ParamMap(params));
  ProblemTriple& P = e.triple;
  SplitParams sp{0.3, 1.0};
  validate_params(P, sp);
  ASSERT_EQ(e.landscape.minimizers.size(), 1u);
  Vec xstar = e.landscape.minimizers[0];
  // z* = x* + gamma grad g(x*) maps back to x* under prox_{gamma g}
  Vec zstar = xstar + sp.gamma * P.g.gradient(xstar);
  CorrespondenceReport rep = minimizer_correspondence_check(P, sp, zstar);
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.gap, 1e-9);
  EXPECT_GE(rep.min_probe_increase, 0.0);
}

TEST(Correspondence, TrivialAndNonconvexRuns) {
  ProblemTriple zero = registry_make("zero", {});
  EXPECT_TRUE(minimizer_correspondence_check(zero, {0.5, 1.0}, make_vec({1.0, 1.0})).passed);

  ProblemTriple mf = registry_make("matfac_toy", {});
  SplitParams sp{0.2, 1.0};
  validate_params(mf, sp);
  TrialRng rng(11);
  int converged = 0;
  for (int k = 0; k < 5; ++k) {
    RunResult r = run(mf, sp, rng.uniform_vec(2, -2.0, 2.0), {1e-11, 20000});
    if (!r.converged) continue;
    // skip runs that land on the strict saddle rather than a minimizer
    PointReport rep = classify(mf, sp, r.z_final);
    if (rep.classification != PointClass::LocalMinCandidate) continue;
    ++converged;
    EXPECT_TRUE(minimizer_correspondence_check(mf, sp, r.z_final).passed);
  }
  EXPECT_GT(converged, 0);
}

TEST(Correspondence, SaddleFailsTheMinimalityProbe) {
  ProblemTriple P = registry_make("saddle_quadratic", {});
  SplitParams sp{0.5, 1.0};
  EXPECT_THROW(minimizer_correspondence_check(P, sp, Vec::zeros(2)), CorrespondenceViolated);
  EXPECT_THROW(minimizer_correspondence_check(P, sp, make_vec({0.5, 0.5})), NotFixedPoint);
}

TEST(Sandwich, HoldsOnRandomPoints) {
  struct Case {
    const char* name;
    ParamMap params;
    double gamma;
  };
  std::vector<Case> cases = {
      {"quadratic",
       {{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}, {"qh", dv({0.5, 0.5})}},
       0.25},
      {"saddle_quadratic", {{"split", std::string("drs")}}, 0.5},
      {"quartic_well", {{"n", 2.0}}, 0.4},
      {"phase_toy", {}, 0.05},
  };
  for (const Case& c : cases) {
    ProblemTriple P = registry_make(c.name, ParamMap(c.params));
    SplitParams sp{c.gamma, 1.0};
    validate_params(P, sp);
    TrialRng rng(13);
    for (int k = 0; k < 200; ++k) {
      Vec z = rng.uniform_vec(P.dim, -P.probe_radius, P.probe_radius);
      SandwichReport r = sandwich_check(P, sp, z);
      EXPECT_LE(r.lower_violation, 1e-8) << c.name;
      EXPECT_LE(r.upper_violation, 1e-8) << c.name;
      EXPECT_LE(r.prox_violation, 1e-8) << c.name;
    }
  }
}

TEST(InvariantSuite, AllChecksPassOnRepresentativeInstances) {
  struct Case {
    const char* name;
    ParamMap params;
    double gamma;
  };
  std::vector<Case> cases = {
      {"quadratic", {{"qf", dv({1.0, 0.5})}, {"qg", dv({0.5, 1.0})}}, 0.4},
      {"matfac_toy", {}, 0.2},
      {"quartic_well", {}, 0.4},
  };
  for (const Case& c : cases) {
    ProblemTriple P = registry_make(c.name, ParamMap(c.params));
    SplitParams sp{c.gamma, 0.9};
    validate_params(P, sp);
    std::vector<CheckItem> items = invariant_suite(P, sp);
    EXPECT_EQ(items.size(), 8u);
    for (const CheckItem& it : items) {
      EXPECT_TRUE(it.passed) << c.name << ": " << it.name << " measure " << it.measure
                             << " threshold " << it.threshold;
    }
  }
}

TEST(InvariantSuite, GridInfimumCheckIsMeaningful) {
  ProblemTriple P = registry_make("quartic_well", {});
  SplitParams sp{0.4, 0.9};
  std::vector<CheckItem> items = invariant_suite(P, sp);
  bool found = false;
  for (const CheckItem& it : items) {
    if (it.name != "envelope_infimum_matches_objective") continue;
    found = true;
    EXPECT_TRUE(it.passed);
    EXPECT_GT(it.threshold, 0.0);  // not skipped for a 1-D problem
    EXPECT_TRUE(it.note.empty());
  }
  EXPECT_TRUE(found);
}

}  // namespace
