#include "doctest.h"

#include <cmath>

#include "degen/oracle.hpp"
#include "degen/solver.hpp"

using namespace degen;

namespace {

ProblemSpec affine_problem(int dim, const AffineFn& ell) {
  ProblemSpec prob;
  prob.dim = dim;
  prob.H = DegeneracySpec::pure_power(1.0);
  prob.f = [](const Vec&) { return 0.0; };
  prob.boundary = [ell](const Vec& X) { return ell(X); };
  return prob;
}

}  // namespace

TEST_CASE("affine data with zero source is reproduced immediately") {
  AffineFn ell{0.4, Vec::make(1.5, -0.5)};
  for (int dim : {1, 2}) {
    ProblemSpec prob = affine_problem(dim, ell);
    SolveConfig cfg = SolveConfig::defaults_for(dim);
    cfg.n = 33;
    SolveResult res = solve_dirichlet(prob, cfg);
    for (long i = 0; i < res.u.grid.npoints(); ++i)
      CHECK(std::fabs(res.u[i] - ell(res.u.grid.coord(i))) <= 1e-11);
    CHECK(res.diag.final_residual <= cfg.tol);
    for (const StageInfo& st : res.diag.stages) CHECK(st.iterations <= 2);
  }
}

TEST_CASE("returned fields carry the boundary trace bit-exactly") {
  ExactSolution sol = radial_profile(1.0, 2);
  ProblemSpec prob;
  prob.dim = 2;
  prob.H = DegeneracySpec::pure_power(1.0);
  prob.f = [](const Vec&) { return 1.0; };
  prob.boundary = sol.eval;
  SolveConfig cfg;
  cfg.n = 33;
  cfg.tol = 1e-5;
  SolveResult res = solve_dirichlet(prob, cfg);
  const Grid& g = res.u.grid;
  for (long i = 0; i < g.npoints(); ++i)
    if (g.is_boundary(i)) CHECK(res.u[i] == sol.eval(g.coord(i)));
}

TEST_CASE("reported residual equals a fresh recomputation on the output") {
  ExactSolution sol = radial_profile(1.0, 2);
  ProblemSpec prob;
  prob.dim = 2;
  prob.H = DegeneracySpec::pure_power(1.0);
  prob.f = [](const Vec&) { return 1.0; };
  prob.boundary = sol.eval;
  SolveConfig cfg;
  cfg.n = 33;
  cfg.tol = 1e-5;
  SolveResult res = solve_dirichlet(prob, cfg);

  ScalarField r = residual_field(prob, res.u, res.diag.eps_final);
  double sup = 0.0;
  for (double v : r.values) sup = std::max(sup, std::fabs(v));
  CHECK(sup == res.diag.final_residual);
  CHECK(sup <= cfg.tol);

  // Every continuation stage ended at or below the target.
  REQUIRE(!res.diag.stages.empty());
  for (const StageInfo& st : res.diag.stages) CHECK(st.residual <= cfg.tol);
  CHECK(res.diag.eps_final == cfg.eps_schedule.back());
}

TEST_CASE("discrete comparison: heavier forcing sits below") {
  ExactSolution sol = ode_profile(1.0);
  ProblemSpec prob;
  prob.dim = 1;
  prob.H = DegeneracySpec::pure_power(1.0);
  prob.boundary = sol.eval;
  SolveConfig cfg;
  cfg.n = 65;
  cfg.tol = 1e-6;

  prob.f = [](const Vec&) { return 2.0; };
  SolveResult hi = solve_dirichlet(prob, cfg);
  prob.f = [](const Vec&) { return 1.0; };
  SolveResult lo = solve_dirichlet(prob, cfg);

  for (long i = 0; i < hi.u.grid.npoints(); ++i)
    CHECK(hi.u[i] <= lo.u[i] + 10.0 * cfg.tol);
}

TEST_CASE("solver input validation") {
  ProblemSpec prob = affine_problem(2, {0.0, Vec::make(1.0, 1.0)});
  SolveConfig cfg;

  SUBCASE("bad dimension") {
    prob.dim = 3;
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
  SUBCASE("missing source") {
    prob.f = nullptr;
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
  SUBCASE("missing boundary") {
    prob.boundary = nullptr;
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
  SUBCASE("tiny grid") {
    cfg.n = 2;
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
  SUBCASE("bad tolerance") {
    cfg.tol = 0.0;
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
  SUBCASE("empty schedule") {
    cfg.eps_schedule.clear();
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
  SUBCASE("bad dt factor") {
    cfg.dt_factor = 2.0;
    CHECK_THROWS_AS(solve_dirichlet(prob, cfg), constraint_error);
  }
}

TEST_CASE("iteration budget exhaustion raises with diagnostics attached") {
  ExactSolution sol = radial_profile(1.0, 2);
  ProblemSpec prob;
  prob.dim = 2;
  prob.H = DegeneracySpec::pure_power(1.0);
  prob.f = [](const Vec&) { return 1.0; };
  prob.boundary = sol.eval;
  SolveConfig cfg;
  cfg.n = 33;
  cfg.max_iters_per_stage = 3;
  try {
    solve_dirichlet(prob, cfg);
    FAIL("expected convergence_error");
  } catch (const convergence_error& e) {
    CHECK(e.diag.total_iterations == 3);
    CHECK(e.diag.final_residual > cfg.tol);
  }
}

TEST_CASE("runaway source is caught by the blowup guard") {
  ProblemSpec prob = affine_problem(1, {0.0, Vec::make(1.0)});
  prob.f = [](const Vec&) { return 1e60; };
  SolveConfig cfg;
  cfg.n = 17;
  CHECK_THROWS_AS(solve_dirichlet(prob, cfg), blowup_error);
}

TEST_CASE("initial guess interpolates the boundary data exactly") {
  Grid g = make_grid(2, 17, -1.0, 1.0);
  auto bnd = [](const Vec& X) { return std::sin(3.0 * X[0]) + X[1] * X[1]; };
  ScalarField u0 = initial_guess(g, bnd);
  for (long i = 0; i < g.npoints(); ++i)
    if (g.is_boundary(i)) CHECK(u0[i] == bnd(g.coord(i)));

  // The transfinite blend reproduces affine data everywhere.
  AffineFn ell{-0.3, Vec::make(0.7, 1.1)};
  ScalarField ua = initial_guess(g, [&](const Vec& X) { return ell(X); });
  for (long i = 0; i < g.npoints(); ++i)
    CHECK(ua[i] == doctest::Approx(ell(g.coord(i))).epsilon(1e-13));
}

TEST_CASE("two point integrator solves the linear case to quadrature accuracy") {
  ScalarField u = solve_ode_bvp(
      0.0, [](double) { return 1.0; }, 0.0, 1.0, 0.0, 0.5, 257);
  for (long i = 0; i < u.grid.npoints(); ++i) {
    double t = u.grid.coord(i)[0];
    CHECK(std::fabs(u[i] - 0.5 * t * t) <= 1e-8);
  }
}

TEST_CASE("two point integrator honors the shooting gap certificate") {
  ExactSolution sol = ode_profile(1.0);
  double gap = -1.0;
  ScalarField u = solve_ode_bvp(
      1.0, [](double) { return 1.0; }, -1.0, 1.0, sol.eval(Vec::make(-1.0)),
      sol.eval(Vec::make(1.0)), 257, &gap);
  CHECK(gap >= 0.0);
  CHECK(gap <= 1e-9);
  // Endpoints carry the data exactly.
  CHECK(u[0] == sol.eval(Vec::make(-1.0)));
  CHECK(u[u.grid.npoints() - 1] == sol.eval(Vec::make(1.0)));
}

TEST_CASE("even data forces an even computed profile") {
  ExactSolution sol = ode_profile(2.0);
  double c = sol.eval(Vec::make(1.0));
  ScalarField u = solve_ode_bvp(
      2.0, [](double) { return 1.0; }, -1.0, 1.0, c, c, 129);
  int n = u.grid.n;
  // One-sided integration plus the pinned right endpoint leaves a constant
  // offset at the level of the shooting gap, not at machine precision.
  for (int i = 0; i < n; ++i)
    CHECK(std::fabs(u[i] - u[n - 1 - i]) <= 1e-6);
}

TEST_CASE("two point integrator validation and bracketing") {
  auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(solve_ode_bvp(1.0, [](double) { return -1.0; }, 0.0, 1.0,
                                0.0, 1.0, 65),
                  constraint_error);
  CHECK_THROWS_AS(solve_ode_bvp(1.0, [](double) { return 0.0; }, 0.0, 1.0, 0.0,
                                1.0, 65),
                  constraint_error);
  CHECK_THROWS_AS(solve_ode_bvp(-1.0, one, 0.0, 1.0, 0.0, 1.0, 65),
                  constraint_error);
  CHECK_THROWS_AS(solve_ode_bvp(1.0, one, 1.0, 0.0, 0.0, 1.0, 65),
                  constraint_error);
  // A source this large needs an initial slope about -5e19, far outside
  // the doubling bracket search around the secant guess.
  CHECK_THROWS_AS(solve_ode_bvp(0.0, [](double) { return 1e20; }, 0.0, 1.0,
                                0.0, 0.0, 65),
                  shooting_error);
}

TEST_CASE("relaxation and integration agree on the non-degenerate line") {
  // gamma = 0 keeps both exact on quadratic data, so they must meet far
  // below the relaxation tolerance.
  ScalarField direct = solve_ode_bvp(
      0.0, [](double) { return 1.0; }, -1.0, 1.0, 0.5, 0.5, 65);
  ProblemSpec prob;
  prob.dim = 1;
  prob.H = DegeneracySpec::pure_power(0.0);
  prob.f = [](const Vec&) { return 1.0; };
  prob.boundary = [](const Vec&) { return 0.5; };
  SolveConfig cfg;
  cfg.n = 65;
  cfg.tol = 1e-8;
  cfg.eps_schedule = {1e-2};
  SolveResult relax = solve_dirichlet(prob, cfg);
  for (long i = 0; i < direct.grid.npoints(); ++i)
    CHECK(std::fabs(direct[i] - relax.u[i]) <= 10.0 * cfg.tol);
}

TEST_CASE("c1 distance is a grid metric on the comparison ball") {
  Grid g = make_grid(2, 33, -1.0, 1.0);
  ScalarField a = sample(g, [](const Vec& X) { return X[0] * X[0]; });
  ScalarField b = sample(g, [](const Vec& X) { return X[0] * X[0] + 0.1; });
  Vec origin = Vec::zero(2);
  CHECK(c1_distance(a, a, origin, 0.8) == 0.0);
  CHECK(c1_distance(a, b, origin, 0.8) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c1_distance(a, b, origin, 0.8) ==
        doctest::Approx(c1_distance(b, a, origin, 0.8)).epsilon(1e-14));
  ScalarField c = sample(g, [](const Vec& X) { return X[0]; });
  // Slope mismatch shows up through the gradient term.
  CHECK(c1_distance(a, c, origin, 0.5) > 0.4);
  // A ball that misses every node: center strictly between grid points.
  CHECK_THROWS_AS(c1_distance(a, b, Vec::make(1e-4, 2e-4), 1e-9),
                  empty_ball_error);
}

TEST_CASE("vanishing degeneracy family shares one boundary") {
  ExactSolution sol = radial_profile(1.0, 2);
  ScLimitConfig cfg;
  cfg.n = 33;
  auto one = [](const Vec&) { return 1.0; };

  CHECK(sc_limit_family(OperatorSpec::trace(), one, {}, sol.eval, cfg).empty());

  auto members = sc_limit_family(OperatorSpec::trace(), one,
                                 {0.4, 0.2, 0.0}, sol.eval, cfg);
  REQUIRE(members.size() == 3);
  for (const auto& m : members) {
    CHECK(m.status == "ok");
    CHECK(m.residual <= cfg.tol);
    const Grid& g = m.u.grid;
    for (long i = 0; i < g.npoints(); ++i)
      if (g.is_boundary(i)) CHECK(m.u[i] == sol.eval(g.coord(i)));
  }

  // The delta = 0 member is the plain Poisson solve.
  ProblemSpec prob;
  prob.dim = 2;
  prob.H = DegeneracySpec::pure_power(0.0);
  prob.f = one;
  prob.boundary = sol.eval;
  SolveConfig scfg;
  scfg.n = cfg.n;
  scfg.tol = cfg.tol;
  scfg.eps_schedule = {cfg.eps_schedule.back()};
  scfg.max_iters_per_stage = cfg.max_iters_per_stage;
  SolveResult plain = solve_dirichlet(prob, scfg);
  for (long i = 0; i < plain.u.grid.npoints(); ++i)
    CHECK(members[2].u[i] == plain.u[i]);

  CHECK_THROWS_AS(
      sc_limit_family(OperatorSpec::trace(), one, {0.4, -0.2}, sol.eval, cfg),
      constraint_error);
}
