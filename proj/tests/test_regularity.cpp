#include "doctest.h"

#include <cmath>

#include "degen/oracle.hpp"
#include "degen/regularity.hpp"

using namespace degen;

namespace {

ScalarField power_field_1d(int n, double expo, double scale = 1.0,
                           double lo = -1.0, double hi = 1.0) {
  Grid g = make_grid(1, n, lo, hi);
  return sample(g, [expo, scale](const Vec& X) {
    return scale * std::pow(std::fabs(X[0]), expo);
  });
}

}  // namespace

TEST_CASE("affine data is fit exactly") {
  Grid g = make_grid(2, 33, -1.0, 1.0);
  AffineFn ell{0.3, Vec::make(-1.2, 0.7)};
  ScalarField u = sample(g, [&](const Vec& X) { return ell(X); });
  AffineFitResult r = best_affine_fit(u, Vec::zero(2), 0.6);
  CHECK(r.max_error <= 1e-13);
  CHECK(r.fit.a == doctest::Approx(ell.a).epsilon(1e-12));
  CHECK(r.fit.b[0] == doctest::Approx(ell.b[0]).epsilon(1e-12));
  CHECK(r.fit.b[1] == doctest::Approx(ell.b[1]).epsilon(1e-12));
  CHECK(r.points > 4);
}

TEST_CASE("parabola fit reaches the equioscillating affine") {
  // On [-r, r] the best uniform affine approximation of x^2 is the constant
  // r^2/2 with error r^2/2.
  ScalarField u = power_field_1d(257, 2.0);
  const double r = 0.5;
  AffineFitResult fit = best_affine_fit(u, Vec::make(0.0), r);
  CHECK(fit.max_error == doctest::Approx(r * r / 2.0).epsilon(0.02));
  CHECK(std::fabs(fit.fit.b[0]) <= 1e-8);
  CHECK(fit.fit(Vec::make(0.0)) == doctest::Approx(r * r / 2.0).epsilon(0.02));
}

TEST_CASE("fit is minimax: nudging the coefficients cannot do better") {
  Grid g = make_grid(2, 65, -1.0, 1.0);
  ExactSolution sol = radial_profile(1.0, 2);
  ScalarField u = sample(g, sol.eval);
  Vec c = Vec::zero(2);
  const double r = 0.5;
  AffineFitResult fit = best_affine_fit(u, c, r);
  CHECK(std::fabs(fit.fit.b[0]) <= 1e-8);
  CHECK(std::fabs(fit.fit.b[1]) <= 1e-8);

  auto sup_err = [&](const AffineFn& cand) {
    double e = 0.0;
    for (long k : ball_indices(g, c, r))
      e = std::max(e, std::fabs(cand(g.coord(k)) - u[k]));
    return e;
  };
  CHECK(sup_err(fit.fit) == doctest::Approx(fit.max_error).epsilon(1e-12));
  for (double d0 : {-1e-3, 1e-3})
    for (double d1 : {-1e-3, 0.0, 1e-3}) {
      AffineFn cand{fit.fit.a + d0, Vec::make(fit.fit.b[0] + d1, fit.fit.b[1] - d1)};
      CHECK(sup_err(cand) + 1e-9 >= fit.max_error);
    }
}

TEST_CASE("fit refuses balls with too few nodes") {
  Grid g = make_grid(2, 17, -1.0, 1.0);
  ScalarField u = sample(g, [](const Vec& X) { return X[0]; });
  CHECK_THROWS_AS(best_affine_fit(u, Vec::zero(2), 0.5 * g.h),
                  underdetermined_fit_error);
}

TEST_CASE("dyadic decay recovers pure power exponents") {
  for (double a : {0.25, 0.5, 0.75}) {
    ScalarField u = power_field_1d(4097, 1.0 + a);
    DecayReport rep = dyadic_decay(u, Vec::make(0.0), 0.5, 8);
    CHECK(std::fabs(rep.alpha_hat - a) <= 0.02);
    CHECK(rep.levels.size() == 8);
    CHECK(!rep.saturated);
    CHECK(!rep.truncated);
    CHECK(rep.fit_residual <= 0.1);
    CHECK(rep.C0_hat >= 0.0);
    CHECK(std::isfinite(rep.C0_hat));
    // Scale invariance of the excess forces strictly shrinking levels.
    for (size_t i = 0; i + 1 < rep.levels.size(); ++i)
      CHECK(rep.levels[i + 1].E < rep.levels[i].E);
  }
}

TEST_CASE("decay on affine data bottoms out at rounding noise") {
  Grid g = make_grid(1, 257, -1.0, 1.0);
  ScalarField u = sample(g, [](const Vec& X) { return 0.25 - 2.0 * X[0]; });
  DecayReport flat = dyadic_decay(u, Vec::make(0.0), 0.5, 6);
  CHECK(flat.saturated);
  CHECK(!std::isfinite(flat.alpha_hat));

  // A barely-quadratic perturbation keeps the outer levels informative and
  // flags the inner ones.
  ScalarField v = sample(g, [](const Vec& X) {
    return 0.25 - 2.0 * X[0] + 1e-11 * X[0] * X[0];
  });
  DecayReport rep = dyadic_decay(v, Vec::make(0.0), 0.5, 8);
  CHECK(rep.saturated);
  CHECK(std::fabs(rep.alpha_hat - 1.0) <= 0.05);
}

TEST_CASE("decay report is translation equivariant") {
  // Same mesh width, both centers are nodes, all balls stay inside.
  Grid g = make_grid(1, 8193, -2.0, 2.0);
  double c = 0.25;
  ScalarField u0 = sample(g, [](const Vec& X) {
    return std::pow(std::fabs(X[0]), 1.5);
  });
  ScalarField uc = sample(g, [c](const Vec& X) {
    return std::pow(std::fabs(X[0] - c), 1.5);
  });
  DecayReport r0 = dyadic_decay(u0, Vec::make(0.0), 0.5, 7);
  DecayReport rc = dyadic_decay(uc, Vec::make(c), 0.5, 7);
  REQUIRE(r0.levels.size() == rc.levels.size());
  for (size_t i = 0; i < r0.levels.size(); ++i)
    CHECK(rc.levels[i].E == doctest::Approx(r0.levels[i].E).epsilon(1e-12));
  CHECK(rc.alpha_hat == doctest::Approx(r0.alpha_hat).epsilon(1e-10));
}

TEST_CASE("decay report is covariant under value scaling") {
  ScalarField u = power_field_1d(2049, 1.5);
  ScalarField v = u;
  const double tau = 4.0;
  for (double& x : v.values) x /= tau;
  DecayReport ru = dyadic_decay(u, Vec::make(0.0), 0.5, 7);
  DecayReport rv = dyadic_decay(v, Vec::make(0.0), 0.5, 7);
  REQUIRE(ru.levels.size() == rv.levels.size());
  for (size_t i = 0; i < ru.levels.size(); ++i)
    CHECK(tau * rv.levels[i].E == doctest::Approx(ru.levels[i].E).epsilon(1e-9));
  CHECK(rv.alpha_hat == doctest::Approx(ru.alpha_hat).epsilon(1e-9));
}

TEST_CASE("decay input validation") {
  ScalarField u = power_field_1d(257, 1.5);
  CHECK_THROWS_AS(dyadic_decay(u, Vec::make(0.0), 0.0, 6), constraint_error);
  CHECK_THROWS_AS(dyadic_decay(u, Vec::make(0.0), 1.0, 6), constraint_error);
  CHECK_THROWS_AS(dyadic_decay(u, Vec::make(0.0), 0.5, 1), constraint_error);
}

TEST_CASE("schedule constants come out as exact dyadic values") {
  ProofConstants pc = proof_constants(2.0, 0.5, 0.25);
  CHECK(std::fabs(pc.rho0 - 0.00390625) <= 1e-12);
  CHECK(std::fabs(pc.delta - 4.8828125e-4) <= 1e-12);
  // rho0^(-5/4) * (1 + 1/(1 - rho0)) = 1024 * 511/255.
  CHECK(pc.C_final == doctest::Approx(1024.0 * 511.0 / 255.0).epsilon(1e-9));
  CHECK(!pc.rho0_capped);
  CHECK(pc.C_univ == 2.0);
  CHECK(pc.alpha0 == 0.5);
  CHECK(pc.alpha == 0.25);

  ProofConstants capped = proof_constants(0.6, 1.0, 0.5);
  CHECK(capped.rho0 == 0.5);
  CHECK(capped.rho0_capped);
  CHECK(capped.delta ==
        doctest::Approx(0.5 * std::pow(0.5, 1.5)).epsilon(1e-12));

  CHECK_THROWS_AS(proof_constants(0.0, 0.5, 0.25), constraint_error);
  CHECK_THROWS_AS(proof_constants(2.0, 1.5, 0.25), constraint_error);
  CHECK_THROWS_AS(proof_constants(2.0, 0.5, -0.1), constraint_error);
  CHECK_THROWS_AS(proof_constants(2.0, 0.5, 0.5), domain_error);
  CHECK_THROWS_AS(proof_constants(2.0, 0.5, 0.6), domain_error);
  CHECK_THROWS_AS(proof_constants(2.0, 0.5, 0.25, -1.0), constraint_error);
}

TEST_CASE("flatness check on a normalized singular profile") {
  Grid g = make_grid(2, 65, -1.0, 1.0);
  ExactSolution sol = radial_profile(1.0, 2);
  ScalarField u = sample(g, sol.eval);

  FlatnessReport rep = flatness_check(u, Vec::zero(2), 0.5, 0.4, 2.0);
  CHECK(rep.flat);
  CHECK(rep.coef_bounded);
  CHECK(!rep.not_normalized);
  CHECK(rep.pass);
  CHECK(rep.E <= std::pow(0.5, 1.4));

  ScalarField zero = sample(g, [](const Vec&) { return 0.0; });
  CHECK(flatness_check(zero, Vec::zero(2), 0.5, 0.4, 2.0).pass);

  ScalarField big = u;
  for (double& x : big.values) x *= 3.0;
  FlatnessReport bad = flatness_check(big, Vec::zero(2), 0.5, 0.4, 2.0);
  CHECK(bad.not_normalized);
  CHECK(!bad.pass);

  CHECK_THROWS_AS(flatness_check(u, Vec::zero(2), 1.5, 0.4, 2.0),
                  constraint_error);
  CHECK_THROWS_AS(flatness_check(u, Vec::zero(2), 0.5, 0.0, 2.0),
                  constraint_error);
  CHECK_THROWS_AS(flatness_check(u, Vec::zero(2), 0.5, 0.4, 0.0),
                  constraint_error);
}

TEST_CASE("flatness check accepts a precomputed constants bundle") {
  ScalarField u = power_field_1d(4097, 1.5, 0.544331053951817);
  ProofConstants pc = proof_constants(2.0, 0.5, 0.25);
  FlatnessReport a = flatness_check(u, Vec::make(0.0), pc);
  FlatnessReport b = flatness_check(u, Vec::make(0.0), pc.rho0, pc.alpha,
                                    pc.C_univ);
  CHECK(a.E == b.E);
  CHECK(a.coef_size == b.coef_size);
  CHECK(a.pass == b.pass);
  CHECK(a.pass);
}

TEST_CASE("gradient zero set detection") {
  Grid g = make_grid(2, 33, -1.0, 1.0);
  ScalarField quad = sample(g, [](const Vec& X) {
    return X[0] * X[0] + X[1] * X[1];
  });
  std::vector<long> mask = singular_set(quad);
  REQUIRE(mask.size() == 1);
  CHECK(mask[0] == g.index2(16, 16));

  ScalarField aff = sample(g, [](const Vec& X) { return 1.5 * X[0]; });
  CHECK(singular_set(aff).empty());

  // A wider threshold grows the detected set monotonically.
  std::vector<long> wide = singular_set(quad, 3.0 * g.h);
  CHECK(wide.size() >= mask.size());

  Grid ga = make_grid(2, 129, -1.0, 1.0);
  ScalarField ar = sample(ga, aronsson().eval);
  std::vector<long> am = singular_set(ar);
  CHECK(!am.empty());
  for (long k : am) {
    Vec X = ga.coord(k);
    CHECK(std::min(std::fabs(X[0]), std::fabs(X[1])) <= 2.0 * ga.h + 1e-15);
  }
}

TEST_CASE("exponent sweep produces theory-matching rows") {
  TableConfig cfg;
  cfg.dim = 1;
  cfg.n = 1025;
  cfg.K = 6;
  std::vector<TableRow> rows = exponent_vs_gamma_table({0.0, 1.0}, cfg);
  REQUIRE(rows.size() == 2);

  CHECK(rows[0].gamma == 0.0);
  CHECK(rows[0].alpha_theory == 1.0);
  CHECK(rows[0].status == "ok");
  CHECK(std::fabs(rows[0].alpha_hat - 1.0) <= 0.05);

  CHECK(rows[1].alpha_theory == 0.5);
  CHECK(rows[1].status == "ok");
  CHECK(rows[1].abs_err == std::fabs(rows[1].alpha_hat - 0.5));
  CHECK(rows[1].abs_err <= 0.05);
  CHECK(rows[1].solver_residual <= 1e-6);

  TableConfig bad;
  bad.dim = 3;
  CHECK_THROWS_AS(exponent_vs_gamma_table({1.0}, bad), constraint_error);
}
