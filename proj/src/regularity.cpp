#include "degen/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degen/oracle.hpp"

namespace degen {
namespace {

constexpr double kEpsMach = 2.220446049250313e-16;

// In-place Gaussian elimination with partial pivoting, m <= 3.
// Returns false when the system is numerically singular.
bool gauss_solve(int m, double A[3][3], double rhs[3], double out[3]) {
  double amax = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) amax = std::max(amax, std::fabs(A[i][j]));
  if (amax == 0.0) return false;
  const double tiny = amax * 1e-14;
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) <= tiny) return false;
    if (piv != col) {
      for (int j = 0; j < m; ++j) std::swap(A[piv][j], A[col][j]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (int r = col + 1; r < m; ++r) {
      double fac = A[r][col] / A[col][col];
      for (int j = col; j < m; ++j) A[r][j] -= fac * A[col][j];
      rhs[r] -= fac * rhs[col];
    }
  }
  for (int r = m - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int j = r + 1; j < m; ++j) s -= A[r][j] * out[j];
    out[r] = s / A[r][r];
  }
  return true;
}

}  // namespace

AffineFitResult best_affine_fit(const ScalarField& u, const Vec& center,
                                double radius) {
  const Grid& g = u.grid;
  std::vector<long> idxs = ball_indices(g, center, radius);
  const long N = static_cast<long>(idxs.size());
  if (N < g.dim + 2)
    throw underdetermined_fit_error(
        "affine fit needs at least dim+2 nodes, ball of radius " +
        std::to_string(radius) + " holds " + std::to_string(N));
  const int m = g.dim + 1;

  std::vector<double> xi0(idxs.size()), xi1(idxs.size()), val(idxs.size());
  double scale = 0.0;
  for (size_t i = 0; i < idxs.size(); ++i) {
    Vec X = g.coord(idxs[i]);
    xi0[i] = X.c[0] - center.c[0];
    xi1[i] = g.dim == 2 ? X.c[1] - center.c[1] : 0.0;
    val[i] = u[idxs[i]];
    scale = std::max(scale, std::fabs(val[i]));
  }

  std::vector<double> w(idxs.size(), 1.0 / static_cast<double>(N));
  std::vector<double> resid(idxs.size());
  double best_err = std::numeric_limits<double>::infinity();
  double best_coef[3] = {0.0, 0.0, 0.0};
  const double impr_tol = 1e-12 * std::max(1.0, scale);
  int rounds = 0;

  for (int round = 0; round < 50; ++round) {
    double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (size_t i = 0; i < idxs.size(); ++i) {
      double phi[3] = {1.0, xi0[i], xi1[i]};
      for (int r = 0; r < m; ++r) {
        for (int csub = r; csub < m; ++csub) A[r][csub] += w[i] * phi[r] * phi[csub];
        rhs[r] += w[i] * phi[r] * val[i];
      }
    }
    for (int r = 1; r < m; ++r)
      for (int csub = 0; csub < r; ++csub) A[r][csub] = A[csub][r];
    double coef[3] = {0.0, 0.0, 0.0};
    if (!gauss_solve(m, A, rhs, coef)) break;  // weights collapsed; keep best

    double E = 0.0, wsum = 0.0;
    for (size_t i = 0; i < idxs.size(); ++i) {
      resid[i] = std::fabs(coef[0] + coef[1] * xi0[i] + coef[2] * xi1[i] - val[i]);
      E = std::max(E, resid[i]);
    }
    rounds = round + 1;
    double improvement = best_err - E;
    if (E < best_err) {
      best_err = E;
      best_coef[0] = coef[0];
      best_coef[1] = coef[1];
      best_coef[2] = coef[2];
    }
    if (round > 0 && improvement < impr_tol) break;
    for (size_t i = 0; i < idxs.size(); ++i) w[i] *= resid[i];
    for (double wi : w) wsum += wi;
    if (wsum <= 1e-300) break;  // the fit interpolates
    for (double& wi : w) wi /= wsum;
  }

  AffineFitResult out;
  Vec b = Vec::zero(g.dim);
  b.c[0] = best_coef[1];
  if (g.dim == 2) b.c[1] = best_coef[2];
  out.fit = AffineFn{best_coef[0] - dot(b, center), b};
  out.max_error = best_err;
  out.rounds = rounds;
  out.points = N;
  return out;
}

DecayReport dyadic_decay(const ScalarField& u, const Vec& center, double rho0,
                         int K) {
  if (!(rho0 > 0.0 && rho0 < 1.0))
    throw constraint_error("dyadic_decay: rho0 must lie in (0,1)");
  if (K < 2) throw constraint_error("dyadic_decay: need K >= 2 levels");

  DecayReport rep;
  rep.center = center;
  rep.rho0 = rho0;
  for (int k = 0; k < K; ++k) {
    double r = std::pow(rho0, k);
    AffineFitResult fit;
    try {
      fit = best_affine_fit(u, center, r);
    } catch (const underdetermined_fit_error&) {
      rep.truncated = true;
      break;
    }
    DecayLevel lv;
    lv.k = k;
    lv.radius = r;
    lv.a = fit.fit(center);
    lv.b = fit.fit.b;
    lv.E = fit.max_error;
    lv.points = fit.points;
    rep.levels.push_back(lv);
  }
  if (rep.levels.size() < 2)
    throw underdetermined_fit_error("dyadic_decay: fewer than two usable levels");

  double scale = sup_norm_on_ball(u, center, rep.levels.front().radius);
  const double floor = 10.0 * kEpsMach * std::max(1.0, scale);
  std::vector<double> xs, ys;
  for (const DecayLevel& lv : rep.levels) {
    if (lv.E > floor) {
      xs.push_back(std::log(lv.radius));
      ys.push_back(std::log(lv.E));
    } else {
      rep.saturated = true;
    }
  }
  if (xs.size() < 2) {
    // The field is affine to machine precision on (almost) every ball; a
    // slope cannot be read off.  The flag carries the information.
    rep.saturated = true;
    rep.alpha_hat = std::numeric_limits<double>::quiet_NaN();
    rep.C0_hat = std::numeric_limits<double>::quiet_NaN();
    rep.fit_residual = 0.0;
    return rep;
  }

  double xm = 0.0, ym = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= static_cast<double>(xs.size());
  ym /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  double slope = sxy / sxx;
  rep.alpha_hat = slope - 1.0;
  rep.fit_residual = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double line = ym + slope * (xs[i] - xm);
    rep.fit_residual = std::max(rep.fit_residual, std::fabs(ys[i] - line));
  }

  rep.C0_hat = 0.0;
  for (size_t i = 0; i + 1 < rep.levels.size(); ++i) {
    const DecayLevel& l0 = rep.levels[i];
    const DecayLevel& l1 = rep.levels[i + 1];
    double drift = std::fabs(l1.a - l0.a) + l0.radius * (l1.b - l0.b).norm();
    rep.C0_hat = std::max(
        rep.C0_hat, drift / std::pow(l0.radius, 1.0 + rep.alpha_hat));
  }
  return rep;
}

std::vector<long> singular_set(const ScalarField& u, double threshold) {
  const Grid& g = u.grid;
  if (threshold < 0.0) threshold = g.h;
  std::vector<long> out;
  for (long k = 0; k < g.npoints(); ++k) {
    if (g.is_boundary(k)) continue;
    if (fd_jet(u, k).grad.norm() <= threshold) out.push_back(k);
  }
  return out;
}

ProofConstants proof_constants(double C, double alpha0, double alpha,
                               double C0) {
  if (!(C > 0.0) || !std::isfinite(C))
    throw constraint_error("proof_constants: C must be positive");
  if (!(alpha0 > 0.0 && alpha0 <= 1.0))
    throw constraint_error("proof_constants: alpha0 must lie in (0,1]");
  if (!(alpha > 0.0))
    throw constraint_error("proof_constants: alpha must be positive");
  if (!(alpha < alpha0))
    throw domain_error("proof_constants: alpha must lie strictly below alpha0");
  if (!(C0 >= 0.0))
    throw constraint_error("proof_constants: C0 must be nonnegative");
  ProofConstants pc;
  pc.C_univ = C;
  pc.alpha0 = alpha0;
  pc.alpha = alpha;
  pc.rho0 = std::pow(1.0 / (2.0 * C), 1.0 / (alpha0 - alpha));
  if (pc.rho0 > 0.5) {
    pc.rho0 = 0.5;
    pc.rho0_capped = true;
  }
  pc.delta = 0.5 * std::pow(pc.rho0, 1.0 + alpha);
  pc.C_final = std::pow(pc.rho0, -(1.0 + alpha)) * (1.0 + C0 / (1.0 - pc.rho0));
  return pc;
}

FlatnessReport flatness_check(const ScalarField& u, const Vec& center,
                              double rho0, double alpha, double C_univ) {
  if (!(rho0 > 0.0 && rho0 < 1.0))
    throw constraint_error("flatness_check: rho0 must lie in (0,1)");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw constraint_error("flatness_check: alpha must lie in (0,1]");
  if (!(C_univ > 0.0))
    throw constraint_error("flatness_check: C_univ must be positive");
  AffineFitResult fit = best_affine_fit(u, center, rho0);
  FlatnessReport rep;
  rep.E = fit.max_error;
  rep.coef_size = std::fabs(fit.fit(center)) + fit.fit.b.norm();
  rep.flat = rep.E <= std::pow(rho0, 1.0 + alpha);
  rep.coef_bounded = rep.coef_size <= C_univ;
  rep.not_normalized = sup_norm_on_ball(u, center, 1.0) > 1.0 + 1e-12;
  rep.pass = rep.flat && rep.coef_bounded && !rep.not_normalized;
  return rep;
}

FlatnessReport flatness_check(const ScalarField& u, const Vec& center,
                              const ProofConstants& pc) {
  return flatness_check(u, center, pc.rho0, pc.alpha, pc.C_univ);
}

std::vector<TableRow> exponent_vs_gamma_table(
    const std::vector<double>& gammas, const TableConfig& cfg) {
  if (cfg.dim != 1 && cfg.dim != 2)
    throw constraint_error("exponent_vs_gamma_table: dim must be 1 or 2");
  std::vector<TableRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double gamma : gammas) {
    TableRow row;
    row.gamma = gamma;
    row.alpha_theory = 1.0 / (1.0 + gamma);
    row.alpha_hat = nan;
    row.abs_err = nan;
    row.solver_residual = nan;
    try {
      ScalarField u;
      if (cfg.dim == 1) {
        ExactSolution profile = ode_profile(gamma);
        double ubnd = profile.eval(Vec::make(1.0));
        double gap = 0.0;
        u = solve_ode_bvp(
            gamma, [](double) { return 1.0; }, -1.0, 1.0, ubnd, ubnd, cfg.n,
            &gap);
        row.solver_residual = gap;
      } else {
        ExactSolution profile = radial_profile(gamma, 2);
        ProblemSpec prob;
        prob.dim = 2;
        prob.F = OperatorSpec::trace();
        prob.H = DegeneracySpec::pure_power(gamma);
        prob.f = [](const Vec&) { return 1.0; };
        prob.boundary = profile.eval;
        SolveConfig sc;
        sc.n = cfg.n;
        sc.tol = cfg.tol;
        sc.eps_schedule = cfg.eps_schedule;
        sc.max_iters_per_stage = cfg.max_iters_per_stage;
        SolveResult res = solve_dirichlet(prob, sc);
        u = std::move(res.u);
        row.solver_residual = res.diag.final_residual;
      }
      DecayReport rep = dyadic_decay(u, Vec::zero(cfg.dim), cfg.rho0, cfg.K);
      row.alpha_hat = rep.alpha_hat;
      row.abs_err = std::fabs(rep.alpha_hat - row.alpha_theory);
      row.status = "ok";
    } catch (const convergence_error&) {
      row.status = "convergence_error";
    } catch (const blowup_error&) {
      row.status = "blowup_error";
    } catch (const shooting_error&) {
      row.status = "shooting_error";
    } catch (const error&) {
      row.status = "error";
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace degen
