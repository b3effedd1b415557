#include "degen/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace degen {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBlowupCap = 1e50;

// Bound on |dF/dM_aa| per axis; the explicit step is scaled against the
// worst second-difference sensitivity 2 * dim * axis_lip / h^2.
double axis_lipschitz(const OperatorSpec& F) {
  switch (F.kind) {
    case OperatorKind::Trace:
      return 1.0;
    case OperatorKind::PucciMinus:
    case OperatorKind::PucciPlus:
    case OperatorKind::LinearCoeff:
    case OperatorKind::MinOfLinears:
      return F.ell.Lambda;
    default:
      return 0.0;  // gradient kinds scale their own step locally
  }
}

void validate_problem(const ProblemSpec& prob) {
  if (prob.dim != 1 && prob.dim != 2)
    throw constraint_error("solve_dirichlet: dim must be 1 or 2");
  if (!prob.f) throw constraint_error("solve_dirichlet: missing source term");
  if (!prob.boundary)
    throw constraint_error("solve_dirichlet: missing boundary data");
}

// One relaxation pass.  The residual uses the same stencils as
// residual_field, so a converged iterate re-certifies outside the solver.
// The update divides the step by the local degeneracy factor (and by the
// local gradient weight for the gradient-carrying kinds), which removes the
// stiffness of nearly vanishing H from the iteration.
struct Relax {
  const ProblemSpec& prob;
  const SolveConfig& cfg;
  Grid g;
  std::vector<double> fpre;          // source at every node
  std::vector<double> cpre;          // modulation c(X), 1 when absent
  std::vector<SymMat> coeffpre;      // LinearCoeff matrices at every node
  std::vector<Vec> xpre;             // coordinates (non-trace kinds)
  double dtp_matrix = 0.0;           // step for matrix kinds, pre-divided
  double gamma = 0.0;
  double eps = 0.0, eps2 = 0.0;

  Relax(const ProblemSpec& p, const SolveConfig& c, const Grid& grid)
      : prob(p), cfg(c), g(grid) {
    ScalarField fs = sample(g, prob.f);
    fpre = fs.values;
    if (prob.H.c) {
      ScalarField cs = sample(g, prob.H.c);
      cpre = cs.values;
    } else {
      cpre.assign(static_cast<size_t>(g.npoints()), 1.0);
    }
    if (prob.F.kind == OperatorKind::LinearCoeff) {
      coeffpre.resize(static_cast<size_t>(g.npoints()), SymMat::zero(g.dim));
      for (long k = 0; k < g.npoints(); ++k)
        coeffpre[static_cast<size_t>(k)] = prob.F.coeff(g.coord(k));
    }
    if (prob.F.kind != OperatorKind::Trace) {
      xpre.resize(static_cast<size_t>(g.npoints()), Vec::zero(g.dim));
      for (long k = 0; k < g.npoints(); ++k)
        xpre[static_cast<size_t>(k)] = g.coord(k);
    }
    gamma = prob.H.gamma;
    if (prob.F.matrix_kind())
      dtp_matrix = cfg.dt_factor * g.h * g.h /
                   (2.0 * g.dim * axis_lipschitz(prob.F));
  }

  void set_eps(double e) {
    eps = e;
    eps2 = e * e;
  }

  // Residual and update at a node given its difference jet.
  // Returns the residual; writes the new value.
  inline double node(long k, const Jet& J, double uc, double* out) const {
    size_t i = static_cast<size_t>(k);
    double Hval = cpre[i] * half_power(eps2 + J.grad.norm2(), gamma);
    double R;
    double upd;
    switch (prob.F.kind) {
      case OperatorKind::LinearCoeff:
        R = Hval * coeffpre[i].inner(J.hess) - fpre[i];
        upd = dtp_matrix * R / Hval;
        break;
      case OperatorKind::Infinity: {
        R = Hval * infinity_laplacian(J) - fpre[i];
        double amp = Hval * J.grad.norm2() + g.h * g.h;
        upd = cfg.dt_factor * g.h * g.h / (2.0 * amp) * R;
        break;
      }
      case OperatorKind::PNondiv: {
        R = Hval * p_laplacian_nondiv(J, prob.F.p) - fpre[i];
        double amp = Hval * half_power(J.grad.norm2(), prob.F.p - 2.0) *
                         (g.dim + prob.F.p - 2.0) +
                     g.h * g.h;
        upd = cfg.dt_factor * g.h * g.h / (2.0 * amp) * R;
        break;
      }
      default:
        R = Hval * eval_F(prob.F, xpre[i], J.hess) - fpre[i];
        upd = dtp_matrix * R / Hval;
        break;
    }
    *out = uc + upd;
    return std::fabs(R);
  }

  // The difference expressions below must stay textually in step with
  // fd_jet and eval_H_eps: final_residual is promised to be reproducible
  // bit for bit by residual_field on the returned iterate.
  double sweep1(const std::vector<double>& v, std::vector<double>& w) const {
    const int n = g.n;
    const double h = g.h, h2 = h * h;
    double sup = 0.0;
    if (prob.F.kind == OperatorKind::Trace) {
      for (int i = 1; i < n - 1; ++i) {
        double uc = v[i], uE = v[i + 1], uW = v[i - 1];
        double lap = (uE - 2 * uc + uW) / h2;
        double gx = (uE - uW) / (2 * h);
        double n2 = gx * gx;
        double Hval = cpre[i] * half_power(eps2 + n2, gamma);
        double R = Hval * lap - fpre[i];
        sup = std::max(sup, std::fabs(R));
        w[i] = uc + dtp_matrix * R / Hval;
      }
      return sup;
    }
    for (int i = 1; i < n - 1; ++i) {
      double uc = v[i], uE = v[i + 1], uW = v[i - 1];
      Jet J;
      J.value = uc;
      J.grad = Vec::make((uE - uW) / (2 * h));
      J.hess = SymMat::zero(1);
      J.hess.set(0, 0, (uE - 2 * uc + uW) / h2);
      sup = std::max(sup, node(i, J, uc, &w[i]));
    }
    return sup;
  }

  double sweep2(const std::vector<double>& v, std::vector<double>& w) const {
    const int n = g.n;
    const double h = g.h, h2 = h * h;
    double sup = 0.0;
    if (prob.F.kind == OperatorKind::Trace) {
      for (int iy = 1; iy < n - 1; ++iy) {
        const long row = static_cast<long>(iy) * n;
        for (int ix = 1; ix < n - 1; ++ix) {
          const long k = row + ix;
          double uc = v[k], uE = v[k + 1], uW = v[k - 1];
          double uN = v[k + n], uS = v[k - n];
          double xx = (uE - 2 * uc + uW) / h2;
          double yy = (uN - 2 * uc + uS) / h2;
          double tr = xx + yy;
          double gx = (uE - uW) / (2 * h), gy = (uN - uS) / (2 * h);
          double n2 = gx * gx + gy * gy;
          double Hval = cpre[k] * half_power(eps2 + n2, gamma);
          double R = Hval * tr - fpre[k];
          sup = std::max(sup, std::fabs(R));
          w[k] = uc + dtp_matrix * R / Hval;
        }
      }
      return sup;
    }
    for (int iy = 1; iy < n - 1; ++iy) {
      const long row = static_cast<long>(iy) * n;
      for (int ix = 1; ix < n - 1; ++ix) {
        const long k = row + ix;
        double uc = v[k], uE = v[k + 1], uW = v[k - 1];
        double uN = v[k + n], uS = v[k - n];
        Jet J;
        J.value = uc;
        J.grad = Vec::make((uE - uW) / (2 * h), (uN - uS) / (2 * h));
        J.hess = SymMat::zero(2);
        J.hess.set(0, 0, (uE - 2 * uc + uW) / h2);
        J.hess.set(1, 1, (uN - 2 * uc + uS) / h2);
        J.hess.set(0, 1, (v[k + n + 1] + v[k - n - 1] - v[k - n + 1] -
                          v[k + n - 1]) /
                             (4 * h2));
        sup = std::max(sup, node(k, J, uc, &w[k]));
      }
    }
    return sup;
  }

  double sweep(const std::vector<double>& v, std::vector<double>& w) const {
    return g.dim == 1 ? sweep1(v, w) : sweep2(v, w);
  }
};

// sign(p) |p|^(1+gamma) / (1+gamma), the first integral of |p|^gamma dp.
double phi_power(double p, double gamma) {
  return std::copysign(std::pow(std::fabs(p), 1.0 + gamma) / (1.0 + gamma), p);
}

double phi_power_inv(double v, double gamma) {
  return std::copysign(std::pow((1.0 + gamma) * std::fabs(v), 1.0 / (1.0 + gamma)), v);
}

}  // namespace

SolveConfig SolveConfig::defaults_for(int dim) {
  SolveConfig c;
  if (dim == 1) {
    c.n = 257;
    c.tol = 1e-6;
  } else {
    c.n = 65;
    c.tol = 1e-5;
  }
  return c;
}

ScalarField initial_guess(const Grid& g,
                          const std::function<double(const Vec&)>& boundary) {
  ScalarField u;
  u.grid = g;
  u.values.assign(static_cast<size_t>(g.npoints()), 0.0);
  if (g.dim == 1) {
    double ua = boundary(Vec::make(g.lo)), ub = boundary(Vec::make(g.hi));
    for (int i = 0; i < g.n; ++i) {
      double t = static_cast<double>(i) / (g.n - 1);
      u.values[static_cast<size_t>(i)] = (1.0 - t) * ua + t * ub;
    }
    u.values[0] = ua;
    u.values[static_cast<size_t>(g.n - 1)] = ub;
    return u;
  }
  // Transfinite blend of the four edges; boundary nodes are then assigned
  // directly so the Dirichlet data is exact to the bit.
  auto B = [&](double x, double y) { return boundary(Vec::make(x, y)); };
  double c00 = B(g.lo, g.lo), c10 = B(g.hi, g.lo);
  double c01 = B(g.lo, g.hi), c11 = B(g.hi, g.hi);
  for (int iy = 0; iy < g.n; ++iy) {
    double y = g.axis_coord(iy);
    double t = static_cast<double>(iy) / (g.n - 1);
    for (int ix = 0; ix < g.n; ++ix) {
      double x = g.axis_coord(ix);
      double s = static_cast<double>(ix) / (g.n - 1);
      double val = (1.0 - s) * B(g.lo, y) + s * B(g.hi, y) +
                   (1.0 - t) * B(x, g.lo) + t * B(x, g.hi) -
                   ((1.0 - s) * (1.0 - t) * c00 + s * (1.0 - t) * c10 +
                    (1.0 - s) * t * c01 + s * t * c11);
      u.values[static_cast<size_t>(g.index2(ix, iy))] = val;
    }
  }
  for (long k = 0; k < g.npoints(); ++k)
    if (g.is_boundary(k)) u.values[static_cast<size_t>(k)] = boundary(g.coord(k));
  return u;
}

double equation_residual(const ProblemSpec& prob, const Jet& jet, const Vec& X,
                         double eps) {
  double Hval = eval_H_eps(prob.H, X, jet.grad, eps);
  switch (prob.F.kind) {
    case OperatorKind::Infinity:
      return Hval * infinity_laplacian(jet) - prob.f(X);
    case OperatorKind::PNondiv:
      return Hval * p_laplacian_nondiv(jet, prob.F.p) - prob.f(X);
    default:
      return Hval * eval_F(prob.F, X, jet.hess) - prob.f(X);
  }
}

ScalarField residual_field(const ProblemSpec& prob, const ScalarField& u,
                           double eps) {
  const Grid& g = u.grid;
  ScalarField r;
  r.grid = g;
  r.values.assign(static_cast<size_t>(g.npoints()), 0.0);
  for (long k = 0; k < g.npoints(); ++k) {
    if (g.is_boundary(k)) continue;
    Jet J = fd_jet(u, k);
    r.values[static_cast<size_t>(k)] = equation_residual(prob, J, g.coord(k), eps);
  }
  return r;
}

SolveResult solve_dirichlet(const ProblemSpec& prob, const SolveConfig& cfg) {
  validate_problem(prob);
  if (cfg.n < 3) throw constraint_error("solve_dirichlet: n must be >= 3");
  if (!(cfg.tol > 0.0)) throw constraint_error("solve_dirichlet: tol must be positive");
  if (cfg.eps_schedule.empty())
    throw constraint_error("solve_dirichlet: empty eps schedule");
  for (double e : cfg.eps_schedule)
    if (!(e > 0.0) || !std::isfinite(e))
      throw constraint_error("solve_dirichlet: eps values must be positive");
  if (!(cfg.dt_factor > 0.0 && cfg.dt_factor <= 1.0))
    throw constraint_error("solve_dirichlet: dt_factor must lie in (0, 1]");

  Grid g = make_grid(prob.dim, cfg.n, prob.lo, prob.hi);
  ScalarField u = initial_guess(g, prob.boundary);
  ScalarField unext = u;
  Relax relax(prob, cfg, g);

  SolveDiagnostics diag;
  for (double eps : cfg.eps_schedule) {
    relax.set_eps(eps);
    double prev_sup = kInf;
    double sup = kInf;
    bool reached = false;
    long iters = 0;
    while (iters < cfg.max_iters_per_stage) {
      sup = relax.sweep(u.values, unext.values);
      ++iters;
      ++diag.total_iterations;
      if (!std::isfinite(sup) || sup > kBlowupCap) {
        diag.stages.push_back({eps, iters, sup});
        diag.final_residual = sup;
        diag.eps_final = eps;
        throw blowup_error("solve_dirichlet: iterate blew up at eps=" +
                               std::to_string(eps),
                           diag);
      }
      if (sup <= cfg.tol) {
        // Break before committing the update: the returned field is the one
        // this residual was measured on.
        reached = true;
        break;
      }
      if (sup > prev_sup * (1.0 + 1e-12)) ++diag.monotone_violations;
      prev_sup = sup;
      std::swap(u.values, unext.values);
    }
    diag.stages.push_back({eps, iters, sup});
    diag.final_residual = sup;
    diag.eps_final = eps;
    if (!reached)
      throw convergence_error(
          "solve_dirichlet: stage eps=" + std::to_string(eps) +
              " exhausted its iteration budget at residual " +
              std::to_string(sup),
          diag);
  }
  return {std::move(u), std::move(diag)};
}

ScalarField solve_ode_bvp(double gamma, const std::function<double(double)>& f,
                          double a, double b, double ua, double ub, int n,
                          double* shooting_gap) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw constraint_error("solve_ode_bvp: gamma must be finite and >= 0");
  if (!(a < b)) throw constraint_error("solve_ode_bvp: need a < b");
  if (n < 3) throw constraint_error("solve_ode_bvp: n must be >= 3");
  if (!f) throw constraint_error("solve_ode_bvp: missing source term");

  Grid g = make_grid(1, n, a, b);
  const double h = g.h;
  const int cells = n - 1;

  // Source samples at nodes, quarter points and midpoints; the reduction
  // integrates f twice, each by per-cell Simpson rules, so everything stays
  // O(h^4) without any solver parameter.
  std::vector<double> fn(static_cast<size_t>(n)), fq(static_cast<size_t>(cells)),
      fm(static_cast<size_t>(cells)), f3q(static_cast<size_t>(cells));
  auto sample_f = [&](double t) {
    double v = f(t);
    if (!std::isfinite(v))
      throw sampling_error("solve_ode_bvp: source not finite at t=" + std::to_string(t));
    if (!(v > 0.0))
      throw constraint_error("solve_ode_bvp: source must be positive, got " +
                             std::to_string(v) + " at t=" + std::to_string(t));
    return v;
  };
  for (int i = 0; i < n; ++i) fn[static_cast<size_t>(i)] = sample_f(g.axis_coord(i));
  for (int i = 0; i < cells; ++i) {
    double t = g.axis_coord(i);
    fq[static_cast<size_t>(i)] = sample_f(t + 0.25 * h);
    fm[static_cast<size_t>(i)] = sample_f(t + 0.5 * h);
    f3q[static_cast<size_t>(i)] = sample_f(t + 0.75 * h);
  }

  // Cumulative integral of f at nodes and midpoints.
  std::vector<double> Fn(static_cast<size_t>(n), 0.0), Fm(static_cast<size_t>(cells), 0.0);
  for (int i = 0; i < cells; ++i) {
    size_t si = static_cast<size_t>(i);
    double half1 = h / 12.0 * (fn[si] + 4.0 * fq[si] + fm[si]);
    double half2 = h / 12.0 * (fm[si] + 4.0 * f3q[si] + fn[si + 1]);
    Fm[si] = Fn[si] + half1;
    Fn[si + 1] = Fn[si] + half1 + half2;
  }

  // u' = phi^{-1}(phi(s) + F); integrating once more gives the shot value.
  auto shoot = [&](double s, std::vector<double>* out) {
    double phis = phi_power(s, gamma);
    double u = ua;
    if (out) (*out)[0] = ua;
    for (int i = 0; i < cells; ++i) {
      size_t si = static_cast<size_t>(i);
      double p0 = phi_power_inv(phis + Fn[si], gamma);
      double pm = phi_power_inv(phis + Fm[si], gamma);
      double p1 = phi_power_inv(phis + Fn[si + 1], gamma);
      u += h / 6.0 * (p0 + 4.0 * pm + p1);
      if (out) (*out)[si + 1] = u;
    }
    return u;
  };

  // shoot(s) is strictly increasing in s; bracket then bisect.
  double s0 = (ub - ua) / (b - a);
  double r = std::max(1.0, std::fabs(s0));
  double slo = s0 - r, shi = s0 + r;
  int guard = 0;
  while (shoot(slo, nullptr) > ub && guard++ < 60) {
    r *= 2.0;
    slo -= r;
  }
  if (shoot(slo, nullptr) > ub)
    throw shooting_error("solve_ode_bvp: no lower bracket for the initial slope");
  guard = 0;
  while (shoot(shi, nullptr) < ub && guard++ < 60) {
    r *= 2.0;
    shi += r;
  }
  if (shoot(shi, nullptr) < ub)
    throw shooting_error("solve_ode_bvp: no upper bracket for the initial slope");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (slo + shi);
    if (mid == slo || mid == shi) break;
    if (shoot(mid, nullptr) < ub)
      slo = mid;
    else
      shi = mid;
  }

  ScalarField u;
  u.grid = g;
  u.values.assign(static_cast<size_t>(n), 0.0);
  double end = shoot(0.5 * (slo + shi), &u.values);
  if (shooting_gap) *shooting_gap = std::fabs(end - ub);
  u.values[static_cast<size_t>(n - 1)] = ub;
  return u;
}

double c1_distance(const ScalarField& u, const ScalarField& v,
                   const Vec& center, double radius) {
  const Grid& g = u.grid;
  if (v.grid.dim != g.dim || v.grid.n != g.n || v.grid.lo != g.lo ||
      v.grid.hi != g.hi)
    throw constraint_error("c1_distance: fields live on different grids");
  double sup0 = 0.0, sup1 = 0.0;
  long used = 0;
  for (long k : ball_indices(g, center, radius)) {
    int ix = static_cast<int>(k % g.n);
    int iy = g.dim == 2 ? static_cast<int>(k / g.n) : 0;
    bool interior = ix >= 1 && ix <= g.n - 2 &&
                    (g.dim == 1 || (iy >= 1 && iy <= g.n - 2));
    if (!interior) continue;
    sup0 = std::max(sup0, std::fabs(u[k] - v[k]));
    Jet Ju = fd_jet(u, k), Jv = fd_jet(v, k);
    sup1 = std::max(sup1, (Ju.grad - Jv.grad).norm());
    ++used;
  }
  if (used == 0)
    throw empty_ball_error("c1_distance: no interior nodes in the ball");
  return sup0 + sup1;
}

std::vector<ScLimitMember> sc_limit_family(
    const OperatorSpec& F, const std::function<double(const Vec&)>& g,
    const std::vector<double>& deltas,
    const std::function<double(const Vec&)>& boundary,
    const ScLimitConfig& cfg) {
  if (deltas.empty()) return {};
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw constraint_error("sc_limit_family: deltas must be >= 0");
  if (!g) throw constraint_error("sc_limit_family: source g is required");
  if (!boundary)
    throw constraint_error("sc_limit_family: boundary data is required");

  std::vector<ScLimitMember> out;
  for (double delta : deltas) {
    ScLimitMember m;
    m.delta = delta;
    ProblemSpec prob;
    prob.dim = 2;
    prob.F = F;
    prob.H = DegeneracySpec::pure_power(delta);
    prob.f = g;
    prob.boundary = boundary;
    prob.lo = cfg.lo;
    prob.hi = cfg.hi;
    SolveConfig scfg;
    scfg.n = cfg.n;
    scfg.tol = cfg.tol;
    // At delta = 0 the regularization is inert, so one stage suffices.
    scfg.eps_schedule = delta == 0.0
                            ? std::vector<double>{cfg.eps_schedule.back()}
                            : cfg.eps_schedule;
    scfg.max_iters_per_stage = cfg.max_iters_per_stage;
    try {
      SolveResult r = solve_dirichlet(prob, scfg);
      m.u = std::move(r.u);
      m.residual = r.diag.final_residual;
      m.status = "ok";
    } catch (const convergence_error& ex) {
      m.residual = ex.diag.final_residual;
      m.status = "convergence_error";
    } catch (const blowup_error& ex) {
      m.residual = ex.diag.final_residual;
      m.status = "blowup_error";
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace degen
