#include "degen/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace degen {

ModulusOfContinuity ModulusOfContinuity::power(double s) {
  if (!(s > 0.0)) throw domain_error("modulus exponent must be positive");
  return ModulusOfContinuity{[s](double t) { return std::pow(t, s); },
                             "power:" + std::to_string(s)};
}

double ModulusOfContinuity::inverse(double y) const {
  if (!(y > 0.0)) return 0.0;
  if (fn(1.0) <= y) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (fn(mid) <= y ? lo : hi) = mid;
  }
  return lo;
}

OperatorSpec OperatorSpec::trace() {
  OperatorSpec s;
  s.kind = OperatorKind::Trace;
  return s;
}

OperatorSpec OperatorSpec::pucci_minus(double lambda, double Lambda) {
  if (!(0.0 < lambda && lambda <= Lambda)) throw domain_error("need 0 < lambda <= Lambda");
  OperatorSpec s;
  s.kind = OperatorKind::PucciMinus;
  s.ell = {lambda, Lambda};
  return s;
}

OperatorSpec OperatorSpec::pucci_plus(double lambda, double Lambda) {
  OperatorSpec s = pucci_minus(lambda, Lambda);
  s.kind = OperatorKind::PucciPlus;
  return s;
}

OperatorSpec OperatorSpec::linear_coeff(std::function<SymMat(const Vec&)> coeff,
                                        EllipticityParams ell,
                                        std::optional<ModulusOfContinuity> omega,
                                        double omega_norm) {
  if (!coeff) throw domain_error("linear_coeff requires a coefficient function");
  if (!(0.0 < ell.lambda && ell.lambda <= ell.Lambda)) throw domain_error("need 0 < lambda <= Lambda");
  OperatorSpec s;
  s.kind = OperatorKind::LinearCoeff;
  s.ell = ell;
  s.coeff = std::move(coeff);
  s.omega = std::move(omega);
  s.omega_norm = omega_norm;
  return s;
}

OperatorSpec OperatorSpec::min_of_linears(std::vector<SymMat> members, EllipticityParams ell) {
  if (members.empty()) throw domain_error("min_of_linears requires at least one member");
  if (!(0.0 < ell.lambda && ell.lambda <= ell.Lambda)) throw domain_error("need 0 < lambda <= Lambda");
  for (const auto& m : members) {
    auto e = m.eigenvalues2();
    if (e[0] < ell.lambda - 1e-12 || e[1] > ell.Lambda + 1e-12)
      throw domain_error("member eigenvalues fall outside [lambda, Lambda]");
  }
  OperatorSpec s;
  s.kind = OperatorKind::MinOfLinears;
  s.ell = ell;
  s.members = std::move(members);
  return s;
}

OperatorSpec OperatorSpec::infinity() {
  OperatorSpec s;
  s.kind = OperatorKind::Infinity;
  return s;
}

OperatorSpec OperatorSpec::p_nondiv(double p) {
  if (!(p >= 2.0)) throw domain_error("p_nondiv requires p >= 2");
  OperatorSpec s;
  s.kind = OperatorKind::PNondiv;
  s.p = p;
  return s;
}

double eval_F(const OperatorSpec& F, const Vec& X, const SymMat& M) {
  if (!all_finite(M)) throw domain_error("non-finite matrix entries");
  switch (F.kind) {
    case OperatorKind::Trace:
      return M.trace();
    case OperatorKind::PucciMinus:
    case OperatorKind::PucciPlus: {
      auto e = M.eigenvalues2();
      double pos = 0.0, neg = 0.0;
      int count = M.dim == 1 ? 1 : 2;
      for (int i = 0; i < count; ++i) {
        if (e[static_cast<size_t>(i)] > 0)
          pos += e[static_cast<size_t>(i)];
        else
          neg += e[static_cast<size_t>(i)];
      }
      if (F.kind == OperatorKind::PucciMinus) return F.ell.lambda * pos + F.ell.Lambda * neg;
      return F.ell.Lambda * pos + F.ell.lambda * neg;
    }
    case OperatorKind::LinearCoeff:
      return F.coeff(X).inner(M);
    case OperatorKind::MinOfLinears: {
      double best = F.members.front().inner(M);
      for (size_t k = 1; k < F.members.size(); ++k) best = std::min(best, F.members[k].inner(M));
      return best;
    }
    case OperatorKind::Infinity:
    case OperatorKind::PNondiv:
      throw domain_error("gradient-dependent operator kind; use the jet-based evaluators");
  }
  throw domain_error("unknown operator kind");
}

EllipticityParams declared_ellipticity(const OperatorSpec& F, int dim) {
  switch (F.kind) {
    case OperatorKind::Trace:
      return {1.0, static_cast<double>(dim)};
    case OperatorKind::PucciMinus:
    case OperatorKind::PucciPlus:
    case OperatorKind::LinearCoeff:
    case OperatorKind::MinOfLinears:
      return {F.ell.lambda, dim * F.ell.Lambda};
    case OperatorKind::Infinity:
    case OperatorKind::PNondiv:
      throw domain_error("gradient-dependent kinds have no matrix ellipticity constants");
  }
  throw domain_error("unknown operator kind");
}

DegeneracySpec DegeneracySpec::pure_power(double gamma) {
  if (!(gamma >= 0.0)) throw domain_error("gamma must be >= 0");
  return DegeneracySpec{gamma, 1.0, 1.0, nullptr};
}

DegeneracySpec DegeneracySpec::modulated(double gamma, std::function<double(const Vec&)> c,
                                         double lambda, double Lambda) {
  if (!(gamma >= 0.0)) throw domain_error("gamma must be >= 0");
  if (!c) throw domain_error("modulated law requires a coefficient function");
  if (!(0.0 < lambda && lambda <= Lambda)) throw domain_error("need 0 < lambda <= Lambda");
  return DegeneracySpec{gamma, lambda, Lambda, std::move(c)};
}

double eval_H(const DegeneracySpec& H, const Vec& X, const Vec& p) {
  double base = half_power(p.norm2(), H.gamma);
  return H.c ? H.c(X) * base : base;
}

double eval_H_eps(const DegeneracySpec& H, const Vec& X, const Vec& p, double eps) {
  double base = half_power(eps * eps + p.norm2(), H.gamma);
  return H.c ? H.c(X) * base : base;
}

double infinity_laplacian(const Jet& jet) { return jet.hess.quad(jet.grad); }

double p_laplacian_nondiv(const Jet& jet, double p) {
  if (!(p >= 2.0)) throw domain_error("p_laplacian_nondiv requires p >= 2");
  double tr = jet.hess.trace();
  if (p == 2.0) return tr;
  double g2 = jet.grad.norm2();
  if (g2 == 0.0) return 0.0;
  // |g|^(p-4) (|g|^2 tr + (p-2) g^T M g): algebraically the textbook split,
  // but finite for 2 < p < 4 as |g| -> 0.
  return std::pow(g2, 0.5 * (p - 4.0)) * (g2 * tr + (p - 2.0) * infinity_laplacian(jet));
}

double equation_residual(const OperatorSpec& F, const DegeneracySpec& H,
                         const std::function<double(const Vec&)>& f, const Jet& jet, const Vec& X,
                         double eps) {
  return eval_H_eps(H, X, jet.grad, eps) * eval_F(F, X, jet.hess) - f(X);
}

Jet fd_jet(const ScalarField& u, long index) {
  const Grid& g = u.grid;
  const double h = g.h, h2 = h * h;
  Jet jet;
  if (g.dim == 1) {
    int i = static_cast<int>(index);
    if (i < 1 || i > g.n - 2) throw stencil_error("index too close to the boundary for central differences");
    jet.value = u[i];
    jet.grad = Vec::make((u[i + 1] - u[i - 1]) / (2 * h));
    jet.hess = SymMat::zero(1);
    jet.hess.set(0, 0, (u[i + 1] - 2 * u[i] + u[i - 1]) / h2);
    return jet;
  }
  int ix = static_cast<int>(index % g.n), iy = static_cast<int>(index / g.n);
  if (ix < 1 || ix > g.n - 2 || iy < 1 || iy > g.n - 2)
    throw stencil_error("index too close to the boundary for central differences");
  auto at = [&](int dx, int dy) { return u[g.index2(ix + dx, iy + dy)]; };
  jet.value = at(0, 0);
  jet.grad = Vec::make((at(1, 0) - at(-1, 0)) / (2 * h), (at(0, 1) - at(0, -1)) / (2 * h));
  jet.hess = SymMat::zero(2);
  jet.hess.set(0, 0, (at(1, 0) - 2 * at(0, 0) + at(-1, 0)) / h2);
  jet.hess.set(1, 1, (at(0, 1) - 2 * at(0, 0) + at(0, -1)) / h2);
  jet.hess.set(0, 1, (at(1, 1) + at(-1, -1) - at(1, -1) - at(-1, 1)) / (4 * h2));
  return jet;
}

namespace {

Vec random_in_ball(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Vec x = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    if (x.norm2() <= 1.0) return x;
  }
}

SymMat random_sym(std::mt19937_64& rng, int dim, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymMat m = SymMat::zero(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m.set(i, j, u(rng));
  return m;
}

// P = Q diag(D) Q^T with D >= 0; returns P and ||P|| = max D.
std::pair<SymMat, double> random_psd(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (dim == 1) {
    double d = u(rng);
    SymMat p = SymMat::zero(1);
    p.set(0, 0, d);
    return {p, d};
  }
  double d1 = u(rng), d2 = u(rng);
  std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
  double t = ang(rng), ct = std::cos(t), st = std::sin(t);
  SymMat p = SymMat::zero(2);
  p.set(0, 0, ct * ct * d1 + st * st * d2);
  p.set(1, 1, st * st * d1 + ct * ct * d2);
  p.set(0, 1, ct * st * (d1 - d2));
  return {p, std::max(d1, d2)};
}

}  // namespace

EllipticityReport check_ellipticity(const OperatorSpec& F, int dim, long trials, uint64_t seed) {
  EllipticityParams eff = declared_ellipticity(F, dim);
  std::mt19937_64 rng(seed);
  EllipticityReport rep;
  rep.lambda_eff = eff.lambda;
  rep.Lambda_eff = eff.Lambda;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  for (long t = 0; t < trials; ++t) {
    Vec X = random_in_ball(rng, dim);
    SymMat M = random_sym(rng, dim, 2.0);
    auto [P, norm] = random_psd(rng, dim);
    if (norm < 1e-12) continue;  // division guard: P ~ 0 excluded
    double ratio = (eval_F(F, X, M + P) - eval_F(F, X, M)) / norm;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.trials;
  }
  rep.pass = rep.trials > 0 && rep.min_ratio >= eff.lambda - 1e-9 && rep.max_ratio <= eff.Lambda + 1e-9;
  return rep;
}

double omega_norm_estimate(const OperatorSpec& F, const ModulusOfContinuity& omega, int dim,
                           long sample_count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (long t = 0; t < sample_count; ++t) {
    Vec X = random_in_ball(rng, dim);
    Vec Y = random_in_ball(rng, dim);
    double dist = (X - Y).norm();
    if (dist < 1e-12) continue;
    SymMat M = random_sym(rng, dim, 1.0);
    double norm = M.spectral_norm();
    if (norm < 1e-12) continue;
    double osc = std::abs(eval_F(F, X, M) - eval_F(F, Y, M));
    best = std::max(best, osc / (norm * omega(dist)));
  }
  return best;
}

}  // namespace degen
