#include "degen/scaling.hpp"

#include <cmath>
#include <random>

namespace degen {
namespace {

// Intrinsic gradient order of the operator itself (on top of the H factor).
double gradient_order(const OperatorSpec& F) {
  switch (F.kind) {
    case OperatorKind::Infinity:
      return 2.0;
    case OperatorKind::PNondiv:
      return F.p - 2.0;
    default:
      return 0.0;
  }
}

void validate_params(const ProblemSpec& prob, const ScalingParams& s) {
  if (!(s.eta > 0.0 && s.eta <= 1.0))
    throw mapping_error("scaling: eta must lie in (0, 1]");
  if (!(s.tau > 0.0) || !std::isfinite(s.tau))
    throw mapping_error("scaling: tau must be positive");
  if (s.Y0.dim != prob.dim)
    throw mapping_error("scaling: Y0 dimension mismatch");
  for (int i = 0; i < prob.dim; ++i) {
    double mapped_lo = s.eta * prob.lo + s.Y0.c[i];
    double mapped_hi = s.eta * prob.hi + s.Y0.c[i];
    if (mapped_lo < prob.lo - 1e-12 || mapped_hi > prob.hi + 1e-12)
      throw mapping_error("scaling: zoom leaves the domain along axis " +
                          std::to_string(i));
  }
}

Vec map_point(const ScalingParams& s, const Vec& X) {
  return s.eta * X + s.Y0;
}

}  // namespace

ScalingParams compose(const ScalingParams& first, const ScalingParams& second) {
  ScalingParams out;
  out.eta = first.eta * second.eta;
  out.tau = first.tau * second.tau;
  out.Y0 = first.eta * second.Y0 + first.Y0;
  return out;
}

ProblemSpec scale_problem(const ProblemSpec& prob, const ScalingParams& s) {
  validate_params(prob, s);
  ProblemSpec out = prob;
  const double q = gradient_order(prob.F);
  const double kappa = std::pow(s.eta, prob.H.gamma + q + 2.0) /
                       std::pow(s.tau, prob.H.gamma + q + 1.0);

  if (prob.F.kind == OperatorKind::LinearCoeff) {
    auto coeff = prob.F.coeff;
    out.F.coeff = [coeff, s](const Vec& X) { return coeff(map_point(s, X)); };
  }
  if (prob.H.c) {
    auto c = prob.H.c;
    out.H.c = [c, s](const Vec& X) { return c(map_point(s, X)); };
  }
  if (prob.f) {
    auto f = prob.f;
    out.f = [f, s, kappa](const Vec& X) { return kappa * f(map_point(s, X)); };
  }
  if (prob.boundary) {
    auto bnd = prob.boundary;
    double tau = s.tau;
    out.boundary = [bnd, s, tau](const Vec& X) {
      return bnd(map_point(s, X)) / tau;
    };
  }
  return out;
}

ScalingParams normalization_params(const ProblemSpec& prob,
                                   const ScalarField& v, double eps0) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0))
    throw constraint_error("normalization_params: eps0 must be positive");
  double vsup = 0.0;
  for (double x : v.values) vsup = std::max(vsup, std::fabs(x));
  double fsup = 0.0;
  if (prob.f) {
    for (long k = 0; k < v.grid.npoints(); ++k)
      fsup = std::max(fsup, std::fabs(prob.f(v.grid.coord(k))));
  }
  ScalingParams s;
  s.tau = std::max(1.0, vsup);
  s.eta = 1.0;
  if (fsup > 0.0)
    s.eta = std::min(
        s.eta, prob.H.lambda *
                   std::pow(eps0 / fsup, 1.0 / (prob.H.gamma + 2.0)));
  if (prob.F.omega && prob.F.omega_norm > 0.0)
    s.eta = std::min(s.eta, prob.F.omega->inverse(eps0 / prob.F.omega_norm));
  s.Y0 = Vec::zero(prob.dim);
  return s;
}

ScalingCheck verify_scaling(const ProblemSpec& prob, const ScalingParams& s,
                            long trials, uint64_t seed) {
  if (trials < 1) throw constraint_error("verify_scaling: need trials >= 1");
  if (!prob.f)
    throw constraint_error("verify_scaling: the problem needs a source term");
  ProblemSpec scaled = scale_problem(prob, s);
  const double q = gradient_order(prob.F);
  const double kappa = std::pow(s.eta, prob.H.gamma + q + 2.0) /
                       std::pow(s.tau, prob.H.gamma + q + 1.0);
  const double kappa_wrong = kappa / s.eta;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  const int d = prob.dim;

  ScalingCheck rep;
  rep.trials = trials;
  bool op_ok = scaled.F.kind == prob.F.kind && scaled.F.p == prob.F.p &&
               scaled.H.gamma == prob.H.gamma &&
               scaled.H.lambda == prob.H.lambda &&
               scaled.H.Lambda == prob.H.Lambda;

  for (long t = 0; t < trials; ++t) {
    Vec X = Vec::zero(d);
    for (int i = 0; i < d; ++i) X.c[i] = unit(rng);
    Vec Y = map_point(s, X);

    Jet Jv;
    Jv.grad = Vec::zero(d);
    for (int i = 0; i < d; ++i) Jv.grad.c[i] = amp(rng);
    Jv.hess = SymMat::zero(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) Jv.hess.set(i, j, amp(rng));

    // Chain rule back to the original frame.
    Jet Ju;
    Ju.grad = (s.tau / s.eta) * Jv.grad;
    Ju.hess = (s.tau / (s.eta * s.eta)) * Jv.hess;

    double rv = equation_residual(scaled, Jv, X, 0.0);
    double ru = equation_residual(prob, Ju, Y, 0.0);
    double denom = std::max(1.0, std::fabs(kappa * ru));
    rep.conjugation_error = std::max(
        rep.conjugation_error, std::fabs(rv - kappa * ru) / denom);
    rep.control_error = std::max(
        rep.control_error, std::fabs(rv - kappa_wrong * ru) / denom);

    // Degeneracy window of the transformed law.
    double hval = eval_H(scaled.H, X, Jv.grad);
    double powg = half_power(Jv.grad.norm2(), scaled.H.gamma);
    if (hval < scaled.H.lambda * powg - 1e-12 ||
        hval > scaled.H.Lambda * powg + 1e-12)
      ++rep.H_violations;

    // Composed coefficients must agree with the original at mapped points.
    if (prob.F.kind == OperatorKind::LinearCoeff) {
      if (eval_F(scaled.F, X, Jv.hess) != eval_F(prob.F, Y, Jv.hess))
        op_ok = false;
    } else if (prob.F.matrix_kind()) {
      if (eval_F(scaled.F, X, Jv.hess) != eval_F(prob.F, X, Jv.hess))
        op_ok = false;
    }
    if (prob.H.c && scaled.H.c(X) != prob.H.c(Y)) op_ok = false;
  }

  rep.operator_consistent = op_ok;
  if (prob.F.matrix_kind()) {
    EllipticityReport er = check_ellipticity(scaled.F, d, 200, seed ^ 0x9e3779b97f4a7c15ull);
    rep.ellipticity_preserved = er.pass;
  } else {
    rep.ellipticity_preserved = true;  // no matrix window to preserve
  }

  const bool control_meaningful = std::fabs(s.eta - 1.0) > 1e-12;
  const double conj_tol = 1e-10;
  rep.pass = rep.conjugation_error <= conj_tol && rep.H_violations == 0 &&
             rep.ellipticity_preserved && rep.operator_consistent &&
             (!control_meaningful ||
              rep.control_error > 100.0 * std::max(rep.conjugation_error, 1e-14));
  return rep;
}

}  // namespace degen
