#pragma once
// Second-order operators F(X, M), gradient degeneracy laws H(X, p), their
// regularized variants, finite-difference jets, and empirical checks of the
// structure conditions (ellipticity ratios, coefficient oscillation).

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "degen/grid.hpp"

namespace degen {

/// Increasing modulus with omega(0+) = 0 and omega(1) = 1.
struct ModulusOfContinuity {
  std::function<double(double)> fn;
  std::string name;

  static ModulusOfContinuity power(double s);
  double operator()(double t) const { return fn(t); }
  /// Largest t in [0,1] with omega(t) <= y, found by bisection to 1e-12.
  /// y >= omega(1) returns 1 (capped).
  double inverse(double y) const;
};

struct EllipticityParams {
  double lambda = 1.0;
  double Lambda = 1.0;
};

enum class OperatorKind { Trace, PucciMinus, PucciPlus, LinearCoeff, MinOfLinears, Infinity, PNondiv };

/// Descriptor for F(X, M).  Trace, Pucci and the linear families are
/// matrix-kind (evaluable via eval_F); Infinity and PNondiv depend on the
/// gradient and are evaluated through their jet-based functions instead.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::Trace;
  EllipticityParams ell{1.0, 1.0};
  std::function<SymMat(const Vec&)> coeff;  // LinearCoeff: X -> a(X)
  std::vector<SymMat> members;              // MinOfLinears: constant coefficient matrices
  double p = 2.0;                           // PNondiv exponent
  // Declared oscillation data for X-dependent coefficients.
  std::optional<ModulusOfContinuity> omega;
  double omega_norm = 0.0;

  static OperatorSpec trace();
  static OperatorSpec pucci_minus(double lambda, double Lambda);
  static OperatorSpec pucci_plus(double lambda, double Lambda);
  static OperatorSpec linear_coeff(std::function<SymMat(const Vec&)> coeff, EllipticityParams ell,
                                   std::optional<ModulusOfContinuity> omega = {},
                                   double omega_norm = 0.0);
  /// Members must be symmetric with eigenvalues in [lambda, Lambda].
  static OperatorSpec min_of_linears(std::vector<SymMat> members, EllipticityParams ell);
  static OperatorSpec infinity();
  static OperatorSpec p_nondiv(double p);

  bool matrix_kind() const {
    return kind != OperatorKind::Infinity && kind != OperatorKind::PNondiv;
  }
};

/// Evaluates a matrix-kind operator; normalized so F(X, 0) = 0.
/// Gradient-dependent kinds throw domain_error.
double eval_F(const OperatorSpec& F, const Vec& X, const SymMat& M);

/// Effective (lambda, Lambda) for increments measured against the spectral
/// norm of P: trace is (1, d); Pucci and the linear families are
/// (lambda, d*Lambda).
EllipticityParams declared_ellipticity(const OperatorSpec& F, int dim);

/// Gradient degeneracy law H(X, p) with lambda |p|^gamma <= H <= Lambda |p|^gamma.
struct DegeneracySpec {
  double gamma = 0.0;
  double lambda = 1.0;
  double Lambda = 1.0;
  std::function<double(const Vec&)> c;  // empty: pure power |p|^gamma

  static DegeneracySpec pure_power(double gamma);
  /// H(X, p) = c(X) |p|^gamma with lambda <= c <= Lambda required.
  static DegeneracySpec modulated(double gamma, std::function<double(const Vec&)> c, double lambda,
                                  double Lambda);
};

/// q^(gamma/2) for q >= 0 with the common exponents short-circuited; the
/// building block of the power laws (q is a squared magnitude).
inline double half_power(double q, double gamma) {
  if (gamma == 0.0) return 1.0;
  if (gamma == 1.0) return std::sqrt(q);
  if (gamma == 2.0) return q;
  return std::pow(q, 0.5 * gamma);
}

/// |p|^gamma convention: gamma = 0 gives 1 for every p, including p = 0.
double eval_H(const DegeneracySpec& H, const Vec& X, const Vec& p);

/// Regularized law (eps^2 + |p|^2)^(gamma/2) [* c(X)]; smooth in p for eps > 0.
double eval_H_eps(const DegeneracySpec& H, const Vec& X, const Vec& p, double eps);

/// g^T M g.  Works for dim <= 3.
double infinity_laplacian(const Jet& jet);

/// |g|^(p-2) tr M + (p-2) |g|^(p-4) g^T M g, evaluated through the combined
/// form |g|^(p-4) (|g|^2 tr M + (p-2) g^T M g) so p in (2,4) stays finite as
/// g -> 0.  p = 2 reduces to the trace for any jet; p > 2 with g = 0 gives 0.
double p_laplacian_nondiv(const Jet& jet, double p);

/// H_eps(X, grad) * F(X, hess) - f(X).
double equation_residual(const OperatorSpec& F, const DegeneracySpec& H,
                         const std::function<double(const Vec&)>& f, const Jet& jet, const Vec& X,
                         double eps);

/// Central-difference jet at an interior grid index (>= 1 cell from the
/// boundary in every axis); boundary-adjacent indices throw stencil_error.
/// Gradient and pure second differences are O(h^2); the 2D mixed term uses
/// the four-corner stencil.
Jet fd_jet(const ScalarField& u, long index);

struct EllipticityReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double lambda_eff = 0.0;
  double Lambda_eff = 0.0;
  long trials = 0;
  bool pass = false;
};

/// Samples random (X, M, P >= 0), P = Q diag(D) Q^T, and checks
/// (F(X, M+P) - F(X, M)) / ||P|| against the declared effective constants.
EllipticityReport check_ellipticity(const OperatorSpec& F, int dim, long trials, uint64_t seed);

/// Empirical sup of |F(X,M) - F(Y,M)| / (||M|| omega(|X-Y|)) over random
/// X, Y in the unit ball and random ||M|| <= 1.  Lower bound of the true
/// oscillation constant; grows toward it with sample_count.
double omega_norm_estimate(const OperatorSpec& F, const ModulusOfContinuity& omega, int dim,
                           long sample_count, uint64_t seed);

}  // namespace degen
