#pragma once
// Closed-form solutions with known Hoelder-gradient exponents, used as
// ground truth: profile solutions of the degenerate model equations,
// infinity-harmonic examples, and p-Laplacian profiles.  Every factory
// self-checks its defining equation at construction.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "degen/grid.hpp"

namespace degen {

/// Bivariate polynomial sum of c * x^i * y^j terms.
struct Polynomial2D {
  struct Term {
    double c;
    int i;
    int j;
  };
  std::vector<Term> terms;

  static Polynomial2D zero() { return {}; }
  double eval(const Vec& X) const;
  Vec grad(const Vec& X) const;
  SymMat hess(const Vec& X) const;
  int min_total_degree() const;  // large sentinel when empty
};

/// A known solution: value everywhere, gradient everywhere (these examples
/// are C^1), full jet away from the singular set, and the expected gradient
/// Hoelder exponent.
struct ExactSolution {
  std::string name;
  int dim = 1;
  double alpha_expected = 1.0;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> gradient;
  /// Full jet; empty where second derivatives blow up.
  std::function<std::optional<Jet>(const Vec&)> jet;
  /// Distance to the set where the jet is unavailable (+inf if none).
  std::function<double(const Vec&)> singular_distance;
  std::vector<Vec> singular_points;  // representatives
  /// |defining equation residual| at a regular point; empty when the family
  /// member has no pinned right-hand side.
  std::function<double(const Vec&)> defining_residual;
};

/// u(t) = c |t|^beta solving |u'|^delta u'' = 1 on the line,
/// beta = (2+delta)/(1+delta), c = beta^-1 (beta-1)^(-1/(1+delta)).
ExactSolution ode_profile(double delta);

/// u(X) = c |X|^beta solving |grad u|^gamma Lap u = 1 in d dimensions,
/// beta = (2+gamma)/(1+gamma), c = beta^-1 (beta+d-2)^(-1/(1+gamma)).
ExactSolution radial_profile(double gamma, int d);

/// u(x,y) = |x|^(4/3) - |y|^(4/3); infinity-harmonic off the axes with
/// gradient exponent exactly 1/3.  The even |t|^(4/3) convention is used on
/// negative arguments (the signed power fails the equation in mixed-sign
/// quadrants).
ExactSolution aronsson();

/// u(X) = sum_i sigma_i(x_i) with |sigma_i'|^2 sigma_i'' = tau_i and
/// sum tau_i = 0 (constraint_error otherwise):
/// sigma_i(t) = |3 tau_i t + c_i|^(4/3) / (4 tau_i), or c_i t when tau_i = 0.
ExactSolution separable_infinity_harmonic(const std::vector<double>& taus,
                                          const std::vector<double>& consts);

/// u = phi + |X|^q with phi a polynomial of total degree >= 2 in each term
/// and q in (1, 2]; gradient exponent q - 1.
ExactSolution radial_plus_smooth(const Polynomial2D& phi, double q);

/// u = c |X|^(p/(p-1)) normalized so the non-divergence p-Laplacian equals 1
/// off the origin; c = ((p-1)/p) d^(-1/(p-1)).
ExactSolution p_radial_profile(double p, int d);

}  // namespace degen
