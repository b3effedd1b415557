#pragma once
// Dirichlet solver for H(X, grad u) F(X, D^2 u) = f by explicit continuation
// in the gradient regularization, plus an independent first-integral solver
// for the one-dimensional profile equation and the vanishing-degeneracy
// family driver.

#include <string>
#include <vector>

#include "degen/grid.hpp"
#include "degen/operators.hpp"

namespace degen {

struct ProblemSpec {
  int dim = 2;
  OperatorSpec F = OperatorSpec::trace();
  DegeneracySpec H = DegeneracySpec::pure_power(0.0);
  std::function<double(const Vec&)> f;
  std::function<double(const Vec&)> boundary;
  double lo = -1.0;
  double hi = 1.0;
};

struct SolveConfig {
  int n = 65;
  double tol = 1e-6;
  // Continuation in eps; every stage is iterated to tol, warm-starting the
  // next.  Values below ~sqrt(h) trade regularization error for a sharpening
  // kink defect at degenerate points, so the default stops at 1e-2.
  std::vector<double> eps_schedule = {1e-1, 3e-2, 1e-2};
  double dt_factor = 0.9;
  long max_iters_per_stage = 10'000'000;

  static SolveConfig defaults_for(int dim);
};

struct StageInfo {
  double eps = 0.0;
  long iterations = 0;
  double residual = 0.0;
};

struct SolveDiagnostics {
  long total_iterations = 0;
  double final_residual = 0.0;
  double eps_final = 0.0;
  // Sweeps whose sup residual rose relative to the previous sweep of the
  // same stage; persistent growth indicates a time step violation.
  long monotone_violations = 0;
  std::vector<StageInfo> stages;
};

struct convergence_error : error {
  SolveDiagnostics diag;
  convergence_error(const std::string& what, SolveDiagnostics d)
      : error(what), diag(std::move(d)) {}
};

struct blowup_error : error {
  SolveDiagnostics diag;
  blowup_error(const std::string& what, SolveDiagnostics d)
      : error(what), diag(std::move(d)) {}
};

struct SolveResult {
  ScalarField u;
  SolveDiagnostics diag;
};

/// Boundary-exact initial iterate: endpoint interpolation in 1d, the
/// transfinite boundary blend in 2d.
ScalarField initial_guess(const Grid& g,
                          const std::function<double(const Vec&)>& boundary);

/// Residual of the regularized equation at one grid jet.  Matrix operator
/// kinds evaluate H_eps(grad) F(D2) - f; the gradient-carrying kinds
/// (infinity Laplacian, p-Laplacian) use their own jet evaluators under the
/// same H_eps factor.
double equation_residual(const ProblemSpec& prob, const Jet& jet, const Vec& X,
                         double eps);

/// Central-difference residual at every interior node (boundary rows are 0).
ScalarField residual_field(const ProblemSpec& prob, const ScalarField& u,
                           double eps);

/// Runs the continuation.  Throws convergence_error when a stage exhausts
/// its iteration budget and blowup_error on non-finite iterates; both carry
/// the diagnostics collected so far.
SolveResult solve_dirichlet(const ProblemSpec& prob, const SolveConfig& cfg);

/// Solves |u'|^gamma u'' = f on [a,b] with u(a)=ua, u(b)=ub by reducing to
/// the first integral of sign(p)|p|^(1+gamma)/(1+gamma) and shooting on the
/// initial slope.  Requires f > 0 on [a,b]; no regularization parameter is
/// involved.  Throws shooting_error when no bracketing slope exists.
/// shooting_gap, when given, receives |u(b) - ub| before the endpoint is
/// pinned to the data.
ScalarField solve_ode_bvp(double gamma, const std::function<double(double)>& f,
                          double a, double b, double ua, double ub, int n,
                          double* shooting_gap = nullptr);

/// sup |u - v| + sup |grad_h u - grad_h v| over interior nodes of the ball.
double c1_distance(const ScalarField& u, const ScalarField& v,
                   const Vec& center, double radius);

struct ScLimitConfig {
  int n = 65;
  double tol = 1e-5;
  std::vector<double> eps_schedule = {3e-2, 1e-2};
  long max_iters_per_stage = 10'000'000;
  double lo = -1.0;
  double hi = 1.0;
};

struct ScLimitMember {
  double delta = 0.0;
  ScalarField u;          // empty values on failure
  double residual = 0.0;  // certified residual, or last seen before failing
  std::string status;     // "ok" or the failure kind
};

/// Solves |grad u|^delta F(D^2 u) = g for each delta with one shared
/// Dirichlet boundary, in the given order (callers pass strictly decreasing
/// lists for the vanishing-degeneracy experiment; delta = 0 is the plain
/// F(D^2 u) = g member).  Failures of individual members are recorded in the
/// member status instead of aborting the family.  Empty deltas give an empty
/// family.
std::vector<ScLimitMember> sc_limit_family(
    const OperatorSpec& F, const std::function<double(const Vec&)>& g,
    const std::vector<double>& deltas,
    const std::function<double(const Vec&)>& boundary,
    const ScLimitConfig& cfg);

}  // namespace degen
