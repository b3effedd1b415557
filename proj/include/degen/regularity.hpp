#pragma once
// Measurement side of the laboratory: sup-norm affine approximation on
// shrinking balls, decay-exponent extraction, degenerate-set detection, and
// the constant bookkeeping of the improvement-of-flatness scheme.

#include <string>
#include <vector>

#include "degen/grid.hpp"
#include "degen/solver.hpp"

namespace degen {

struct AffineFitResult {
  AffineFn fit;  // global frame: fit(X) = a + <b, X>
  double max_error = 0.0;
  int rounds = 0;  // reweighting rounds actually used
  long points = 0;
};

/// Minimax affine approximation of u on the grid ball: least squares
/// followed by Lawson reweighting, keeping the best iterate seen, so the
/// result never exceeds the plain least-squares sup error.  Throws
/// underdetermined_fit_error when the ball carries fewer than dim+2 nodes.
AffineFitResult best_affine_fit(const ScalarField& u, const Vec& center,
                                double radius);

struct DecayLevel {
  int k = 0;
  double radius = 0.0;
  double a = 0.0;  // fit value at the center
  Vec b = Vec::zero(1);
  double E = 0.0;  // sup |u - fit| on the ball
  long points = 0;
};

struct DecayReport {
  Vec center = Vec::zero(1);
  double rho0 = 0.5;
  std::vector<DecayLevel> levels;
  double alpha_hat = 0.0;  // slope of log E against log radius, minus one
  double C0_hat = 0.0;     // sup_k coefficient drift / radius^(1+alpha_hat)
  double fit_residual = 0.0;  // worst log-space deviation from the slope line
  bool saturated = false;  // some levels sat on the rounding floor
  bool truncated = false;  // ran out of nodes before the requested depth
};

/// Fits affine approximations on balls of radius rho0^k, k = 0..K-1, and
/// extracts the gradient Hoelder exponent from the sup-error decay.  Levels
/// whose error is at rounding-noise scale are excluded from the slope;
/// at least two usable levels are required.
DecayReport dyadic_decay(const ScalarField& u, const Vec& center, double rho0,
                         int K);

/// Interior nodes where the central-difference gradient has length at most
/// threshold; threshold < 0 selects the grid spacing h.
std::vector<long> singular_set(const ScalarField& u, double threshold = -1.0);

struct ProofConstants {
  double C_univ = 0.0;  // inputs, recorded for downstream checks
  double alpha0 = 0.0;
  double alpha = 0.0;
  double rho0 = 0.0;
  double delta = 0.0;
  double C_final = 0.0;
  bool rho0_capped = false;  // formula exceeded 1/2 and was clamped
};

/// Quantifiers of the iteration step: rho0 = (1/(2C))^(1/(alpha0-alpha))
/// clamped to at most 1/2, delta = rho0^(1+alpha)/2, and the final constant
/// rho0^-(1+alpha) (1 + C0/(1-rho0)).  Requires 0 < alpha < alpha0 <= 1.
ProofConstants proof_constants(double C, double alpha0, double alpha,
                               double C0 = 1.0);

struct FlatnessReport {
  double E = 0.0;          // best affine sup distance on the rho0 ball
  double coef_size = 0.0;  // |a| + |b| of the fit, centered frame
  bool flat = false;           // E <= rho0^(1+alpha)
  bool coef_bounded = false;   // coef_size <= C_univ
  bool not_normalized = false; // sup |u| on the unit ball exceeds 1
  bool pass = false;
};

/// One improvement step verified on data: does the best affine fit on the
/// rho0 ball stay within rho0^(1+alpha), with universally bounded
/// coefficients, for a unit-normalized field?
FlatnessReport flatness_check(const ScalarField& u, const Vec& center,
                              double rho0, double alpha, double C_univ);

/// Same audit driven by a constants bundle (its rho0, alpha, C_univ).
FlatnessReport flatness_check(const ScalarField& u, const Vec& center,
                              const ProofConstants& pc);

struct TableConfig {
  int dim = 1;
  int n = 2049;
  double rho0 = 0.5;
  int K = 8;
  // relaxation controls (dim 2 only)
  double tol = 1e-5;
  std::vector<double> eps_schedule = {1e-1, 3e-2, 1e-2};
  long max_iters_per_stage = 10'000'000;
};

struct TableRow {
  double gamma = 0.0;
  double alpha_hat = 0.0;
  double alpha_theory = 0.0;  // 1/(1+gamma)
  double abs_err = 0.0;
  double solver_residual = 0.0;
  std::string status;  // "ok" or the failure kind
};

/// Measured exponent against 1/(1+gamma) across the degeneracy family, on
/// the model problem with the exact profile as boundary data.  dim 1 rows
/// use the first-integral solver (residual column: shooting gap); dim 2 rows
/// use the relaxation solver (residual column: certified equation residual).
/// Per-row failures are recorded in status, not thrown.
std::vector<TableRow> exponent_vs_gamma_table(const std::vector<double>& gammas,
                                              const TableConfig& cfg);

}  // namespace degen
