#include "degen/oracle.hpp"

#include <cmath>
#include <limits>

#include "degen/operators.hpp"

namespace degen {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSelfCheckTol = 1e-10;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// |t|^q and derivatives of the even power function.
double even_pow(double t, double q) { return std::pow(std::fabs(t), q); }
double even_pow_d1(double t, double q) {
  if (t == 0.0) return 0.0;  // valid for q > 1
  return q * std::copysign(std::pow(std::fabs(t), q - 1.0), t);
}
double even_pow_d2(double t, double q) {
  return q * (q - 1.0) * std::pow(std::fabs(t), q - 2.0);
}

// Deterministic probe points, away from coordinate axes and the unit sphere.
std::vector<Vec> probe_points(int dim) {
  if (dim == 1)
    return {Vec::make(0.37), Vec::make(-0.61), Vec::make(0.83)};
  if (dim == 2)
    return {Vec::make(0.37, -0.52), Vec::make(-0.61, 0.29),
            Vec::make(0.41, 0.47), Vec::make(-0.23, -0.67)};
  return {Vec::make(0.37, -0.52, 0.21), Vec::make(-0.61, 0.29, -0.43),
          Vec::make(0.31, 0.27, -0.19)};
}

// Evaluates the defining residual at regular probe points; a miss means the
// closed form or its jet is wrong, so fail loudly.
void self_check(const ExactSolution& sol) {
  if (!sol.defining_residual) return;
  int checked = 0;
  for (const Vec& X : probe_points(sol.dim)) {
    if (sol.singular_distance(X) < 5e-2) continue;
    double r = sol.defining_residual(X);
    if (!(r <= kSelfCheckTol))
      throw error("oracle self-check failed for " + sol.name + ": residual " +
                  std::to_string(r));
    ++checked;
  }
  if (checked == 0)
    throw error("oracle self-check for " + sol.name + ": no regular probes");
}

// Shared radial construction u = c |X|^m with gradient pinned to 0 at the
// origin.  For m < 2 the Hessian blows up at 0; m = 2 is globally smooth.
ExactSolution radial_power(const std::string& name, int d, double c, double m,
                           double alpha) {
  ExactSolution sol;
  sol.name = name;
  sol.dim = d;
  sol.alpha_expected = alpha;
  sol.eval = [c, m](const Vec& X) { return c * std::pow(X.norm(), m); };
  sol.gradient = [c, m](const Vec& X) {
    double r = X.norm();
    if (r == 0.0) return Vec::zero(X.dim);
    return (c * m * std::pow(r, m - 2.0)) * X;
  };
  bool smooth = (m == 2.0);
  sol.jet = [c, m, smooth](const Vec& X) -> std::optional<Jet> {
    double r = X.norm();
    if (smooth) {
      SymMat H = SymMat::identity(X.dim);
      return Jet{c * r * r, (2.0 * c) * X, 2.0 * c * H};
    }
    if (r == 0.0) return std::nullopt;
    Jet J;
    J.value = c * std::pow(r, m);
    J.grad = (c * m * std::pow(r, m - 2.0)) * X;
    SymMat H = std::pow(r, m - 2.0) * SymMat::identity(X.dim);
    double outer = (m - 2.0) * std::pow(r, m - 4.0);
    for (int i = 0; i < X.dim; ++i)
      for (int j = i; j < X.dim; ++j)
        H.set(i, j, H.at(i, j) + outer * X.c[i] * X.c[j]);
    J.hess = (c * m) * H;
    return J;
  };
  if (smooth) {
    sol.singular_distance = [](const Vec&) { return kInf; };
  } else {
    sol.singular_distance = [](const Vec& X) { return X.norm(); };
    sol.singular_points = {Vec::zero(d)};
  }
  return sol;
}

}  // namespace

double Polynomial2D::eval(const Vec& X) const {
  double s = 0.0;
  for (const Term& t : terms) s += t.c * ipow(X.c[0], t.i) * ipow(X.c[1], t.j);
  return s;
}

Vec Polynomial2D::grad(const Vec& X) const {
  Vec g = Vec::zero(2);
  for (const Term& t : terms) {
    if (t.i > 0) g.c[0] += t.c * t.i * ipow(X.c[0], t.i - 1) * ipow(X.c[1], t.j);
    if (t.j > 0) g.c[1] += t.c * t.j * ipow(X.c[0], t.i) * ipow(X.c[1], t.j - 1);
  }
  return g;
}

SymMat Polynomial2D::hess(const Vec& X) const {
  SymMat H = SymMat::diag2(0.0, 0.0);
  for (const Term& t : terms) {
    if (t.i > 1)
      H.set(0, 0, H.at(0, 0) + t.c * t.i * (t.i - 1) * ipow(X.c[0], t.i - 2) *
                                   ipow(X.c[1], t.j));
    if (t.j > 1)
      H.set(1, 1, H.at(1, 1) + t.c * t.j * (t.j - 1) * ipow(X.c[0], t.i) *
                                   ipow(X.c[1], t.j - 2));
    if (t.i > 0 && t.j > 0)
      H.set(0, 1, H.at(0, 1) + t.c * t.i * t.j * ipow(X.c[0], t.i - 1) *
                                   ipow(X.c[1], t.j - 1));
  }
  return H;
}

int Polynomial2D::min_total_degree() const {
  int m = 1 << 20;
  for (const Term& t : terms) m = std::min(m, t.i + t.j);
  return m;
}

ExactSolution ode_profile(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw domain_error("ode_profile: delta must be finite and >= 0");
  double beta = (2.0 + delta) / (1.0 + delta);
  double c = (1.0 / beta) * std::pow(beta - 1.0, -1.0 / (1.0 + delta));
  ExactSolution sol =
      radial_power("ode_profile", 1, c, beta, 1.0 / (1.0 + delta));
  sol.defining_residual = [sol, delta](const Vec& X) {
    auto J = sol.jet(X);
    if (!J) return kInf;
    double up = J->grad.c[0], upp = J->hess.at(0, 0);
    return std::fabs(std::pow(std::fabs(up), delta) * upp - 1.0);
  };
  self_check(sol);
  return sol;
}

ExactSolution radial_profile(double gamma, int d) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw domain_error("radial_profile: gamma must be finite and >= 0");
  if (d < 1 || d > 2) throw domain_error("radial_profile: dim must be 1 or 2");
  double beta = (2.0 + gamma) / (1.0 + gamma);
  double c =
      (1.0 / beta) * std::pow(beta + d - 2.0, -1.0 / (1.0 + gamma));
  ExactSolution sol =
      radial_power("radial_profile", d, c, beta, 1.0 / (1.0 + gamma));
  sol.defining_residual = [sol, gamma](const Vec& X) {
    auto J = sol.jet(X);
    if (!J) return kInf;
    double lap = J->hess.trace();
    return std::fabs(std::pow(J->grad.norm(), gamma) * lap - 1.0);
  };
  self_check(sol);
  return sol;
}

ExactSolution aronsson() {
  ExactSolution sol;
  sol.name = "aronsson";
  sol.dim = 2;
  sol.alpha_expected = 1.0 / 3.0;
  const double q = 4.0 / 3.0;
  sol.eval = [q](const Vec& X) {
    return even_pow(X.c[0], q) - even_pow(X.c[1], q);
  };
  sol.gradient = [q](const Vec& X) {
    return Vec::make(even_pow_d1(X.c[0], q), -even_pow_d1(X.c[1], q));
  };
  sol.jet = [q](const Vec& X) -> std::optional<Jet> {
    if (X.c[0] == 0.0 || X.c[1] == 0.0) return std::nullopt;
    Jet J;
    J.value = even_pow(X.c[0], q) - even_pow(X.c[1], q);
    J.grad = Vec::make(even_pow_d1(X.c[0], q), -even_pow_d1(X.c[1], q));
    J.hess = SymMat::diag2(even_pow_d2(X.c[0], q), -even_pow_d2(X.c[1], q));
    return J;
  };
  sol.singular_distance = [](const Vec& X) {
    return std::min(std::fabs(X.c[0]), std::fabs(X.c[1]));
  };
  sol.singular_points = {Vec::make(0.0, 0.0), Vec::make(0.5, 0.0),
                         Vec::make(0.0, 0.5)};
  sol.defining_residual = [sol](const Vec& X) {
    auto J = sol.jet(X);
    if (!J) return kInf;
    return std::fabs(infinity_laplacian(*J));
  };
  self_check(sol);
  return sol;
}

ExactSolution separable_infinity_harmonic(const std::vector<double>& taus,
                                          const std::vector<double>& consts) {
  int d = static_cast<int>(taus.size());
  if (d < 1 || d > 3)
    throw constraint_error("separable: need 1 to 3 coordinates");
  if (consts.size() != taus.size())
    throw constraint_error("separable: taus/consts size mismatch");
  double s = 0.0;
  for (double t : taus) {
    if (!std::isfinite(t)) throw constraint_error("separable: tau not finite");
    s += t;
  }
  if (std::fabs(s) > 1e-12)
    throw constraint_error("separable: taus must sum to zero");

  ExactSolution sol;
  sol.name = "separable_infinity_harmonic";
  sol.dim = d;
  sol.alpha_expected = 1.0 / 3.0;
  const double q = 4.0 / 3.0;
  auto tv = taus;
  auto cv = consts;

  // sigma_i(t) = |3 tau t + c|^(4/3) / (4 tau) when tau != 0, else c t.
  sol.eval = [tv, cv, q, d](const Vec& X) {
    double u = 0.0;
    for (int i = 0; i < d; ++i) {
      if (tv[i] != 0.0)
        u += even_pow(3.0 * tv[i] * X.c[i] + cv[i], q) / (4.0 * tv[i]);
      else
        u += cv[i] * X.c[i];
    }
    return u;
  };
  sol.gradient = [tv, cv, q, d](const Vec& X) {
    Vec g = Vec::zero(d);
    for (int i = 0; i < d; ++i) {
      if (tv[i] != 0.0)
        g.c[i] = even_pow_d1(3.0 * tv[i] * X.c[i] + cv[i], q) *
                 (3.0 * tv[i]) / (4.0 * tv[i]);
      else
        g.c[i] = cv[i];
    }
    return g;
  };
  sol.jet = [tv, cv, q, d](const Vec& X) -> std::optional<Jet> {
    Jet J;
    J.value = 0.0;
    J.grad = Vec::zero(d);
    J.hess = SymMat::zero(d);
    for (int i = 0; i < d; ++i) {
      if (tv[i] != 0.0) {
        double arg = 3.0 * tv[i] * X.c[i] + cv[i];
        if (arg == 0.0) return std::nullopt;
        J.value += even_pow(arg, q) / (4.0 * tv[i]);
        J.grad.c[i] = even_pow_d1(arg, q) * 0.75;
        J.hess.set(i, i, even_pow_d2(arg, q) * (9.0 * tv[i] * tv[i]) /
                             (4.0 * tv[i]));
      } else {
        J.value += cv[i] * X.c[i];
        J.grad.c[i] = cv[i];
      }
    }
    return J;
  };
  sol.singular_distance = [tv, cv, d](const Vec& X) {
    double m = kInf;
    for (int i = 0; i < d; ++i)
      if (tv[i] != 0.0)
        m = std::min(m, std::fabs(X.c[i] + cv[i] / (3.0 * tv[i])));
    return m;
  };
  for (int i = 0; i < d; ++i) {
    if (tv[i] == 0.0) continue;
    Vec p = Vec::zero(d);
    p.c[i] = -cv[i] / (3.0 * tv[i]);
    if (p.norm() < 1.0) sol.singular_points.push_back(p);
  }
  sol.defining_residual = [sol](const Vec& X) {
    auto J = sol.jet(X);
    if (!J) return kInf;
    return std::fabs(infinity_laplacian(*J));
  };
  self_check(sol);
  return sol;
}

ExactSolution radial_plus_smooth(const Polynomial2D& phi, double q) {
  if (!(q > 1.0 && q <= 2.0))
    throw domain_error("radial_plus_smooth: q must lie in (1, 2]");
  if (!phi.terms.empty() && phi.min_total_degree() < 2)
    throw domain_error(
        "radial_plus_smooth: polynomial part must have degree >= 2 terms");
  ExactSolution radial = radial_power("radial_plus_smooth", 2, 1.0, q, q - 1.0);
  ExactSolution sol = radial;
  sol.eval = [radial, phi](const Vec& X) {
    return radial.eval(X) + phi.eval(X);
  };
  sol.gradient = [radial, phi](const Vec& X) {
    return radial.gradient(X) + phi.grad(X);
  };
  sol.jet = [radial, phi](const Vec& X) -> std::optional<Jet> {
    auto J = radial.jet(X);
    if (!J) return std::nullopt;
    J->value += phi.eval(X);
    J->grad = J->grad + phi.grad(X);
    J->hess = J->hess + phi.hess(X);
    return J;
  };
  // Only the pure q = 4/3 member has a pinned equation (its infinity
  // Laplacian is the constant 64/81).
  if (phi.terms.empty() && q == 4.0 / 3.0) {
    sol.defining_residual = [sol](const Vec& X) {
      auto J = sol.jet(X);
      if (!J) return kInf;
      return std::fabs(infinity_laplacian(*J) - 64.0 / 81.0);
    };
  }
  self_check(sol);
  return sol;
}

ExactSolution p_radial_profile(double p, int d) {
  if (!(p >= 2.0) || !std::isfinite(p))
    throw domain_error("p_radial_profile: p must be finite and >= 2");
  if (d < 1 || d > 2)
    throw domain_error("p_radial_profile: dim must be 1 or 2");
  double m = p / (p - 1.0);
  double c = ((p - 1.0) / p) * std::pow(double(d), -1.0 / (p - 1.0));
  ExactSolution sol =
      radial_power("p_radial_profile", d, c, m, 1.0 / (p - 1.0));
  sol.defining_residual = [sol, p](const Vec& X) {
    auto J = sol.jet(X);
    if (!J) return kInf;
    return std::fabs(p_laplacian_nondiv(*J, p) - 1.0);
  };
  self_check(sol);
  return sol;
}

}  // namespace degen
