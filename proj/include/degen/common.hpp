#pragma once
// Small shared value types (points, symmetric matrices) and the error
// taxonomy used across the library.  Points and matrices are fixed-capacity
// (dim <= 3) so they can live in hot loops without allocation.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace degen {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_grid_error : error { using error::error; };
struct sampling_error : error { using error::error; };
struct empty_ball_error : error { using error::error; };
struct stencil_error : error { using error::error; };
struct underdetermined_fit_error : error { using error::error; };
struct constraint_error : error { using error::error; };
struct domain_error : error { using error::error; };
struct shooting_error : error { using error::error; };
struct mapping_error : error { using error::error; };
struct io_error : error { using error::error; };

/// Point in R^dim, dim in {1,2,3}.  Unused coordinates stay zero.
struct Vec {
  int dim = 1;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<size_t>(i)]; }

  static Vec zero(int d) { return Vec{d, {0.0, 0.0, 0.0}}; }
  static Vec make(double x) { return Vec{1, {x, 0.0, 0.0}}; }
  static Vec make(double x, double y) { return Vec{2, {x, y, 0.0}}; }
  static Vec make(double x, double y, double z) { return Vec{3, {x, y, z}}; }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r[i] += b[i];
  return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r[i] -= b[i];
  return r;
}
inline Vec operator*(double s, const Vec& a) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r[i] *= s;
  return r;
}
inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
  return s;
}

/// Symmetric matrix in packed storage, dim <= 3.
/// Packing: 1D [xx]; 2D [xx, yy, xy]; 3D [xx, yy, zz, xy, xz, yz].
struct SymMat {
  int dim = 1;
  std::array<double, 6> a{0, 0, 0, 0, 0, 0};

  static SymMat zero(int d) { return SymMat{d, {0, 0, 0, 0, 0, 0}}; }
  static SymMat identity(int d) {
    SymMat m = zero(d);
    for (int i = 0; i < d; ++i) m.set(i, i, 1.0);
    return m;
  }
  static SymMat diag2(double e1, double e2) {
    SymMat m = zero(2);
    m.set(0, 0, e1);
    m.set(1, 1, e2);
    return m;
  }
  /// Builds from a full row-major matrix; asymmetry -> domain_error.
  static SymMat from_full(int d, const double* full, double tol = 0.0);

  int off_index(int i, int j) const {
    // dim==2: only (0,1).  dim==3: (0,1)->3, (0,2)->4, (1,2)->5.
    if (dim == 2) return 2;
    return 2 + i + j;  // (0,1)->3, (0,2)->4, (1,2)->5 with i<j
  }
  double at(int i, int j) const {
    if (i == j) return a[static_cast<size_t>(i)];
    int lo = i < j ? i : j, hi = i < j ? j : i;
    return a[static_cast<size_t>(off_index(lo, hi))];
  }
  void set(int i, int j, double v) {
    if (i == j) {
      a[static_cast<size_t>(i)] = v;
    } else {
      int lo = i < j ? i : j, hi = i < j ? j : i;
      a[static_cast<size_t>(off_index(lo, hi))] = v;
    }
  }

  double trace() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += a[static_cast<size_t>(i)];
    return s;
  }
  /// g^T M g.
  double quad(const Vec& g) const {
    double s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s += g[i] * at(i, j) * g[j];
    return s;
  }
  /// Frobenius inner product sum_ij A_ij M_ij.
  double inner(const SymMat& m) const {
    double s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s += at(i, j) * m.at(i, j);
    return s;
  }
  /// Eigenvalues in ascending order; closed form, dim <= 2 only.
  std::array<double, 2> eigenvalues2() const;
  /// Spectral norm (largest |eigenvalue|), dim <= 2 only.
  double spectral_norm() const;
};

inline SymMat operator+(const SymMat& x, const SymMat& y) {
  SymMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}
inline SymMat operator*(double s, const SymMat& x) {
  SymMat r = x;
  for (auto& v : r.a) v *= s;
  return r;
}

inline SymMat SymMat::from_full(int d, const double* full, double tol) {
  SymMat m = zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double mij = full[i * d + j], mji = full[j * d + i];
      if (std::abs(mij - mji) > tol)
        throw domain_error("matrix is not symmetric at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      m.set(i, j, mij);
    }
  return m;
}

inline std::array<double, 2> SymMat::eigenvalues2() const {
  if (dim == 1) return {a[0], a[0]};
  if (dim != 2) throw domain_error("closed-form eigensolver handles dim <= 2 only");
  double xx = at(0, 0), yy = at(1, 1), xy = at(0, 1);
  double mean = 0.5 * (xx + yy);
  double r = std::hypot(0.5 * (xx - yy), xy);
  return {mean - r, mean + r};
}

inline double SymMat::spectral_norm() const {
  auto e = eigenvalues2();
  return std::max(std::abs(e[0]), std::abs(e[1]));
}

inline bool all_finite(const Vec& v) {
  for (int i = 0; i < v.dim; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}
inline bool all_finite(const SymMat& m) {
  for (int i = 0; i < m.dim; ++i)
    for (int j = i; j < m.dim; ++j)
      if (!std::isfinite(m.at(i, j))) return false;
  return true;
}

}  // namespace degen
