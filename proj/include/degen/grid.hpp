#pragma once
// Uniform tensor grids on the closed box [lo,hi]^dim (dim 1 or 2), scalar
// fields sampled on them, affine functions, and jets (value/gradient/hessian
// packages).  Grid indices are lexicographic with the x axis fastest.

#include <functional>
#include <string>
#include <vector>

#include "degen/common.hpp"

namespace degen {

struct Grid {
  int dim = 1;
  int n = 3;  // points per axis
  double lo = 0.0;
  double hi = 1.0;
  double h = 0.5;  // (hi - lo) / (n - 1)

  long npoints() const { return dim == 1 ? n : static_cast<long>(n) * n; }

  /// Axis index -> coordinate.
  double axis_coord(int i) const { return lo + h * i; }

  Vec coord(long index) const {
    if (dim == 1) return Vec::make(axis_coord(static_cast<int>(index)));
    int ix = static_cast<int>(index % n), iy = static_cast<int>(index / n);
    return Vec::make(axis_coord(ix), axis_coord(iy));
  }

  long index1(int ix) const { return ix; }
  long index2(int ix, int iy) const { return static_cast<long>(iy) * n + ix; }

  bool is_boundary(long index) const {
    if (dim == 1) return index == 0 || index == n - 1;
    int ix = static_cast<int>(index % n), iy = static_cast<int>(index / n);
    return ix == 0 || ix == n - 1 || iy == 0 || iy == n - 1;
  }

  /// Nearest grid index to an arbitrary point (clamped to the box).
  long nearest_index(const Vec& p) const;
};

/// Validates and builds a grid; n < 3 or lo >= hi or dim not in {1,2} throws
/// invalid_grid_error.
Grid make_grid(int dim, int n, double lo, double hi);

struct ScalarField {
  Grid grid;
  std::vector<double> values;  // size grid.npoints(), all finite

  double operator[](long i) const { return values[static_cast<size_t>(i)]; }
  double& operator[](long i) { return values[static_cast<size_t>(i)]; }
};

/// Samples fn at every grid point; a non-finite value throws sampling_error
/// naming the offending point.
ScalarField sample(const Grid& grid, const std::function<double(const Vec&)>& fn);

/// Indices of grid points X with |X - center| <= radius.
std::vector<long> ball_indices(const Grid& grid, const Vec& center, double radius);

/// sup |u| over grid points in the closed ball; empty intersection throws
/// empty_ball_error.
double sup_norm_on_ball(const ScalarField& u, const Vec& center, double radius);

/// ell(X) = a + b . X
struct AffineFn {
  double a = 0.0;
  Vec b = Vec::zero(1);
  double operator()(const Vec& x) const { return a + dot(b, x); }
};

/// Value, gradient and symmetric Hessian at a point.
struct Jet {
  double value = 0.0;
  Vec grad = Vec::zero(1);
  SymMat hess = SymMat::zero(1);
};

/// Writes "# dim=.. n=.. lo=.. hi=.." then "index,x[,y],value" rows with 17
/// significant digits (lossless double round trip).
void save_csv(const ScalarField& u, const std::string& path);

/// Inverse of save_csv; malformed content throws io_error.
ScalarField load_csv(const std::string& path);

}  // namespace degen
