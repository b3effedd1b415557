#include "degen/grid.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace degen {

Grid make_grid(int dim, int n, double lo, double hi) {
  if (dim != 1 && dim != 2) throw invalid_grid_error("dim must be 1 or 2, got " + std::to_string(dim));
  if (n < 3) throw invalid_grid_error("need at least 3 points per axis, got " + std::to_string(n));
  if (!(lo < hi)) throw invalid_grid_error("extent requires lo < hi");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw invalid_grid_error("extent must be finite");
  Grid g;
  g.dim = dim;
  g.n = n;
  g.lo = lo;
  g.hi = hi;
  g.h = (hi - lo) / (n - 1);
  return g;
}

long Grid::nearest_index(const Vec& p) const {
  auto clamp_axis = [&](double x) {
    int i = static_cast<int>(std::lround((x - lo) / h));
    return std::clamp(i, 0, n - 1);
  };
  if (dim == 1) return index1(clamp_axis(p[0]));
  return index2(clamp_axis(p[0]), clamp_axis(p[1]));
}

ScalarField sample(const Grid& grid, const std::function<double(const Vec&)>& fn) {
  ScalarField u{grid, std::vector<double>(static_cast<size_t>(grid.npoints()))};
  for (long i = 0; i < grid.npoints(); ++i) {
    Vec x = grid.coord(i);
    double v = fn(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite sample at index " << i << ", point (" << x[0];
      if (grid.dim == 2) os << ", " << x[1];
      os << ")";
      throw sampling_error(os.str());
    }
    u[i] = v;
  }
  return u;
}

std::vector<long> ball_indices(const Grid& grid, const Vec& center, double radius) {
  // Slack absorbs roundoff in |X-c|^2 so points sitting exactly on the
  // sphere stay inside; it is far below h^2 for any usable radius.
  const double r2 = radius * radius * (1.0 + 1e-12) + 1e-300;
  std::vector<long> out;
  auto in_ball = [&](const Vec& x) {
    double d2 = 0;
    for (int k = 0; k < grid.dim; ++k) {
      double d = x[k] - center[k];
      d2 += d * d;
    }
    return d2 <= r2;
  };
  if (grid.dim == 1) {
    for (int ix = 0; ix < grid.n; ++ix)
      if (in_ball(Vec::make(grid.axis_coord(ix)))) out.push_back(grid.index1(ix));
    return out;
  }
  // Restrict the scan to the bounding square of the ball.
  int ix_lo = std::max(0, static_cast<int>(std::floor((center[0] - radius - grid.lo) / grid.h)) - 1);
  int ix_hi = std::min(grid.n - 1, static_cast<int>(std::ceil((center[0] + radius - grid.lo) / grid.h)) + 1);
  int iy_lo = std::max(0, static_cast<int>(std::floor((center[1] - radius - grid.lo) / grid.h)) - 1);
  int iy_hi = std::min(grid.n - 1, static_cast<int>(std::ceil((center[1] + radius - grid.lo) / grid.h)) + 1);
  for (int iy = iy_lo; iy <= iy_hi; ++iy)
    for (int ix = ix_lo; ix <= ix_hi; ++ix)
      if (in_ball(Vec::make(grid.axis_coord(ix), grid.axis_coord(iy))))
        out.push_back(grid.index2(ix, iy));
  return out;
}

double sup_norm_on_ball(const ScalarField& u, const Vec& center, double radius) {
  auto idx = ball_indices(u.grid, center, radius);
  if (idx.empty()) throw empty_ball_error("ball does not intersect the grid");
  double s = 0;
  for (long i : idx) s = std::max(s, std::abs(u[i]));
  return s;
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

void save_csv(const ScalarField& u, const std::string& path) {
  const Grid& g = u.grid;
  std::string out;
  out.reserve(static_cast<size_t>(g.npoints()) * 48 + 64);
  out += "# dim=";
  out += std::to_string(g.dim);
  out += " n=";
  out += std::to_string(g.n);
  out += " lo=";
  append_g17(out, g.lo);
  out += " hi=";
  append_g17(out, g.hi);
  out += "\n";
  for (long i = 0; i < g.npoints(); ++i) {
    Vec x = g.coord(i);
    out += std::to_string(i);
    out += ",";
    append_g17(out, x[0]);
    if (g.dim == 2) {
      out += ",";
      append_g17(out, x[1]);
    }
    out += ",";
    append_g17(out, u[i]);
    out += "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw io_error("write failed: " + path);
}

ScalarField load_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open: " + path);
  std::string header;
  if (!std::getline(f, header)) throw io_error("empty file: " + path);
  int dim = 0, n = 0;
  double lo = 0, hi = 0;
  if (std::sscanf(header.c_str(), "# dim=%d n=%d lo=%lf hi=%lf", &dim, &n, &lo, &hi) != 4)
    throw io_error("bad header in " + path + ": " + header);
  Grid g = make_grid(dim, n, lo, hi);
  ScalarField u{g, std::vector<double>(static_cast<size_t>(g.npoints()))};
  std::string line;
  long count = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    long idx = 0;
    double x = 0, y = 0, v = 0;
    int fields = dim == 1 ? std::sscanf(line.c_str(), "%ld,%lf,%lf", &idx, &x, &v)
                          : std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf", &idx, &x, &y, &v);
    if (fields != dim + 2) throw io_error("bad row in " + path + ": " + line);
    if (idx < 0 || idx >= g.npoints()) throw io_error("row index out of range in " + path);
    if (!std::isfinite(v)) throw io_error("non-finite value in " + path);
    u[idx] = v;
    ++count;
  }
  if (count != g.npoints())
    throw io_error("expected " + std::to_string(g.npoints()) + " rows, got " + std::to_string(count));
  return u;
}

}  // namespace degen
