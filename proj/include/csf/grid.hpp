#pragma once

// Structured-grid containers (cell-centered 1D radial and 3D Cartesian) and
// the csf-snapshot v1 ASCII format.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace csf {

using cplx = std::complex<double>;

struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Radial grid r_j = (j + 1/2) h, j = 0..n-1.
struct RadialGeom {
  int n = 0;
  double h = 0.0;

  double r(int j) const { return (j + 0.5) * h; }
  double r_max() const { return n * h; }
  bool operator==(const RadialGeom&) const = default;
};

// Cartesian cube, cell-centered, x_i = (i + 1/2) h - L/2 with L = n h.
struct BoxGeom {
  int n = 0;
  double h = 0.0;

  double coord(int i) const { return (i + 0.5) * h - 0.5 * n * h; }
  std::size_t size() const { return std::size_t(n) * n * n; }
  std::size_t idx(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * k);
  }
  double half_length() const { return 0.5 * n * h; }
  bool operator==(const BoxGeom&) const = default;
};

// Second-order finite differences on a box, one-sided at the faces.
// f is any random-access container of double or cplx indexed by idx().
template <typename T>
T fd_axis(const std::vector<T>& f, const BoxGeom& g, int i, int j, int k,
          int axis) {
  int c[3] = {i, j, k};
  auto at = [&](int off) {
    int d[3] = {i, j, k};
    d[axis] += off;
    return f[g.idx(d[0], d[1], d[2])];
  };
  double inv2h = 1.0 / (2.0 * g.h);
  if (c[axis] == 0)
    return (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
  if (c[axis] == g.n - 1)
    return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) * inv2h;
  return (at(1) - at(-1)) * inv2h;
}

// ---------------------------------------------------------------------------
// Snapshot file format
//
//   csf-snapshot v1; grid=<1d|3d>; n=<dims>; h=<spacing>; t=<time>
//   fields: <name> <name> ...
//   <index> <col0> <col1> ...
//
// All floats written with 17 significant digits; round-trips bit-exact.

struct Snapshot {
  std::string grid;  // "1d" or "3d"
  std::vector<int> dims;
  double h = 0.0;
  double t = 0.0;
  std::vector<std::string> field_names;
  std::vector<std::vector<double>> columns;

  std::size_t points() const;
  const std::vector<double>& col(const std::string& name) const;
};

void write_snapshot(std::ostream& os, const Snapshot& s);
Snapshot read_snapshot(std::istream& is);
void save_snapshot(const std::string& path, const Snapshot& s);
Snapshot load_snapshot(const std::string& path);

std::string format_g17(double v);

}  // namespace csf
