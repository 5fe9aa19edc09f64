#pragma once

// Thin OpenMP wrapper.  Every parallel kernel in this project has a serial
// reference path selected at runtime; reductions are tiled with a fixed tile
// size and the tile partials are combined in index order, so results are
// bit-identical for any thread count.

#include <cstddef>
#include <functional>
#include <vector>

#if defined(CSF_HAVE_OPENMP)
#include <omp.h>
#endif

namespace csf::par {

// 0 = use OpenMP default; 1 = serial reference path
void set_threads(int n);
int threads();
bool serial();

inline constexpr std::size_t kTile = 4096;

// Deterministic sum of f(i) for i in [0, n).
template <typename F>
double tiled_sum(std::size_t n, F&& f) {
  if (n == 0) return 0.0;
  std::size_t ntiles = (n + kTile - 1) / kTile;
  std::vector<double> partial(ntiles, 0.0);
  if (serial()) {
    for (std::size_t tt = 0; tt < ntiles; ++tt) {
      double s = 0.0;
      std::size_t hi = std::min(n, (tt + 1) * kTile);
      for (std::size_t i = tt * kTile; i < hi; ++i) s += f(i);
      partial[tt] = s;
    }
  } else {
#if defined(CSF_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (long long tt = 0; tt < static_cast<long long>(ntiles); ++tt) {
      double s = 0.0;
      std::size_t hi = std::min(n, (static_cast<std::size_t>(tt) + 1) * kTile);
      for (std::size_t i = static_cast<std::size_t>(tt) * kTile; i < hi; ++i)
        s += f(i);
      partial[static_cast<std::size_t>(tt)] = s;
    }
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Parallel loop over [0, n), no reduction.
template <typename F>
void for_each(std::size_t n, F&& f) {
  if (serial()) {
    for (std::size_t i = 0; i < n; ++i) f(i);
  } else {
#if defined(CSF_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      f(static_cast<std::size_t>(i));
  }
}

}  // namespace csf::par
