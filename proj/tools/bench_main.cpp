// Benchmark: serial reference vs OpenMP kernels on the hot paths
// (3D RK4 stage, tiled reduction).  Also cross-checks that the parallel
// results are bit-identical to the serial ones.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "csf/evolve.hpp"
#include "csf/parallel.hpp"

using namespace csf;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

BoxState3D make_box() {
  RunConfig cfg;
  cfg.scheme = "box3d";
  cfg.recipe = "charged-gaussian";
  cfg.n = 64;
  cfg.h = 0.125;
  cfg.T = 0.0;
  return init_box3d(cfg);
}

double bench_box(int steps, double dt, BoxState3D& st) {
  auto t0 = clk::now();
  for (int k = 0; k < steps; ++k) step_box3d(st, dt);
  return seconds(t0, clk::now());
}

double bench_sum(const std::vector<double>& v, int reps, double& out) {
  auto t0 = clk::now();
  for (int k = 0; k < reps; ++k)
    out = par::tiled_sum(v.size(), [&](std::size_t i) { return v[i]; });
  return seconds(t0, clk::now());
}

}  // namespace

int main() {
  const int steps = 10;
  const double dt = 0.05;

  par::set_threads(1);
  BoxState3D serial = make_box();
  double t_serial = bench_box(steps, dt, serial);

  par::set_threads(0);  // hardware default
  BoxState3D parallel = make_box();
  double t_par = bench_box(steps, dt, parallel);

  bool identical = true;
  for (std::size_t i = 0; i < serial.f.phi.size(); ++i)
    if (serial.f.phi[i] != parallel.f.phi[i]) identical = false;

  std::vector<double> v(1 << 24);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(1e-6 * double(i));
  double s1 = 0.0, s2 = 0.0;
  par::set_threads(1);
  double tsum1 = bench_sum(v, 20, s1);
  par::set_threads(0);
  double tsum2 = bench_sum(v, 20, s2);

  std::printf("box3d n=64, %d RK4 steps:\n", steps);
  std::printf("  serial   %8.3f s\n", t_serial);
  std::printf("  parallel %8.3f s (%d threads), speedup %.2fx\n", t_par,
              par::threads(), t_serial / t_par);
  std::printf("  states bit-identical: %s\n", identical ? "yes" : "NO");
  std::printf("tiled reduction, 16M doubles x20:\n");
  std::printf("  serial   %8.3f s\n", tsum1);
  std::printf("  parallel %8.3f s, speedup %.2fx\n", tsum2, tsum1 / tsum2);
  std::printf("  sums bit-identical: %s\n", s1 == s2 ? "yes" : "NO");
  return identical && s1 == s2 ? 0 : 1;
}
