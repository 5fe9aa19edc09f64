#include <cmath>
#include <sstream>

#include "csf/charge.hpp"
#include "csf/evolve.hpp"
#include "doctest.h"

using namespace csf;

namespace {

RunConfig sph_cfg(int n, double h) {
  RunConfig cfg;
  cfg.scheme = "sph1d";
  cfg.n = n;
  cfg.h = h;
  cfg.T = 0.0;  // tests that step manually validate only the initial data
  return cfg;
}

double max_psi_err(const SphericalState1D& st,
                   const std::function<cplx(double, double)>& exact) {
  double worst = 0.0;
  for (int j = 0; j < st.g.n; ++j)
    worst = std::max(worst, std::abs(st.psi[j] - exact(st.t, st.g.r(j))));
  return worst;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  std::istringstream in(
      "# sample run\n"
      "scheme = sph1d\n"
      "n = 400\n"
      "h = 0.05   # grid spacing\n"
      "cfl = 0.5\n"
      "T = 4\n"
      "recipe = charged-gaussian\n"
      "amplitude = 0.01\n");
  RunConfig cfg = parse_config(in);
  CHECK(cfg.scheme == "sph1d");
  CHECK(cfg.n == 400);
  CHECK(cfg.h == doctest::Approx(0.05));
  CHECK(cfg.T == doctest::Approx(4.0));
  CHECK(cfg.recipe == "charged-gaussian");
  CHECK(cfg.amplitude == doctest::Approx(0.01));
  cfg.validate();

  apply_override(cfg, "T=2");
  CHECK(cfg.T == doctest::Approx(2.0));
  CHECK_THROWS_AS(apply_override(cfg, "notakey=1"), ConfigParse);
  CHECK_THROWS_AS(apply_override(cfg, "nodelimiter"), ConfigParse);

  std::istringstream bad("n = not_a_number\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigParse);

  RunConfig c2 = cfg;
  c2.cfl = 1.2;
  CHECK_THROWS_AS(c2.validate(), CFLViolation);
  c2 = cfg;
  c2.scheme = "spectral";
  CHECK_THROWS_AS(c2.validate(), ConfigParse);
  c2 = cfg;
  c2.recipe = "vortex";
  CHECK_THROWS_AS(c2.validate(), RecipeUnknown);
  c2 = cfg;
  c2.scheme = "box3d";
  c2.n = 128;
  CHECK_THROWS_AS(c2.validate(), ConfigParse);
  // causal outer boundary: T + support + 5 must fit inside r_max = n h
  c2 = cfg;
  c2.T = 100.0;
  CHECK_THROWS_AS(c2.validate(), ConfigParse);
}

TEST_CASE("zero recipe stays zero; T = 0 records only the initial snapshot") {
  RunConfig cfg = sph_cfg(120, 0.1);
  cfg.recipe = "zero";
  cfg.T = 0.0;
  RunResult res = run(cfg);
  CHECK(res.history.size() == 1);
  CHECK(res.monitors.size() == 1);
  CHECK(res.monitors[0].q == 0.0);
  CHECK(res.monitors[0].energy == 0.0);

  SphericalState1D st = init_sph1d(cfg);
  step_sph1d(st, 0.05);
  for (int j = 0; j < st.g.n; ++j) {
    CHECK(std::abs(st.psi[j]) == 0.0);
    CHECK(st.Er[j] == 0.0);
  }
}

TEST_CASE("initial data: charge quadrature, Gauss residual, real-pulse") {
  RunConfig cfg = sph_cfg(400, 0.05);
  cfg.recipe = "charged-gaussian";
  cfg.T = 0.0;
  SphericalState1D st = init_sph1d(cfg);

  // q = int Im(phi0 conj phi0_dot) dx = -c int phi0^2 dx for phi0_dot = i c phi0
  double l2 = 0.0;
  for (int j = 0; j < cfg.n; ++j) {
    double r = st.g.r(j);
    double d = (r - cfg.r0) / cfg.sigma;
    double phi0 = cfg.amplitude * std::exp(-d * d);
    l2 += 4.0 * M_PI * r * r * phi0 * phi0 * cfg.h;
  }
  double q = sph_charge(st);
  CHECK(q == doctest::Approx(-cfg.phase_speed * l2).epsilon(1e-10));
  CHECK(q != 0.0);

  // exact radial Gauss integration: discrete residual at solver level
  CHECK(sph_gauss_residual(st) < 1e-10);

  // far field is Coulomb: E_r = q / (4 pi r^2) past the support
  int jf = 350;  // r = 17.5, support ends near r0 + 4 sigma = 9
  double rf = st.g.r(jf);
  CHECK(st.Er[jf] == doctest::Approx(q / (4.0 * M_PI * rf * rf)).epsilon(1e-6));
  // gauge: A_t vanishes at the outer edge, so the last cell holds ~ E h/2
  CHECK(std::abs(st.At[cfg.n - 1]) < std::abs(st.Er[cfg.n - 1]) * cfg.h);
  // and matches the Coulomb potential q/(4 pi) (1/r - 1/Rmax) in the far zone
  double coul = q / (4.0 * M_PI) * (1.0 / rf - 1.0 / cfg.rmax());
  CHECK(st.At[jf] == doctest::Approx(coul).epsilon(1e-4));

  cfg.recipe = "real-pulse";
  SphericalState1D rp = init_sph1d(cfg);
  for (int j = 0; j < cfg.n; ++j) {
    CHECK(rp.Er[j] == 0.0);
    CHECK(rp.At[j] == 0.0);
    CHECK(std::abs(rp.Pi[j]) == 0.0);
  }
}

TEST_CASE("free field matches the d'Alembert solution at second order") {
  // real-pulse keeps A = 0, so psi solves the 1+1 wave equation with odd
  // extension: psi(t,r) = (psi0_ext(r+t) + psi0_ext(r-t)) / 2
  double a = 0.05, r0 = 5.0, sg = 1.0, T = 3.0;
  auto psi0_ext = [&](double x) {
    double d = (std::abs(x) - r0) / sg;
    return x * a * std::exp(-d * d);
  };
  auto exact = [&](double t, double r) {
    return cplx(0.5 * (psi0_ext(r + t) + psi0_ext(r - t)), 0.0);
  };
  auto solve = [&](int n, double h) {
    RunConfig cfg = sph_cfg(n, h);
    cfg.recipe = "real-pulse";
    cfg.r0 = r0;
    cfg.sigma = sg;
    cfg.amplitude = a;
    SphericalState1D st = init_sph1d(cfg);
    double dt = 0.5 * h;
    int steps = static_cast<int>(std::round(T / dt));
    for (int m = 0; m < steps; ++m) step_sph1d(st, dt);
    for (int j = 0; j < n; ++j) CHECK(st.At[j] == 0.0);
    return max_psi_err(st, exact);
  };
  double e1 = solve(180, 0.1);
  double e2 = solve(360, 0.05);
  double order = std::log2(e1 / e2);
  MESSAGE("dalembert errors " << e1 << " " << e2 << " order " << order);
  CHECK(e1 < 5e-3);
  CHECK(order > 1.9);
}

TEST_CASE("charged run conserves charge and energy") {
  RunConfig cfg = sph_cfg(200, 0.1);
  cfg.recipe = "charged-gaussian";
  cfg.T = 6.0;
  cfg.cadence = 1.0;
  RunResult res = run(cfg);
  REQUIRE(res.monitors.size() == 7);
  double q0 = res.monitors.front().q;
  double e0 = res.monitors.front().energy;
  REQUIRE(q0 != 0.0);
  for (const auto& m : res.monitors) {
    CHECK(std::abs(m.q - q0) / std::abs(q0) < 1e-6);  // RK4 time error only
    CHECK(std::abs(m.energy - e0) / e0 < 3e-3);  // O(h^2) spatial drift
    CHECK(m.gauss < 5e-3);
  }
  // energy drift is O(h^2): refine and compare
  RunConfig cfg2 = cfg;
  cfg2.n = 400;
  cfg2.h = 0.05;
  RunResult res2 = run(cfg2);
  double d1 = 0.0, d2 = 0.0;
  for (const auto& m : res.monitors)
    d1 = std::max(d1, std::abs(m.energy - e0));
  double e02 = res2.monitors.front().energy;
  for (const auto& m : res2.monitors)
    d2 = std::max(d2, std::abs(m.energy - e02));
  MESSAGE("energy drift " << d1 << " -> " << d2 << " order " << std::log2(d1 / d2));
  CHECK(std::log2(d1 / d2) > 1.7);
}

TEST_CASE("observables are independent of the A_t normalization") {
  RunConfig cfg = sph_cfg(200, 0.1);
  cfg.recipe = "charged-gaussian";
  cfg.T = 4.0;
  RunResult outer = run(cfg);
  cfg.gauge = "origin";
  RunResult origin = run(cfg);
  const auto& a = outer.history.back();
  const auto& b = origin.history.back();
  double worst = 0.0;
  for (int j = 0; j < cfg.n; ++j) {
    worst = std::max(worst, std::abs(std::abs(a.psi[j]) - std::abs(b.psi[j])));
    worst = std::max(worst, std::abs(a.Er[j] - b.Er[j]));
    double J0a, Jra, J0b, Jrb;
    sph_current(a, j, J0a, Jra);
    sph_current(b, j, J0b, Jrb);
    worst = std::max({worst, std::abs(J0a - J0b), std::abs(Jra - Jrb)});
  }
  MESSAGE("gauge-independence deviation " << worst);
  CHECK(worst < 1e-9);
}

TEST_CASE("manufactured solution converges at second order (sph1d)") {
  // psi_m = a sin^6(k(r-2)) e^{i w t} on [2,6]; A_t = b cos(nu t) exp(-(r-4)^2)
  double a = 1.0, w = 2.0, b = 0.5, nu = 1.0, k = M_PI / 4.0, T = 1.0;
  auto prof = [&](double r) {
    if (r <= 2.0 || r >= 6.0) return 0.0;
    double s = std::sin(k * (r - 2.0));
    return std::pow(s, 6);
  };
  auto prof_pp = [&](double r) {
    if (r <= 2.0 || r >= 6.0) return 0.0;
    double x = k * (r - 2.0), s = std::sin(x), c = std::cos(x);
    return 6.0 * k * k * (5.0 * std::pow(s, 4) * c * c - std::pow(s, 6));
  };
  auto At_m = [&](double t, double r) {
    return b * std::cos(nu * t) * std::exp(-(r - 4.0) * (r - 4.0));
  };
  auto At_m_dot = [&](double t, double r) {
    return -b * nu * std::sin(nu * t) * std::exp(-(r - 4.0) * (r - 4.0));
  };
  auto Em = [&](double t, double r) {  // E = -dA_t/dr
    return 2.0 * b * (r - 4.0) * std::cos(nu * t) * std::exp(-(r - 4.0) * (r - 4.0));
  };
  auto psi_m = [&](double t, double r) {
    return a * prof(r) * std::exp(cplx(0.0, w * t));
  };
  auto Pi_m = [&](double t, double r) {  // D_t psi = i (w + A_t) psi
    return cplx(0.0, w + At_m(t, r)) * psi_m(t, r);
  };
  SphSource src;
  src.S_Pi = [&](double t, double r) {
    // dPi/dt - psi'' + i A_t Pi for the exact solution
    double A = At_m(t, r);
    cplx dPi = cplx(0.0, At_m_dot(t, r)) * psi_m(t, r) +
               cplx(0.0, w + A) * cplx(0.0, w) * psi_m(t, r);
    cplx psi_pp = a * prof_pp(r) * std::exp(cplx(0.0, w * t));
    return dPi - psi_pp + cplx(0.0, A) * Pi_m(t, r);
  };
  src.S_E = [&](double t, double r) {
    // dE/dt of the exact solution; J_r vanishes (radial phase is constant)
    return -2.0 * b * nu * (r - 4.0) * std::sin(nu * t) *
           std::exp(-(r - 4.0) * (r - 4.0));
  };
  auto solve = [&](int n, double h) {
    SphericalState1D st;
    st.g = RadialGeom{n, h};
    st.psi.resize(n);
    st.Pi.resize(n);
    st.Er.resize(n);
    st.At.assign(n, 0.0);
    st.At_dot.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double r = st.g.r(j);
      st.psi[j] = psi_m(0.0, r);
      st.Pi[j] = Pi_m(0.0, r);
      st.Er[j] = Em(0.0, r);
    }
    double dt = 0.5 * h;
    int steps = static_cast<int>(std::round(T / dt));
    for (int m = 0; m < steps; ++m) step_sph1d(st, dt, &src);
    double epsi = 0.0, eE = 0.0;
    for (int j = 0; j < n; ++j) {
      double r = st.g.r(j);
      epsi = std::max(epsi, std::abs(st.psi[j] - psi_m(st.t, r)));
      eE = std::max(eE, std::abs(st.Er[j] - Em(st.t, r)));
    }
    return std::make_pair(epsi, eE);
  };
  auto [p1, E1] = solve(256, 0.05);
  auto [p2, E2] = solve(512, 0.025);
  double op = std::log2(p1 / p2), oE = std::log2(E1 / E2);
  MESSAGE("manufactured sph1d psi errors " << p1 << " " << p2 << " order " << op);
  MESSAGE("manufactured sph1d E errors " << E1 << " " << E2 << " order " << oE);
  CHECK(op > 1.9);
  CHECK(oE > 1.9);
}

TEST_CASE("CFL violation and NaN detection throw") {
  RunConfig cfg = sph_cfg(160, 0.1);
  cfg.recipe = "real-pulse";
  SphericalState1D st = init_sph1d(cfg);
  CHECK_THROWS_AS(step_sph1d(st, 0.2), CFLViolation);
  st.psi[5] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(step_sph1d(st, 0.05), NaNDetected);
}

TEST_CASE("box3d: zero data, charged data residuals") {
  RunConfig cfg;
  cfg.scheme = "box3d";
  cfg.n = 24;
  cfg.h = 8.0 / 24;
  cfg.sigma = 1.0;
  cfg.recipe = "zero";
  BoxState3D st = init_box3d(cfg);
  step_box3d(st, 0.5 * cfg.h);
  CHECK(box_energy(st) == 0.0);

  cfg.recipe = "charged-gaussian";
  cfg.amplitude = 0.1;
  BoxState3D ch = init_box3d(cfg);
  double q0 = box_charge(ch);
  CHECK(q0 != 0.0);
  double dt = 0.5 * cfg.h;
  for (int m = 0; m < 4; ++m) step_box3d(ch, dt);
  // Lorenz gauge and Gauss law hold at the discretization level
  CHECK(box_gauge_residual(ch) < 5e-3);
  auto F = curvature_from_potential(ch.f);
  auto J = current_from_fields(ch.f);
  CHECK(gauss_residual(F, J) < 5e-3);
  CHECK(std::abs(box_charge(ch) - q0) / std::abs(q0) < 5e-3);
}

TEST_CASE("manufactured solution converges at second order (box3d)") {
  double a = 0.1, w = 2.0, b = 0.2, nu = 1.0, wq = 1.4, T = 0.5, L = 8.0;
  auto Q = [&](double x) { return std::exp(-x * x / (wq * wq)); };
  auto Qpp = [&](double x) {
    return (4.0 * x * x / (wq * wq * wq * wq) - 2.0 / (wq * wq)) * Q(x);
  };
  auto phi_m = [&](double t, double x, double y, double z) {
    return a * std::exp(cplx(0.0, w * t)) * Q(x) * Q(y) * Q(z);
  };
  auto lap_phi_m = [&](double t, double x, double y, double z) {
    return a * std::exp(cplx(0.0, w * t)) *
           (Qpp(x) * Q(y) * Q(z) + Q(x) * Qpp(y) * Q(z) + Q(x) * Q(y) * Qpp(z));
  };
  auto A0_m = [&](double t, double x, double y, double z) {
    return b * std::cos(nu * t) * Q(x) * Q(y) * Q(z);
  };
  BoxGeom* geom = nullptr;
  BoxSource src;
  src.S_phi = [&](double t, double x, double y, double z) {
    cplx phi = phi_m(t, x, y, z);
    cplx phit = cplx(0.0, w) * phi;
    double A0 = A0_m(t, x, y, z);
    double sp = sponge_profile(*geom, x, y, z);
    return -w * w * phi - lap_phi_m(t, x, y, z) + 2.0 * cplx(0.0, 1.0) * A0 * phit -
           A0 * A0 * phi + sp * phit;
  };
  src.S_A[0] = [&](double t, double x, double y, double z) {
    double A0 = A0_m(t, x, y, z);
    double lapA0 = b * std::cos(nu * t) *
                   (Qpp(x) * Q(y) * Q(z) + Q(x) * Qpp(y) * Q(z) + Q(x) * Q(y) * Qpp(z));
    double J0 = -(w + A0) * std::norm(phi_m(t, x, y, z));
    double sp = sponge_profile(*geom, x, y, z);
    double A0t = -b * nu * std::sin(nu * t) * Q(x) * Q(y) * Q(z);
    return -nu * nu * A0 - lapA0 - J0 + sp * A0t;
  };
  auto solve = [&](int n) {
    double h = L / n;
    BoxState3D st;
    st.f.g = BoxGeom{n, h};
    geom = &st.f.g;
    std::size_t N = st.f.g.size();
    st.f.phi.resize(N);
    st.f.phi_t.resize(N);
    for (int aq = 0; aq < 4; ++aq) {
      st.f.A[aq].assign(N, 0.0);
      st.f.A_t[aq].assign(N, 0.0);
    }
    const BoxGeom& g = st.f.g;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          std::size_t p = g.idx(i, j, k);
          double x = g.coord(i), y = g.coord(j), z = g.coord(k);
          st.f.phi[p] = phi_m(0.0, x, y, z);
          st.f.phi_t[p] = cplx(0.0, w) * st.f.phi[p];
          st.f.A[0][p] = A0_m(0.0, x, y, z);
        }
    double dt = 0.5 * h;
    int steps = static_cast<int>(std::round(T / dt));
    for (int m = 0; m < steps; ++m) step_box3d(st, dt, &src);
    // measure on the interior 60% of the box
    int lo = static_cast<int>(0.2 * n), hi = n - lo;
    double ephi = 0.0, eA = 0.0;
    for (int i = lo; i < hi; ++i)
      for (int j = lo; j < hi; ++j)
        for (int k = lo; k < hi; ++k) {
          std::size_t p = g.idx(i, j, k);
          double x = g.coord(i), y = g.coord(j), z = g.coord(k);
          ephi = std::max(ephi, std::abs(st.f.phi[p] - phi_m(st.t, x, y, z)));
          eA = std::max(eA, std::abs(st.f.A[0][p] - A0_m(st.t, x, y, z)));
        }
    return std::make_pair(ephi, eA);
  };
  auto [p1, A1] = solve(32);
  auto [p2, A2] = solve(64);
  double op = std::log2(p1 / p2), oA = std::log2(A1 / A2);
  MESSAGE("manufactured box3d phi errors " << p1 << " " << p2 << " order " << op);
  MESSAGE("manufactured box3d A0 errors " << A1 << " " << A2 << " order " << oA);
  CHECK(op > 1.9);
  CHECK(oA > 1.9);
}

TEST_CASE("monitor files round trip") {
  std::vector<MonitorRow> rows = {{0.0, -0.1, 1e-12, 0.0, 2.5},
                                  {1.0, -0.1000001, 3e-9, 1e-8, 2.5001}};
  std::string path = "/tmp/csf_test_monitors.txt";
  write_monitors(path, rows);
  auto back = read_monitors(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].q == rows[i].q);
    CHECK(back[i].gauss == rows[i].gauss);
    CHECK(back[i].gauge == rows[i].gauge);
    CHECK(back[i].energy == rows[i].energy);
  }
}
