#include "csf/evolve.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "csf/charge.hpp"
#include "csf/parallel.hpp"

namespace csf {

// ----------------------------------------------------------------- config ---

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& val) {
  try {
    if (key == "scheme") cfg.scheme = val;
    else if (key == "n") cfg.n = std::stoi(val);
    else if (key == "h") cfg.h = std::stod(val);
    else if (key == "cfl") cfg.cfl = std::stod(val);
    else if (key == "T") cfg.T = std::stod(val);
    else if (key == "cadence") cfg.cadence = std::stod(val);
    else if (key == "s") cfg.weights.s = std::stod(val);
    else if (key == "gamma") cfg.weights.gamma = std::stod(val);
    else if (key == "eps") cfg.weights.eps = std::stod(val);
    else if (key == "sharp_cutoff") cfg.weights.sharp_cutoff = (val == "1" || val == "true");
    else if (key == "recipe") cfg.recipe = val;
    else if (key == "offset") cfg.offset = std::stod(val);
    else if (key == "amplitude") cfg.amplitude = std::stod(val);
    else if (key == "r0") cfg.r0 = std::stod(val);
    else if (key == "sigma") cfg.sigma = std::stod(val);
    else if (key == "phase_speed") cfg.phase_speed = std::stod(val);
    else if (key == "gauge") cfg.gauge = val;
    else if (key == "seed") cfg.seed = std::stoul(val);
    else if (key == "threads") cfg.threads = std::stoi(val);
    else throw ConfigParse("unknown config key: " + key);
  } catch (const ConfigParse&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigParse("bad value for key '" + key + "': " + val);
  }
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParse("line " + std::to_string(lineno) + ": expected key = value");
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParse("cannot open config file: " + path);
  return parse_config(in);
}

void apply_override(RunConfig& cfg, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigParse("override must be key=value: " + kv);
  set_key(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

void RunConfig::validate() const {
  if (scheme != "sph1d" && scheme != "box3d")
    throw ConfigParse("scheme must be sph1d or box3d, got: " + scheme);
  if (n <= 0) throw ConfigParse("n must be positive");
  if (scheme == "box3d" && n > 96) throw ConfigParse("box3d requires n <= 96");
  if (h <= 0) throw ConfigParse("h must be positive");
  if (cfl <= 0) throw ConfigParse("cfl must be positive");
  if (cfl > 0.9)
    throw CFLViolation("cfl * (dt/h) = " + std::to_string(cfl) + " exceeds 0.9");
  if (T < 0) throw ConfigParse("T must be non-negative");
  if (cadence <= 0) throw ConfigParse("cadence must be positive");
  if (recipe != "zero" && recipe != "charged-gaussian" && recipe != "real-pulse")
    throw RecipeUnknown(recipe);
  if (gauge != "outer" && gauge != "origin")
    throw ConfigParse("gauge must be outer or origin, got: " + gauge);
  if (scheme == "sph1d") {
    double support = (recipe == "zero") ? 0.0 : r0 + 4.0 * sigma;
    if (rmax() < T + support + 5.0)
      throw ConfigParse(
          "causal outer boundary violated: need n*h >= T + data support + 5 = " +
          std::to_string(T + support + 5.0) + ", have " + std::to_string(rmax()));
  }
}

// ------------------------------------------------------------------ sph1d ---

namespace {

// A_t(r_j) = int_{r_j}^{Rmax} E ds, trapezoid, A_t(Rmax) = 0.
void reconstruct_At(const RadialGeom& g, const std::vector<double>& E,
                    std::vector<double>& At) {
  int n = g.n;
  At.resize(n);
  At[n - 1] = E[n - 1] * 0.5 * g.h;  // half cell from r_{n-1} to the edge
  for (int j = n - 2; j >= 0; --j)
    At[j] = At[j + 1] + 0.5 * g.h * (E[j] + E[j + 1]);
}

void apply_gauge(const RunConfig& cfg, SphericalState1D& st) {
  if (cfg.gauge != "origin") return;
  // shift so A_t(0) = 0; linear extrapolation dA_t/dr = -E_r at the origin
  double at0 = st.At[0] + st.Er[0] * st.g.r(0);
  for (double& a : st.At) a -= at0;
}

struct SphRhs {
  std::vector<cplx> dpsi, dPi;
  std::vector<double> dEr;
};

void sph_deriv(const RadialGeom& g, double t, const std::vector<cplx>& psi,
               const std::vector<cplx>& Pi, const std::vector<double>& Er,
               const SphSource* src, SphRhs& out) {
  int n = g.n;
  double h = g.h, h2 = h * h;
  out.dpsi.resize(n);
  out.dPi.resize(n);
  out.dEr.resize(n);
  std::vector<double> At;
  reconstruct_At(g, Er, At);
  par::for_each(n, [&](std::size_t jj) {
    int j = static_cast<int>(jj);
    double r = g.r(j);
    // odd ghost at the origin, zero ghost past the causal outer boundary
    cplx pm = (j == 0) ? -psi[0] : psi[j - 1];
    cplx pp = (j == n - 1) ? cplx(0.0) : psi[j + 1];
    cplx lap = (pp - 2.0 * psi[j] + pm) / h2;
    cplx dpsi_r = (pp - pm) / (2.0 * h);
    double Jr = std::imag(psi[j] * std::conj(dpsi_r)) / (r * r);
    cplx iAt(0.0, At[j]);
    out.dpsi[j] = Pi[j] - iAt * psi[j];
    out.dPi[j] = lap - iAt * Pi[j];
    out.dEr[j] = Jr;
    if (src) {
      if (src->S_psi) out.dpsi[j] += src->S_psi(t, r);
      if (src->S_Pi) out.dPi[j] += src->S_Pi(t, r);
      if (src->S_E) out.dEr[j] += src->S_E(t, r);
    }
  });
}

// r^2 J0 cumulative integral from the origin (smooth cap on the first cell)
std::vector<double> cumulative_r2(const RadialGeom& g,
                                  const std::vector<double>& f) {
  int n = g.n;
  std::vector<double> cum(n);
  double r0 = g.r(0);
  cum[0] = f[0] * r0 / 3.0;  // f = r^2 * density, cap ~ density(0) r0^3/3
  for (int j = 1; j < n; ++j)
    cum[j] = cum[j - 1] + 0.5 * g.h * (f[j] + f[j - 1]);
  return cum;
}

}  // namespace

SphericalState1D init_sph1d(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.scheme != "sph1d") throw ConfigParse("init_sph1d needs scheme = sph1d");
  SphericalState1D st;
  st.g = RadialGeom{cfg.n, cfg.h};
  st.t = 0.0;
  int n = cfg.n;
  st.psi.assign(n, cplx(0.0));
  st.Pi.assign(n, cplx(0.0));
  st.At.assign(n, 0.0);
  st.At_dot.assign(n, 0.0);
  st.Er.assign(n, 0.0);
  if (cfg.recipe == "zero") return st;

  for (int j = 0; j < n; ++j) {
    double r = st.g.r(j);
    double d = (r - cfg.r0) / cfg.sigma;
    double phi0 = cfg.amplitude * std::exp(-d * d);
    st.psi[j] = r * phi0;
    if (cfg.recipe == "charged-gaussian")
      st.Pi[j] = cplx(0.0, cfg.phase_speed) * st.psi[j];  // Pi = r D_t phi
    // real-pulse: phi_dot = 0, Pi stays 0
  }
  if (cfg.recipe == "charged-gaussian") {
    // exact radial Gauss integration r^2 E(r) = int_0^r s^2 J_0 ds
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j)
      f[j] = std::imag(st.psi[j] * std::conj(st.Pi[j]));  // r^2 J_0
    auto cum = cumulative_r2(st.g, f);
    for (int j = 0; j < n; ++j) st.Er[j] = cum[j] / (st.g.r(j) * st.g.r(j));
    reconstruct_At(st.g, st.Er, st.At);
    apply_gauge(cfg, st);
  }
  return st;
}

void step_sph1d(SphericalState1D& st, double dt, const SphSource* src) {
  if (dt / st.g.h > 0.9 + 1e-12)
    throw CFLViolation("dt/h = " + std::to_string(dt / st.g.h) + " exceeds 0.9");
  int n = st.g.n;
  SphRhs k1, k2, k3, k4;
  std::vector<cplx> psi2(n), Pi2(n);
  std::vector<double> Er2(n);
  auto blend = [&](const SphRhs& k, double a) {
    par::for_each(n, [&](std::size_t j) {
      psi2[j] = st.psi[j] + a * k.dpsi[j];
      Pi2[j] = st.Pi[j] + a * k.dPi[j];
      Er2[j] = st.Er[j] + a * k.dEr[j];
    });
  };
  sph_deriv(st.g, st.t, st.psi, st.Pi, st.Er, src, k1);
  blend(k1, 0.5 * dt);
  sph_deriv(st.g, st.t + 0.5 * dt, psi2, Pi2, Er2, src, k2);
  blend(k2, 0.5 * dt);
  sph_deriv(st.g, st.t + 0.5 * dt, psi2, Pi2, Er2, src, k3);
  blend(k3, dt);
  sph_deriv(st.g, st.t + dt, psi2, Pi2, Er2, src, k4);
  par::for_each(n, [&](std::size_t j) {
    st.psi[j] += dt / 6.0 * (k1.dpsi[j] + 2.0 * k2.dpsi[j] + 2.0 * k3.dpsi[j] + k4.dpsi[j]);
    st.Pi[j] += dt / 6.0 * (k1.dPi[j] + 2.0 * k2.dPi[j] + 2.0 * k3.dPi[j] + k4.dPi[j]);
    st.Er[j] += dt / 6.0 * (k1.dEr[j] + 2.0 * k2.dEr[j] + 2.0 * k3.dEr[j] + k4.dEr[j]);
  });
  st.t += dt;
  reconstruct_At(st.g, st.Er, st.At);
  // A_t_dot(r) = int_r^{Rmax} dE/dt ds = int_r^{Rmax} J_r ds
  std::vector<double> Jr(n);
  for (int j = 0; j < n; ++j) {
    double J0;
    sph_current(st, j, J0, Jr[j]);
  }
  reconstruct_At(st.g, Jr, st.At_dot);
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(std::abs(st.psi[j])) || !std::isfinite(std::abs(st.Pi[j])) ||
        !std::isfinite(st.Er[j]))
      throw NaNDetected("non-finite field at t = " + std::to_string(st.t) +
                        ", r = " + std::to_string(st.g.r(j)));
}

double sph_charge(const SphericalState1D& st) {
  double s = par::tiled_sum(st.g.n, [&](std::size_t j) {
    return std::imag(st.psi[j] * std::conj(st.Pi[j]));
  });
  return 4.0 * M_PI * st.g.h * s;
}

double sph_gauss_residual(const SphericalState1D& st) {
  // flux-difference form: (r^2 E)_j - (r^2 E)_{j-1} vs the trapezoid of r^2 J0
  int n = st.g.n;
  double h = st.g.h;
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j)
    f[j] = std::imag(st.psi[j] * std::conj(st.Pi[j]));
  double worst = 0.0, scale = 0.0;
  for (int j = 1; j < n; ++j) {
    double rj = st.g.r(j), rm = st.g.r(j - 1);
    double flux = (rj * rj * st.Er[j] - rm * rm * st.Er[j - 1]) / h;
    worst = std::max(worst, std::abs(flux - 0.5 * (f[j] + f[j - 1])));
    scale = std::max(scale, std::abs(f[j]));
  }
  return scale > 1e-30 ? worst / scale : worst;
}

double sph_energy(const SphericalState1D& st) {
  double s = par::tiled_sum(st.g.n, [&](std::size_t jj) {
    int j = static_cast<int>(jj);
    double r = st.g.r(j);
    cplx dpsi = radial_deriv(st.psi, st.g, j, -1.0);
    cplx Drphi_r = dpsi - st.psi[j] / r;  // r * D_r phi
    double em = 0.5 * st.Er[j] * st.Er[j] * r * r;
    double sc = 0.5 * (std::norm(st.Pi[j]) + std::norm(Drphi_r));
    return em + sc;
  });
  return 4.0 * M_PI * st.g.h * s;
}

// ------------------------------------------------------------------ box3d ---

double sponge_profile(const BoxGeom& g, double x, double y, double z) {
  double half = 0.5 * g.n * g.h;
  double start = 0.9 * half, width = 0.1 * half;
  double ramp = 0.0;
  for (double c : {x, y, z})
    ramp = std::max(ramp, (std::abs(c) - start) / width);
  ramp = std::min(std::max(ramp, 0.0), 1.0);
  double r2 = ramp * ramp;
  return 10.0 * r2 * r2;  // quartic ramp
}

namespace {

template <typename T>
T lap3(const std::vector<T>& u, const BoxGeom& g, int i, int j, int k) {
  // centered second difference, zero ghost outside the box (sponge region)
  double h2 = g.h * g.h;
  auto at = [&](int a, int b, int c) -> T {
    if (a < 0 || b < 0 || c < 0 || a >= g.n || b >= g.n || c >= g.n) return T{};
    return u[g.idx(a, b, c)];
  };
  T c = u[g.idx(i, j, k)];
  return (at(i + 1, j, k) + at(i - 1, j, k) + at(i, j + 1, k) + at(i, j - 1, k) +
          at(i, j, k + 1) + at(i, j, k - 1) - 6.0 * c) / h2;
}

template <typename T>
T diff_axis(const std::vector<T>& u, const BoxGeom& g, int i, int j, int k,
            int axis) {
  auto at = [&](int a, int b, int c) -> T {
    if (a < 0 || b < 0 || c < 0 || a >= g.n || b >= g.n || c >= g.n) return T{};
    return u[g.idx(a, b, c)];
  };
  int di = axis == 0, dj = axis == 1, dk = axis == 2;
  return (at(i + di, j + dj, k + dk) - at(i - di, j - dj, k - dk)) / (2.0 * g.h);
}

struct BoxRhs {
  std::vector<cplx> dphi, dphi_t;
  std::array<std::vector<double>, 4> dA, dA_t;
};

void box_deriv(const BoxState3D& st, double t, const BoxSource* src, BoxRhs& out) {
  const auto& f = st.f;
  const BoxGeom& g = f.g;
  std::size_t N = g.size();
  out.dphi.resize(N);
  out.dphi_t.resize(N);
  for (int a = 0; a < 4; ++a) {
    out.dA[a].resize(N);
    out.dA_t[a].resize(N);
  }
  int n = g.n;
  par::for_each(static_cast<std::size_t>(n) * n, [&](std::size_t slab) {
    int i = static_cast<int>(slab) / n, j = static_cast<int>(slab) % n;
    for (int k = 0; k < n; ++k) {
      std::size_t p = g.idx(i, j, k);
      double x = g.coord(i), y = g.coord(j), z = g.coord(k);
      double sp = sponge_profile(g, x, y, z);
      cplx phi = f.phi[p], phit = f.phi_t[p];
      double A0 = f.A[0][p];
      cplx adv(0.0);  // A_j d_j phi
      double asq = 0.0;
      for (int ax = 0; ax < 3; ++ax) {
        double Aj = f.A[ax + 1][p];
        adv += Aj * diff_axis(f.phi, g, i, j, k, ax);
        asq += Aj * Aj;
      }
      cplx ii(0.0, 1.0);
      out.dphi[p] = phit;
      out.dphi_t[p] = lap3(f.phi, g, i, j, k) +
                      2.0 * ii * (-A0 * phit + adv) + (A0 * A0 - asq) * phi -
                      sp * phit;
      // currents J_a = Im(phi conj(D_a phi))
      double J[4];
      J[0] = std::imag(phi * std::conj(phit + ii * A0 * phi));
      for (int ax = 0; ax < 3; ++ax) {
        cplx d = diff_axis(f.phi, g, i, j, k, ax) + ii * f.A[ax + 1][p] * phi;
        J[ax + 1] = std::imag(phi * std::conj(d));
      }
      for (int a = 0; a < 4; ++a) {
        out.dA[a][p] = f.A_t[a][p];
        out.dA_t[a][p] = lap3(f.A[a], g, i, j, k) + J[a] - sp * f.A_t[a][p];
      }
      if (src) {
        if (src->S_phi) out.dphi_t[p] += src->S_phi(t, x, y, z);
        for (int a = 0; a < 4; ++a)
          if (src->S_A[a]) out.dA_t[a][p] += src->S_A[a](t, x, y, z);
      }
    }
  });
}

}  // namespace

BoxState3D init_box3d(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.scheme != "box3d") throw ConfigParse("init_box3d needs scheme = box3d");
  BoxState3D st;
  st.t = 0.0;
  st.f.g = BoxGeom{cfg.n, cfg.h};
  std::size_t N = st.f.g.size();
  st.f.phi.assign(N, cplx(0.0));
  st.f.phi_t.assign(N, cplx(0.0));
  for (int a = 0; a < 4; ++a) {
    st.f.A[a].assign(N, 0.0);
    st.f.A_t[a].assign(N, 0.0);
  }
  if (cfg.recipe == "zero") return st;

  const BoxGeom& g = st.f.g;
  std::vector<cplx> phi0(N), phid(N);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        std::size_t p = g.idx(i, j, k);
        double x = g.coord(i), y = g.coord(j), z = g.coord(k);
        double r2 = x * x + y * y + z * z;
        cplx v = cfg.amplitude * std::exp(-r2 / (cfg.sigma * cfg.sigma));
        phi0[p] = v;
        phid[p] = (cfg.recipe == "charged-gaussian")
                      ? cplx(0.0, cfg.phase_speed) * v
                      : cplx(0.0);
      }
  st.f.phi = phi0;
  st.f.phi_t = phid;
  if (cfg.recipe == "charged-gaussian") {
    // Gauss-constrained E, then Lorenz data A_a = 0, A0_t = 0, A_j_t = E_j
    auto data = make_admissible_data(g, phi0, phid);
    for (int ax = 0; ax < 3; ++ax) st.f.A_t[ax + 1] = data.E[ax];
  }
  return st;
}

void step_box3d(BoxState3D& st, double dt, const BoxSource* src) {
  if (dt / st.f.g.h > 0.9 + 1e-12)
    throw CFLViolation("dt/h = " + std::to_string(dt / st.f.g.h) + " exceeds 0.9");
  std::size_t N = st.f.g.size();
  BoxRhs k1, k2, k3, k4;
  BoxState3D tmp = st;
  auto blend = [&](const BoxRhs& k, double a) {
    par::for_each(N, [&](std::size_t p) {
      tmp.f.phi[p] = st.f.phi[p] + a * k.dphi[p];
      tmp.f.phi_t[p] = st.f.phi_t[p] + a * k.dphi_t[p];
      for (int q = 0; q < 4; ++q) {
        tmp.f.A[q][p] = st.f.A[q][p] + a * k.dA[q][p];
        tmp.f.A_t[q][p] = st.f.A_t[q][p] + a * k.dA_t[q][p];
      }
    });
  };
  box_deriv(st, st.t, src, k1);
  blend(k1, 0.5 * dt);
  tmp.t = st.t + 0.5 * dt;
  box_deriv(tmp, tmp.t, src, k2);
  blend(k2, 0.5 * dt);
  box_deriv(tmp, tmp.t, src, k3);
  blend(k3, dt);
  tmp.t = st.t + dt;
  box_deriv(tmp, tmp.t, src, k4);
  par::for_each(N, [&](std::size_t p) {
    st.f.phi[p] += dt / 6.0 * (k1.dphi[p] + 2.0 * k2.dphi[p] + 2.0 * k3.dphi[p] + k4.dphi[p]);
    st.f.phi_t[p] += dt / 6.0 * (k1.dphi_t[p] + 2.0 * k2.dphi_t[p] + 2.0 * k3.dphi_t[p] + k4.dphi_t[p]);
    for (int q = 0; q < 4; ++q) {
      st.f.A[q][p] += dt / 6.0 * (k1.dA[q][p] + 2.0 * k2.dA[q][p] + 2.0 * k3.dA[q][p] + k4.dA[q][p]);
      st.f.A_t[q][p] += dt / 6.0 * (k1.dA_t[q][p] + 2.0 * k2.dA_t[q][p] + 2.0 * k3.dA_t[q][p] + k4.dA_t[q][p]);
    }
  });
  st.t += dt;
  for (std::size_t p = 0; p < N; ++p)
    if (!std::isfinite(std::abs(st.f.phi[p])) || !std::isfinite(st.f.A_t[0][p]))
      throw NaNDetected("non-finite field at t = " + std::to_string(st.t));
}

double box_gauge_residual(const BoxState3D& st) { return lorenz_residual(st.f); }

double box_charge(const BoxState3D& st) {
  const BoxGeom& g = st.f.g;
  double h3 = g.h * g.h * g.h;
  double s = par::tiled_sum(g.size(), [&](std::size_t p) {
    cplx d0 = st.f.phi_t[p] + cplx(0.0, st.f.A[0][p]) * st.f.phi[p];
    return std::imag(st.f.phi[p] * std::conj(d0));
  });
  return s * h3;
}

double box_energy(const BoxState3D& st) {
  const BoxGeom& g = st.f.g;
  auto F = curvature_from_potential(st.f);
  double h3 = g.h * g.h * g.h;
  int n = g.n;
  double s = par::tiled_sum(static_cast<std::size_t>(n) * n, [&](std::size_t slab) {
    int i = static_cast<int>(slab) / n, j = static_cast<int>(slab) % n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      std::size_t p = g.idx(i, j, k);
      double em = 0.0;
      for (int ax = 0; ax < 3; ++ax)
        em += F.E[ax][p] * F.E[ax][p] + F.H[ax][p] * F.H[ax][p];
      cplx ii(0.0, 1.0);
      cplx d0 = st.f.phi_t[p] + ii * st.f.A[0][p] * st.f.phi[p];
      double sc = std::norm(d0);
      for (int ax = 0; ax < 3; ++ax) {
        cplx d = diff_axis(st.f.phi, g, i, j, k, ax) +
                 ii * st.f.A[ax + 1][p] * st.f.phi[p];
        sc += std::norm(d);
      }
      acc += 0.5 * (em + sc);
    }
    return acc;
  });
  return s * h3;
}

// -------------------------------------------------------------------- run ---

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  par::set_threads(cfg.threads);
  RunResult res;
  res.cfg = cfg;
  // pick dt dividing the cadence so snapshots land exactly on multiples
  double dt0 = cfg.cfl * cfg.h;
  int per = std::max(1, static_cast<int>(std::ceil(cfg.cadence / dt0 - 1e-12)));
  double dt = cfg.cadence / per;
  int intervals = static_cast<int>(std::ceil(cfg.T / cfg.cadence - 1e-12));

  if (cfg.scheme == "sph1d") {
    SphericalState1D st = init_sph1d(cfg);
    auto record = [&]() {
      res.history.push_back(st);
      res.monitors.push_back({st.t, sph_charge(st), sph_gauss_residual(st), 0.0,
                              sph_energy(st)});
    };
    record();
    for (int c = 0; c < intervals; ++c)
      for (int m = 0; m < per; ++m) {
        step_sph1d(st, dt);
        if (m == per - 1) record();
      }
  } else {
    BoxState3D st = init_box3d(cfg);
    auto record = [&]() {
      auto F = curvature_from_potential(st.f);
      auto J = current_from_fields(st.f);
      res.box_history.push_back(st);
      res.monitors.push_back({st.t, box_charge(st), gauss_residual(F, J),
                              box_gauge_residual(st), box_energy(st)});
    };
    record();
    for (int c = 0; c < intervals; ++c)
      for (int m = 0; m < per; ++m) {
        step_box3d(st, dt);
        if (m == per - 1) record();
      }
  }
  return res;
}

void write_monitors(const std::string& path, const std::vector<MonitorRow>& rows) {
  std::ofstream out(path);
  out << "monitor-report v1\n";
  out << "t q gauss_residual gauge_residual energy\n";
  for (const auto& r : rows)
    out << format_g17(r.t) << ' ' << format_g17(r.q) << ' '
        << format_g17(r.gauss) << ' ' << format_g17(r.gauge) << ' '
        << format_g17(r.energy) << '\n';
}

std::vector<MonitorRow> read_monitors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open monitor file: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "monitor-report v1")
    throw std::runtime_error("bad monitor file header: " + line);
  std::getline(in, line);  // column names
  std::vector<MonitorRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    MonitorRow r;
    ss >> r.t >> r.q >> r.gauss >> r.gauge >> r.energy;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace csf
