#include "csf/charge.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "csf/parallel.hpp"

namespace csf {

namespace {

// trapezoid of f(r) r^2 over the radial nodes plus the [0, r_0] cap
double radial_integral(const RadialGeom& g, const std::vector<double>& f) {
  double s = 0.0;
  for (int j = 0; j + 1 < g.n; ++j) {
    double rj = g.r(j), rk = g.r(j + 1);
    s += 0.5 * (f[j] * rj * rj + f[j + 1] * rk * rk) * g.h;
  }
  s += f[0] * g.r(0) * g.r(0) * g.r(0) / 3.0;  // inner cap, f ~ const
  return s;
}

double radial_integral_stride2(const RadialGeom& g,
                               const std::vector<double>& f) {
  double s = 0.0;
  for (int j = 0; j + 2 < g.n; j += 2) {
    double rj = g.r(j), rk = g.r(j + 2);
    s += 0.5 * (f[j] * rj * rj + f[j + 2] * rk * rk) * 2.0 * g.h;
  }
  s += f[0] * g.r(0) * g.r(0) * g.r(0) / 3.0;
  return s;
}

}  // namespace

ChargeValue total_charge(const BoxGeom& g, const std::vector<double>& J0) {
  if (J0.size() != g.size()) throw GridMismatch("total_charge: J0 size");
  double h3 = g.h * g.h * g.h;
  double fine = par::tiled_sum(g.size(), [&](std::size_t p) { return J0[p]; });
  // stride-2 subsample as a crude error gauge
  double coarse = 0.0;
  for (int k = 0; k < g.n; k += 2)
    for (int j = 0; j < g.n; j += 2)
      for (int i = 0; i < g.n; i += 2) coarse += 8.0 * J0[g.idx(i, j, k)];
  return {fine * h3, std::abs(fine - coarse) * h3};
}

ChargeValue total_charge(const RadialGeom& g, const std::vector<double>& J0) {
  if (J0.size() != std::size_t(g.n)) throw GridMismatch("total_charge: J0 size");
  double fine = 4.0 * M_PI * radial_integral(g, J0);
  double coarse = 4.0 * M_PI * radial_integral_stride2(g, J0);
  return {fine, std::abs(fine - coarse)};
}

namespace {

CurvatureGrid3D shift_charge(const CurvatureGrid3D& F, double q, double t,
                             double offset, double sign) {
  CurvatureGrid3D out = F;
  const BoxGeom& g = F.g;
  par::for_each(g.size(), [&](std::size_t p) {
    int i = int(p % g.n), j = int((p / g.n) % g.n),
        k = int(p / (std::size_t(g.n) * g.n));
    double w[3] = {g.coord(i), g.coord(j), g.coord(k)};
    double r = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    double arg = r - t - offset;
    if (arg <= 0.0 || r <= 0.0) return;
    double amp = q * chi_plus(arg) / (4.0 * M_PI * r * r * r);
    for (int a = 0; a < 3; ++a) out.E[a][p] += sign * amp * w[a];
  });
  return out;
}

}  // namespace

CurvatureGrid3D subtract_charge(const CurvatureGrid3D& F, double q, double t,
                                double offset) {
  return shift_charge(F, q, t, offset, -1.0);
}

CurvatureGrid3D add_charge(const CurvatureGrid3D& F, double q, double t,
                           double offset) {
  return shift_charge(F, q, t, offset, +1.0);
}

namespace {

// The discrete Laplacian is the composition of the centered divergence and
// centered gradient (stencil +-2 per axis), so that div(grad u) inverts
// exactly and div(curl A) vanishes identically with the same fd_axis
// operators used everywhere else.  Two boundary layers are held fixed.
bool in_band(const BoxGeom& g, int i, int j, int k) {
  return i < 2 || j < 2 || k < 2 || i >= g.n - 2 || j >= g.n - 2 ||
         k >= g.n - 2;
}

void apply_neg_lap(const BoxGeom& g, const std::vector<double>& u,
                   std::vector<double>& out) {
  double iw = 1.0 / (4.0 * g.h * g.h);
  std::size_t s1 = 1, s2 = g.n, s3 = std::size_t(g.n) * g.n;
  par::for_each(g.size(), [&](std::size_t p) {
    int i = int(p % g.n), j = int((p / g.n) % g.n),
        k = int(p / (std::size_t(g.n) * g.n));
    if (in_band(g, i, j, k)) {
      out[p] = u[p];
      return;
    }
    out[p] = iw * (6.0 * u[p] - u[p - 2 * s1] - u[p + 2 * s1] -
                   u[p - 2 * s2] - u[p + 2 * s2] - u[p - 2 * s3] -
                   u[p + 2 * s3]);
  });
}

}  // namespace

std::vector<double> poisson_solve(
    const BoxGeom& g, const std::vector<double>& rhs,
    const std::function<double(double, double, double)>& boundary,
    double tol, int max_iter) {
  std::size_t np = g.size();
  std::vector<double> u(np, 0.0), b(np), r(np), pdir(np), Ap(np);

  // b = -rhs in the interior; boundary rows are identities u = boundary
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        std::size_t p = g.idx(i, j, k);
        if (in_band(g, i, j, k)) {
          u[p] = boundary(g.coord(i), g.coord(j), g.coord(k));
          b[p] = u[p];
        } else {
          b[p] = -rhs[p];
        }
      }

  apply_neg_lap(g, u, Ap);
  for (std::size_t p = 0; p < np; ++p) r[p] = b[p] - Ap[p];
  pdir = r;
  double rr = par::tiled_sum(np, [&](std::size_t p) { return r[p] * r[p]; });
  double bb = par::tiled_sum(np, [&](std::size_t p) { return b[p] * b[p]; });
  double target = tol * tol * std::max(bb, 1e-300);

  int it = 0;
  while (rr > target && it < max_iter) {
    apply_neg_lap(g, pdir, Ap);
    double pAp =
        par::tiled_sum(np, [&](std::size_t p) { return pdir[p] * Ap[p]; });
    double alpha = rr / pAp;
    par::for_each(np, [&](std::size_t p) {
      u[p] += alpha * pdir[p];
      r[p] -= alpha * Ap[p];
    });
    double rr_new =
        par::tiled_sum(np, [&](std::size_t p) { return r[p] * r[p]; });
    double beta = rr_new / rr;
    par::for_each(np, [&](std::size_t p) { pdir[p] = r[p] + beta * pdir[p]; });
    rr = rr_new;
    ++it;
  }
  if (rr > target) throw SolverNonConvergence(std::sqrt(rr / std::max(bb, 1e-300)));
  return u;
}

HodgeSplit hodge_decompose(const BoxGeom& g,
                           const std::array<std::vector<double>, 3>& E) {
  HodgeSplit out;
  out.g = g;
  std::size_t np = g.size();
  std::vector<double> div(np);
  par::for_each(np, [&](std::size_t p) {
    int i = int(p % g.n), j = int((p / g.n) % g.n),
        k = int(p / (std::size_t(g.n) * g.n));
    double d = 0.0;
    for (int a = 0; a < 3; ++a) d += fd_axis(E[a], g, i, j, k, a);
    div[p] = d;
  });
  double Q = total_charge(g, div).q;
  out.phi_pot = poisson_solve(g, div, [Q](double x, double y, double z) {
    double r = std::sqrt(x * x + y * y + z * z);
    return -Q / (4.0 * M_PI * std::max(r, 1e-12));
  });
  for (int a = 0; a < 3; ++a) {
    out.E_cf[a].resize(np);
    out.E_df[a].resize(np);
  }
  par::for_each(np, [&](std::size_t p) {
    int i = int(p % g.n), j = int((p / g.n) % g.n),
        k = int(p / (std::size_t(g.n) * g.n));
    for (int a = 0; a < 3; ++a) {
      out.E_cf[a][p] = fd_axis(out.phi_pot, g, i, j, k, a);
      out.E_df[a][p] = E[a][p] - out.E_cf[a][p];
    }
  });
  return out;
}

namespace {

// cumulative integral_0^{r_j} s^2 f(s) ds including the inner cap
std::vector<double> radial_cumulative(const RadialGeom& g,
                                      const std::vector<double>& f) {
  std::vector<double> cum(g.n);
  cum[0] = f[0] * g.r(0) * g.r(0) * g.r(0) / 3.0;
  for (int j = 1; j < g.n; ++j) {
    double rj = g.r(j - 1), rk = g.r(j);
    cum[j] = cum[j - 1] + 0.5 * (f[j - 1] * rj * rj + f[j] * rk * rk) * g.h;
  }
  return cum;
}

}  // namespace

std::vector<double> radial_E_from_density(const RadialGeom& g,
                                          const std::vector<double>& rho) {
  auto cum = radial_cumulative(g, rho);
  std::vector<double> E(g.n);
  for (int j = 0; j < g.n; ++j) E[j] = cum[j] / (g.r(j) * g.r(j));
  return E;
}

EllipticRatio weighted_elliptic_ratio(const RadialGeom& g,
                                      const std::vector<double>& rho,
                                      double delta) {
  if (!(delta > 0.5 && delta < 1.5))
    throw WeightOutOfRange("delta must lie in (1/2, 3/2)");
  if (rho.size() != std::size_t(g.n))
    throw GridMismatch("weighted_elliptic_ratio: rho size");

  auto cum = radial_cumulative(g, rho);
  double total = cum[g.n - 1];  // q / (4 pi)

  // radial gradient of InvLap(rho) + q/(4 pi r): (cum(r) - cum(inf)) / r^2
  std::vector<double> grad2(g.n), lp(g.n);
  for (int j = 0; j < g.n; ++j) {
    double r = g.r(j);
    double gr = (cum[j] - total) / (r * r);
    grad2[j] = std::pow(r, 2.0 * delta) * gr * gr;
    lp[j] = std::pow(std::pow(r, delta) * std::abs(rho[j]), 6.0 / 5.0);
  }
  EllipticRatio out;
  out.lhs = 4.0 * M_PI * radial_integral(g, grad2);
  out.rhs = std::pow(4.0 * M_PI * radial_integral(g, lp), 5.0 / 3.0);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

AdmissibleData make_admissible_data(
    const BoxGeom& g, const std::vector<cplx>& phi0,
    const std::vector<cplx>& phi0_dot,
    const std::array<std::vector<double>, 3>& E_df_seed,
    const std::array<std::vector<double>, 3>& H_seed) {
  std::size_t np = g.size();
  AdmissibleData out;
  out.phi0 = phi0;
  out.phi0_dot = phi0_dot;

  std::vector<double> rho(np);
  par::for_each(np, [&](std::size_t p) {
    rho[p] = std::imag(phi0[p] * std::conj(phi0_dot[p]));
  });
  double Q = total_charge(g, rho).q;
  auto psi = poisson_solve(g, rho, [Q](double x, double y, double z) {
    double r = std::sqrt(x * x + y * y + z * z);
    return -Q / (4.0 * M_PI * std::max(r, 1e-12));
  });
  for (int a = 0; a < 3; ++a) out.E[a].assign(np, 0.0);
  par::for_each(np, [&](std::size_t p) {
    int i = int(p % g.n), j = int((p / g.n) % g.n),
        k = int(p / (std::size_t(g.n) * g.n));
    for (int a = 0; a < 3; ++a) {
      out.E[a][p] = fd_axis(psi, g, i, j, k, a);
      if (!E_df_seed[a].empty()) out.E[a][p] += E_df_seed[a][p];
    }
  });

  if (!H_seed[0].empty()) {
    out.H = hodge_decompose(g, H_seed).E_df;
  } else {
    for (int a = 0; a < 3; ++a) out.H[a].assign(np, 0.0);
  }

  double worst_e = 0.0, worst_h = 0.0;
  for (int k = 2; k < g.n - 2; ++k)
    for (int j = 2; j < g.n - 2; ++j)
      for (int i = 2; i < g.n - 2; ++i) {
        std::size_t p = g.idx(i, j, k);
        double de = 0.0, dh = 0.0;
        for (int a = 0; a < 3; ++a) {
          de += fd_axis(out.E[a], g, i, j, k, a);
          dh += fd_axis(out.H[a], g, i, j, k, a);
        }
        worst_e = std::max(worst_e, std::abs(de - rho[p]));
        worst_h = std::max(worst_h, std::abs(dh));
      }
  out.constraint_residual = worst_e;
  out.div_H_residual = worst_h;
  return out;
}

void write_charge_report(const std::string& path,
                         const std::vector<ChargeReportRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "charge-report v1\n";
  f << "t q gauss_residual tail_slope\n";
  for (const auto& r : rows)
    f << format_g17(r.t) << ' ' << format_g17(r.q) << ' '
      << format_g17(r.gauss_residual) << ' ' << format_g17(r.tail_slope)
      << '\n';
}

std::vector<ChargeReportRow> read_charge_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || line != "charge-report v1")
    throw std::runtime_error("bad charge-report header in " + path);
  std::getline(f, line);  // column names
  std::vector<ChargeReportRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ChargeReportRow r;
    if (!(ss >> r.t >> r.q >> r.gauss_residual >> r.tail_slope))
      throw std::runtime_error("bad charge-report row in " + path);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace csf
