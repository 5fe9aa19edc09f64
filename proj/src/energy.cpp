#include "csf/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csf/parallel.hpp"

namespace csf {

EMTensorValue em_tensor_F(const TwoForm& F) {
  EMTensorValue out;
  out.kind = QKind::F;
  double inv = 0.0;  // F_gd F^gd
  for (int gidx = 0; gidx < 4; ++gidx)
    for (int d = 0; d < 4; ++d)
      inv += metric_sign(gidx) * metric_sign(d) * F(gidx, d) * F(gidx, d);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int gidx = 0; gidx < 4; ++gidx)
        s += metric_sign(gidx) * F(a, gidx) * F(b, gidx);
      out.Q[a][b] = s - 0.25 * (a == b ? metric_sign(a) : 0.0) * inv;
    }
  return out;
}

EMTensorValue em_tensor_phi(const std::array<cplx, 4>& Dphi) {
  EMTensorValue out;
  out.kind = QKind::Phi;
  double inv = 0.0;  // D^g phi conj(D_g phi), real
  for (int gidx = 0; gidx < 4; ++gidx)
    inv += metric_sign(gidx) * std::norm(Dphi[gidx]);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      out.Q[a][b] = std::real(Dphi[a] * std::conj(Dphi[b])) -
                    0.5 * (a == b ? metric_sign(a) : 0.0) * inv;
  return out;
}

EMTensorValue conformal_tensor(QKind kind, cplx phi,
                               const std::array<cplx, 4>& Dphi,
                               const SpacetimePoint& p, double floor) {
  double omega;
  Vec4 domega;
  if (kind == QKind::ConfI) {
    double r = p.r();
    if (r < floor) throw SingularSet("conformal tensor I at r ~ 0");
    omega = r;
    Vec3 om = p.omega();
    domega = {0.0, om[0], om[1], om[2]};
  } else if (kind == QKind::ConfII) {
    double uu = p.u() * p.ubar();
    if (std::abs(uu) < floor)
      throw SingularSet("conformal tensor II near the light cone");
    omega = uu;
    domega = {2.0 * p.t, -2.0 * p.x[0], -2.0 * p.x[1], -2.0 * p.x[2]};
  } else {
    throw std::invalid_argument("conformal_tensor: kind must be ConfI/ConfII");
  }
  // D_a(Omega phi) = (d_a Omega) phi + Omega D_a phi; the conformal factors
  // in the trace term cancel, leaving the Minkowski expression in psi.
  std::array<cplx, 4> Dpsi;
  for (int a = 0; a < 4; ++a) Dpsi[a] = domega[a] * phi + omega * Dphi[a];
  EMTensorValue out = em_tensor_phi(Dpsi);
  out.kind = kind;
  return out;
}

Vec4 momentum_density(const EMTensorValue& Q, const Vec4& X, double w) {
  Vec4 P{};
  for (int a = 0; a < 4; ++a) {
    double s = 0.0;
    for (int b = 0; b < 4; ++b) s += Q.Q[a][b] * X[b];
    P[a] = s * w;
  }
  return P;
}

double multiplier_bulk(const EMTensorValue& Q, const SpacetimePoint& p,
                       double s) {
  Mat4 pi = deformation_tensor_K0s(p, s);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      acc += metric_sign(a) * metric_sign(b) * Q.Q[a][b] * pi[a][b];
  return 0.5 * acc;
}

Vec4 tensor_divergence(const std::function<Mat4(const Vec4&)>& Qf,
                       const Vec4& x, double h) {
  Vec4 out{};
  for (int a = 0; a < 4; ++a) {
    Vec4 xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    Mat4 Qp = Qf(xp), Qm = Qf(xm);
    for (int b = 0; b < 4; ++b)
      out[b] += metric_sign(a) * (Qp[a][b] - Qm[a][b]) / (2.0 * h);
  }
  return out;
}

Vec4 conformal_divergence_residual_I(
    const std::function<cplx(const Vec4&)>& phi,
    const std::function<std::array<cplx, 4>(const Vec4&)>& dphi,
    const std::function<cplx(const Vec4&)>& G, const Vec4& x, double h) {
  auto Qat = [&](const Vec4& y) {
    SpacetimePoint p = point_from_coords(y);
    return conformal_tensor(QKind::ConfI, phi(y), dphi(y), p);
  };
  SpacetimePoint p = point_from_coords(x);
  double r = p.r();
  if (r < 10.0 * h) throw SingularSet("divergence stencil too close to r=0");

  // Christoffels of g~ = e^{2 sigma} g with sigma = -ln r:
  //   Gam^l_{mn} = d^l_m a_n + d^l_n a_m - eta_mn a^l,   a = d sigma
  Vec3 om = p.omega();
  Vec4 a_lo = {0.0, -om[0] / r, -om[1] / r, -om[2] / r};
  EMTensorValue Q0 = Qat(x);

  Vec4 out{};
  for (int b = 0; b < 4; ++b) {
    double s = 0.0;
    for (int m = 0; m < 4; ++m) {
      // partial_m Q_{mb} (centered)
      Vec4 xp = x, xm = x;
      xp[m] += h;
      xm[m] -= h;
      double dQ = (Qat(xp).Q[m][b] - Qat(xm).Q[m][b]) / (2.0 * h);
      // - Gam^l_{m m'} Q_{l b} - Gam^l_{m b} Q_{m l}, contracted with
      // g~^{m m'} = r^2 eta^{m m'}  (diagonal, m' = m)
      double corr = 0.0;
      for (int l = 0; l < 4; ++l) {
        // Gam^l_{mm} = 2 d^l_m a_m - eta_mm eta^{ll} a_l
        double gam_mm = 2.0 * (l == m ? a_lo[m] : 0.0) -
                        metric_sign(m) * metric_sign(l) * a_lo[l];
        double gam_mb = (l == m ? a_lo[b] : 0.0) + (l == b ? a_lo[m] : 0.0) -
                        (m == b ? metric_sign(m) : 0.0) * metric_sign(l) *
                            a_lo[l];
        corr += gam_mm * Q0.Q[l][b] + gam_mb * Q0.Q[m][l];
      }
      s += metric_sign(m) * (dQ - corr);
    }
    s *= r * r;  // g~^{mm'} = r^2 eta^{mm'}

    // source side: r^4 Re( G conj((1/r) D_b(r phi)) ), A = 0
    cplx ph = phi(x);
    std::array<cplx, 4> dp = dphi(x);
    Vec4 dr = {0.0, om[0], om[1], om[2]};
    cplx Db_rphi_over_r = (dr[b] / r) * ph + dp[b];
    double rhs = r * r * r * r *
                 std::real(G(x) * std::conj(Db_rphi_over_r));
    out[b] = s - rhs;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted energies over histories

namespace {

void check_window(const SphHistory& hist, double t0, double t1) {
  if (hist.empty()) throw WindowNotCovered("empty history");
  if (hist.front().t > t0 + 1e-9 || hist.back().t < t1 - 1e-9)
    throw WindowNotCovered("history does not cover the requested window");
  if (!(t1 > t0)) throw WindowNotCovered("bad window");
}

// slices with t in [t0, t1], and trapezoid weights in t
std::vector<int> window_slices(const SphHistory& hist, double t0, double t1,
                               std::vector<double>& wt) {
  std::vector<int> idx;
  for (int i = 0; i < int(hist.size()); ++i)
    if (hist[i].t >= t0 - 1e-12 && hist[i].t <= t1 + 1e-12) idx.push_back(i);
  wt.assign(idx.size(), 0.0);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double tl = k == 0 ? hist[idx[k]].t : hist[idx[k - 1]].t;
    double tr = k + 1 == idx.size() ? hist[idx[k]].t : hist[idx[k + 1]].t;
    wt[k] = 0.5 * (tr - tl);
  }
  return idx;
}

double rho_bar(double q, double t, double r, double offset) {
  double arg = r - t - offset;
  if (arg <= 0.0) return 0.0;
  return q * chi_plus(arg) / (4.0 * M_PI * r * r);
}

// linear interpolation bracket over slice times
bool bracket_t(const SphHistory& hist, double t, int& i0, double& frac) {
  if (t < hist.front().t - 1e-12 || t > hist.back().t + 1e-12) return false;
  int lo = 0, hi = int(hist.size()) - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (hist[mid].t <= t ? lo : hi) = mid;
  }
  i0 = lo;
  double dt = hist[hi].t - hist[lo].t;
  frac = dt > 0.0 ? (t - hist[lo].t) / dt : 0.0;
  return true;
}

// log-log least squares slope of integrand(r) over the outer decade
double outer_decade_slope(const RadialGeom& g, const std::vector<double>& f,
                          int jmax) {
  double rhi = g.r(jmax - 1), rlo = rhi / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int j = 0; j < jmax; ++j) {
    double r = g.r(j);
    if (r < rlo || f[j] <= 0.0) continue;
    double X = std::log(r), Y = std::log(f[j]);
    sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    ++cnt;
  }
  if (cnt < 4) return -1e9;  // integrand vanishes in the tail
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

}  // namespace

EnergyBreakdown energy_breakdown_F(const SphHistory& hist, double q,
                                   const WeightParams& wp, double t0,
                                   double t1, bool subtract_q,
                                   double offset) {
  check_window(hist, t0, t1);
  const RadialGeom& g = hist.front().g;
  int jmax = g.n - 2;  // halo
  EnergyBreakdown out;
  out.params = wp;
  out.t0 = t0;
  out.t1 = t1;
  out.charge_sq = subtract_q ? q * q : 0.0;
  out.fixed_time = {{"alpha", 0.0}, {"alphabar", 0.0}, {"rho", 0.0},
                    {"sigma", 0.0}};
  out.cone = {{"alpha", 0.0}, {"rho", 0.0}, {"sigma", 0.0}};
  out.spacetime = out.fixed_time;

  std::vector<double> wt;
  auto idx = window_slices(hist, t0, t1, wt);

  double best_slope = 0.0;
  double sup_fixed = -1.0;
  double st_rho = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& st = hist[idx[k]];
    std::vector<double> integrand(jmax);
    double fixed = 0.0, slab = 0.0;
    for (int j = 0; j < jmax; ++j) {
      double r = g.r(j);
      auto w = weights_at({st.t, {0.0, 0.0, r}}, wp);
      double rho = st.Er[j];
      if (subtract_q) rho -= rho_bar(q, st.t, r, offset);
      double tp2s = std::pow(w.tau_plus, 2.0 * wp.s);
      // radial integrand including the r^2 measure, so the fixed-time
      // integral converges iff its log-slope is < -1
      integrand[j] = tp2s * rho * rho * w.w_gamma * r * r;
      fixed += integrand[j] * 4.0 * M_PI * g.h;
      slab += tp2s * std::pow(w.tau_zero, 1.0 + 2.0 * wp.eps) * rho * rho *
              w.w_prime_gamma_eps * 4.0 * M_PI * r * r * g.h;
    }
    if (fixed > sup_fixed) {
      sup_fixed = fixed;
      best_slope = outer_decade_slope(g, integrand, jmax);
    }
    st_rho += slab * wt[k];
  }
  out.fixed_time["rho"] = std::max(sup_fixed, 0.0);
  out.spacetime["rho"] = st_rho;
  out.fixed_time_tail_slope = best_slope;
  out.tail_convergent = best_slope < -1.0;

  // cones u = const, rho weighted by tau_-^{2s}
  double du = std::max((t1 - t0) / 64.0, g.h);
  double sup_cone = 0.0;
  for (double u = t0 - g.r(jmax - 1); u <= t1; u += du) {
    double cone = 0.0;
    for (int j = 0; j < jmax; ++j) {
      double r = g.r(j), t = u + r;
      if (t < t0 || t > t1) continue;
      int i0;
      double frac;
      if (!bracket_t(hist, t, i0, frac)) continue;
      double er = (1.0 - frac) * hist[i0].Er[j] + frac * hist[i0 + 1].Er[j];
      if (subtract_q) er -= rho_bar(q, t, r, offset);
      auto w = weights_at({t, {0.0, 0.0, r}}, wp);
      cone += std::pow(w.tau_minus, 2.0 * wp.s) * er * er * w.w_gamma * 4.0 *
              M_PI * r * r * g.h;
    }
    sup_cone = std::max(sup_cone, cone);
  }
  out.cone["rho"] = sup_cone;
  return out;
}

EnergyBreakdown energy_breakdown_phi(const SphHistory& hist,
                                     const WeightParams& wp, double t0,
                                     double t1) {
  check_window(hist, t0, t1);
  const RadialGeom& g = hist.front().g;
  int jmax = g.n - 2;
  EnergyBreakdown out;
  out.params = wp;
  out.t0 = t0;
  out.t1 = t1;
  out.fixed_time = {{"DL_rphi", 0.0}, {"DLbar_phi", 0.0}, {"slashD_phi", 0.0},
                    {"phi_over_r", 0.0}};
  out.cone = {{"DL_rphi", 0.0}, {"slashD_phi", 0.0},
              {"u_phi_over_ubar_r", 0.0}};
  out.spacetime = out.fixed_time;

  std::vector<double> wt;
  auto idx = window_slices(hist, t0, t1, wt);

  // per-slice component arrays for interpolation
  std::vector<std::vector<cplx>> dl(hist.size()), dlb(hist.size()),
      por(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    dl[i].resize(jmax);
    dlb[i].resize(jmax);
    por[i].resize(jmax);
    for (int j = 0; j < jmax; ++j) {
      auto c = sph_phi_components(hist[i], j);
      dl[i][j] = c.DL_rphi_over_r;
      dlb[i][j] = c.DLbar_phi;
      por[i][j] = c.phi_over_r;
    }
  }

  double sup_fixed = -1.0, best_slope = 0.0;
  std::map<std::string, double> best_fixed;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    int i = idx[k];
    double f_dl = 0.0, f_dlb = 0.0, f_por = 0.0;
    double s_dl = 0.0, s_dlb = 0.0, s_por = 0.0;
    std::vector<double> integrand(jmax);
    for (int j = 0; j < jmax; ++j) {
      double r = g.r(j);
      auto w = weights_at({hist[i].t, {0.0, 0.0, r}}, wp);
      double tp2s = std::pow(w.tau_plus, 2.0 * wp.s);
      double tm2s = std::pow(w.tau_minus, 2.0 * wp.s);
      double tz = std::pow(w.tau_zero, 1.0 + 2.0 * wp.eps);
      double meas = 4.0 * M_PI * r * r * g.h;
      double a = tp2s * std::norm(dl[i][j]);
      double b = tm2s * std::norm(dlb[i][j]);
      double c = tp2s * std::norm(por[i][j]);
      integrand[j] = (a + b + c) * w.w_gamma * r * r;
      f_dl += a * w.w_gamma * meas;
      f_dlb += b * w.w_gamma * meas;
      f_por += c * w.w_gamma * meas;
      s_dl += a * w.w_prime_gamma_eps * meas;
      s_dlb += tz * b * w.w_prime_gamma_eps * meas;
      s_por += tz * c * w.w_prime_gamma_eps * meas;
    }
    double fixed = f_dl + f_dlb + f_por;
    if (fixed > sup_fixed) {
      sup_fixed = fixed;
      best_fixed = {{"DL_rphi", f_dl}, {"DLbar_phi", f_dlb},
                    {"slashD_phi", 0.0}, {"phi_over_r", f_por}};
      best_slope = outer_decade_slope(g, integrand, jmax);
    }
    out.spacetime["DL_rphi"] += s_dl * wt[k];
    out.spacetime["DLbar_phi"] += s_dlb * wt[k];
    out.spacetime["phi_over_r"] += s_por * wt[k];
  }
  if (sup_fixed >= 0.0) out.fixed_time = best_fixed;
  out.fixed_time_tail_slope = best_slope;
  out.tail_convergent = best_slope < -1.0;

  double du = std::max((t1 - t0) / 64.0, g.h);
  double sup_dl = 0.0, sup_uphi = 0.0;
  for (double u = t0 - g.r(jmax - 1); u <= t1; u += du) {
    double c_dl = 0.0, c_uphi = 0.0;
    for (int j = 0; j < jmax; ++j) {
      double r = g.r(j), t = u + r;
      if (t < t0 || t > t1) continue;
      int i0;
      double frac;
      if (!bracket_t(hist, t, i0, frac)) continue;
      cplx vdl = (1.0 - frac) * dl[i0][j] + frac * dl[i0 + 1][j];
      cplx vpor = (1.0 - frac) * por[i0][j] + frac * por[i0 + 1][j];
      auto w = weights_at({t, {0.0, 0.0, r}}, wp);
      double meas = 4.0 * M_PI * r * r * g.h;
      double tp2s = std::pow(w.tau_plus, 2.0 * wp.s);
      double uu = t - r, ub = t + r;
      double ubar_w = 1.0 + ub * ub;
      c_dl += tp2s * std::norm(vdl) * w.w_gamma * meas;
      c_uphi += tp2s * (uu * uu) / ubar_w * std::norm(vpor) * w.w_gamma *
                meas;
    }
    sup_dl = std::max(sup_dl, c_dl);
    sup_uphi = std::max(sup_uphi, c_uphi);
  }
  out.cone["DL_rphi"] = sup_dl;
  out.cone["u_phi_over_ubar_r"] = sup_uphi;
  return out;
}

CurrentNormValue current_norm(const RadialGeom& g, const RadialCurrent& J,
                              const WeightParams& wp, double t0, double t1,
                              double dt) {
  CurrentNormValue out;
  int jmax = g.n - 2;
  int nt = std::max(1, int(std::round((t1 - t0) / dt)));
  for (int it = 0; it <= nt; ++it) {
    double t = t0 + (t1 - t0) * it / nt;
    double wtt = (it == 0 || it == nt) ? 0.5 * (t1 - t0) / nt
                                       : (t1 - t0) / nt;
    for (int j = 0; j < jmax; ++j) {
      double r = g.r(j);
      double J0, Jr;
      J(t, r, J0, Jr);
      double JL = J0 + Jr, JLb = J0 - Jr;
      auto w = weights_at({t, {0.0, 0.0, r}}, wp);
      double meas = 4.0 * M_PI * r * r * g.h * wtt;
      out.JL += std::pow(w.tau_plus, 2.0 * wp.s) *
                std::pow(w.tau_zero, -1.0 - 2.0 * wp.eps) * w.tau_minus *
                JL * JL * w.w_gamma_eps * meas;
      out.JLbar += std::pow(w.tau_zero, 2.0 * wp.s - 1.0 - 2.0 * wp.eps) *
                   std::pow(w.tau_minus, 2.0 * wp.s + 1.0) * JLb * JLb *
                   w.w_gamma_eps * meas;
      // slash-J = 0 in spherical symmetry
    }
  }
  return out;
}

CurrentNormValue current_norm(const SphHistory& hist, const WeightParams& wp,
                              double t0, double t1) {
  check_window(hist, t0, t1);
  auto J = [&](double t, double r, double& J0, double& Jr) {
    int i0;
    double frac;
    J0 = Jr = 0.0;
    if (!bracket_t(hist, t, i0, frac)) return;
    const RadialGeom& g = hist.front().g;
    int j = std::min(int(r / g.h), g.n - 1);
    double a0, ar, b0, br;
    sph_current(hist[i0], j, a0, ar);
    sph_current(hist[i0 + 1], j, b0, br);
    J0 = (1.0 - frac) * a0 + frac * b0;
    Jr = (1.0 - frac) * ar + frac * br;
  };
  const RadialGeom& g = hist.front().g;
  double dt = hist.size() > 1 ? hist[1].t - hist[0].t : (t1 - t0);
  return current_norm(g, J, wp, t0, t1, dt);
}

AuditRatios estimate_audit_F(const SphHistory& hist, double q,
                             const WeightParams& wp, double t0, double t1) {
  AuditRatios out;
  out.lhs = energy_breakdown_F(hist, q, wp, t0, t1).total();

  const RadialGeom& g = hist.front().g;
  int jmax = g.n - 2;
  // source quadrature with the slab weights of the main estimate
  double src = 0.0;
  std::vector<double> wt;
  auto idx = window_slices(hist, t0, t1, wt);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& st = hist[idx[k]];
    for (int j = 0; j < jmax; ++j) {
      double r = g.r(j);
      double J0, Jr;
      sph_current(st, j, J0, Jr);
      double JL = J0 + Jr, JLb = J0 - Jr;
      auto w = weights_at({st.t, {0.0, 0.0, r}}, wp);
      double meas = 4.0 * M_PI * r * r * g.h * wt[k];
      src += (std::pow(w.tau_plus, 2.0 * wp.s + 1.0 + 2.0 * wp.eps) *
                  std::pow(w.tau_minus, -2.0 * wp.eps) * JL * JL +
              std::pow(w.tau_plus, 1.0 + 2.0 * wp.eps - 2.0 * wp.s) *
                  std::pow(w.tau_minus, 4.0 * wp.s - 2.0 * wp.eps) * JLb *
                  JLb) *
             w.w_gamma_eps * meas;
    }
  }
  // initial data: E^df = 0 and H = 0 in spherical symmetry, so only the
  // L^{6/5} norm of J_0(0) contributes
  const auto& st0 = hist[idx.front()];
  double l65 = 0.0;
  for (int j = 0; j < jmax; ++j) {
    double r = g.r(j);
    double J0, Jr;
    sph_current(st0, j, J0, Jr);
    l65 += std::pow(std::pow(1.0 + r, wp.s + wp.gamma) * std::abs(J0),
                    6.0 / 5.0) *
           4.0 * M_PI * r * r * g.h;
  }
  out.rhs = src + std::pow(l65, 5.0 / 3.0);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

AuditRatios estimate_audit_phi(const SphHistory& hist, const WeightParams& wp,
                               double t0, double t1) {
  AuditRatios out;
  out.lhs = energy_breakdown_phi(hist, wp, t0, t1).total();

  const RadialGeom& g = hist.front().g;
  int jmax = g.n - 2;
  std::vector<double> wt;
  auto idx = window_slices(hist, t0, t1, wt);
  const auto& st0 = hist[idx.front()];
  double init = 0.0;
  for (int j = 0; j < jmax; ++j) {
    double r = g.r(j);
    cplx dpsi = radial_deriv(st0.psi, g, j, -1.0);
    double Dphi2 = std::norm(st0.Pi[j] / r) +
                   std::norm(dpsi / r - st0.psi[j] / (r * r));
    init += std::pow(1.0 + r * r, wp.s + wp.gamma) * Dphi2 * 4.0 * M_PI * r *
            r * g.h;
  }
  out.rhs = init;  // G = 0 for true solutions
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

void write_energy_report(const std::string& path,
                         const std::vector<EnergyReportRow>& rows,
                         const std::vector<std::pair<std::string, double>>&
                             summary) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "energy-report v1\n";
  f << "t_or_u component weight_tag value\n";
  for (const auto& r : rows)
    f << format_g17(r.t_or_u) << ' ' << r.component << ' ' << r.weight_tag
      << ' ' << format_g17(r.value) << '\n';
  if (!summary.empty()) {
    f << "summary\n";
    for (const auto& [k, v] : summary) f << k << ' ' << format_g17(v) << '\n';
  }
}

}  // namespace csf
