#include "csf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csf/parallel.hpp"

namespace csf {

// ----------------------------------------------------------- decay fits -----

const char* locus_name(Locus l) {
  switch (l) {
    case Locus::FixedTimeSlice: return "fixed-t-slice";
    case Locus::FixedUCone: return "fixed-u-cone";
    case Locus::FixedRWorldline: return "fixed-r-worldline";
  }
  return "?";
}

DecayFit fit_decay(const std::string& component, Locus locus,
                   const std::vector<DecaySample>& series,
                   const WeightModel& model) {
  DecayFit fit;
  fit.component = component;
  fit.locus = locus;
  fit.samples = static_cast<int>(series.size());
  fit.fitted_plus = locus != Locus::FixedTimeSlice;
  if (series.size() < 8)
    throw InsufficientDecade(component + ": need >= 8 samples, have " +
                             std::to_string(series.size()));
  double wmin = 1e300, wmax = 0.0;
  std::vector<double> lx, ly;
  lx.reserve(series.size());
  ly.reserve(series.size());
  for (const auto& s : series) {
    if (!(s.value > 1e-300))
      throw NonPositiveSamples(component + ": non-positive sample");
    double w = fit.fitted_plus ? s.tau_plus : s.tau_minus;
    double other = fit.fitted_plus ? s.tau_minus : s.tau_plus;
    double known = fit.fitted_plus ? model.known_p_minus : model.known_p_plus;
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
    lx.push_back(std::log(w));
    ly.push_back(std::log(s.value) - known * std::log(other));
  }
  if (wmax / wmin < 10.0)
    throw InsufficientDecade(component + ": weight range " +
                             std::to_string(wmax / wmin) + " < one decade");
  double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double d = ly[i] - slope * lx[i] - icpt;
    rss += d * d;
  }
  fit.residual = std::sqrt(rss / n);
  if (fit.fitted_plus) {
    fit.p_plus = slope;
    fit.p_minus = model.known_p_minus;
  } else {
    fit.p_minus = slope;
    fit.p_plus = model.known_p_plus;
  }
  return fit;
}

namespace {

DecaySample make_sample(double t, double r, double v) {
  return {std::sqrt(1.0 + (t + r) * (t + r)),
          std::sqrt(1.0 + (t - r) * (t - r)), v};
}

}  // namespace

std::vector<DecaySample> sample_slice(const SphericalState1D& st,
                                      const SphExtract& f, double r_lo,
                                      double r_hi) {
  std::vector<DecaySample> out;
  for (int j = 0; j < st.g.n; ++j) {
    double r = st.g.r(j);
    if (r < r_lo || r > r_hi) continue;
    out.push_back(make_sample(st.t, r, f(st, j)));
  }
  return out;
}

std::vector<DecaySample> sample_cone(const SphHistory& hist,
                                     const SphExtract& f, double u) {
  std::vector<DecaySample> out;
  for (const auto& st : hist) {
    double r = st.t - u;
    int j = static_cast<int>(std::lround(r / st.g.h - 0.5));
    if (j < 1 || j >= st.g.n - 1) continue;
    out.push_back(make_sample(st.t, st.g.r(j), f(st, j)));
  }
  return out;
}

std::vector<DecaySample> sample_worldline(const SphHistory& hist,
                                          const SphExtract& f, double r,
                                          double t_min) {
  std::vector<DecaySample> out;
  for (const auto& st : hist) {
    if (st.t < t_min) continue;
    int j = static_cast<int>(std::lround(r / st.g.h - 0.5));
    if (j < 0 || j >= st.g.n) continue;
    out.push_back(make_sample(st.t, st.g.r(j), f(st, j)));
  }
  return out;
}

void write_peel_report(const std::string& path,
                       const std::vector<DecayFit>& fits) {
  std::ofstream out(path);
  out << "peel-report v1\n";
  out << "component locus p_plus p_minus fitted residual samples\n";
  for (const auto& f : fits)
    out << f.component << ' ' << locus_name(f.locus) << ' '
        << format_g17(f.p_plus) << ' ' << format_g17(f.p_minus) << ' '
        << (f.fitted_plus ? "tau_plus" : "tau_minus") << ' '
        << format_g17(f.residual) << ' ' << f.samples << '\n';
}

// ----------------------------------------------------- charge jump test -----

ChargeJumpReport charge_jump_check(const SphHistory& hist, double q,
                                   double r_interior) {
  if (std::abs(q) < 1e-12)
    throw NoChargedData("charge " + std::to_string(q) + " below 1e-12");
  ChargeJumpReport rep;
  rep.q = q;
  const SphericalState1D* last_ext = nullptr;
  double ext_rho_late = 0.0;
  for (const auto& st : hist) {
    bool any = false;
    for (int j = 0; j < st.g.n; ++j) {
      double r = st.g.r(j);
      if (r <= 2.0 * st.t + 10.0) continue;
      double coul = q / (4.0 * M_PI * r * r);
      double rel = std::abs(st.Er[j] - coul) / std::abs(coul);
      rep.max_exterior_rel_err = std::max(rep.max_exterior_rel_err, rel);
      rep.max_rho_tilde_ratio = std::max(rep.max_rho_tilde_ratio, rel);
      ++rep.exterior_samples;
      if (!any) ext_rho_late = std::abs(st.Er[j]);  // innermost exterior cell
      any = true;
    }
    if (any) last_ext = &st;
  }
  if (rep.exterior_samples == 0 || last_ext == nullptr)
    throw RegionViolation("no samples with r > 2t + 10 in the stored slices");

  SphExtract rho = [](const SphericalState1D& st, int j) {
    return std::abs(st.Er[j]);
  };
  auto series = sample_worldline(hist, rho, r_interior, r_interior + 5.0);
  rep.interior_fit = fit_decay("rho-interior", Locus::FixedRWorldline, series);

  double rho_int_late = 0.0;
  {
    int j = static_cast<int>(std::lround(r_interior / last_ext->g.h - 0.5));
    if (j >= 0 && j < last_ext->g.n) rho_int_late = std::abs(last_ext->Er[j]);
  }
  rep.jump_ratio = ext_rho_late / std::max(rho_int_late, 1e-300);
  return rep;
}

// -------------------------------------------------------- ratio reports -----

void write_ratio_report(const std::string& path,
                        const std::vector<RatioReport>& reports) {
  std::ofstream out(path);
  out << "ratio-report v1\n";
  out << "inequality case lhs rhs ratio status\n";
  for (const auto& rep : reports) {
    for (const auto& c : rep.cases)
      out << rep.inequality << ' ' << c.label << ' ' << format_g17(c.lhs)
          << ' ' << format_g17(c.rhs) << ' ' << format_g17(c.ratio) << ' '
          << (c.skipped ? "skip" : "ok") << '\n';
    out << rep.inequality << " summary " << format_g17(rep.max_ratio) << ' '
        << rep.violations << " - -\n";
  }
}

RatioReport kato_harness(const GaugeField3D& f, double tol_factor) {
  f.check();
  const BoxGeom& g = f.g;
  int n = g.n;
  double floor = 1e-14;
  double scale = 0.0;
  for (const auto& v : f.phi) scale = std::max(scale, std::abs(v));
  double tol = tol_factor * g.h * g.h * std::max(scale, 1e-300);

  std::vector<double> absphi(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) absphi[p] = std::abs(f.phi[p]);

  RatioReport rep;
  rep.inequality = "kato";
  for (int mu = 0; mu < 4; ++mu) {
    RatioCase rc;
    rc.label = std::string("X=d_") + "txyz"[mu];
    double worst_ratio = 0.0, worst_lhs = 0.0, worst_rhs = 0.0;
    long viol = 0;
    for (int i = 2; i < n - 2; ++i)
      for (int j = 2; j < n - 2; ++j)
        for (int k = 2; k < n - 2; ++k) {
          std::size_t p = g.idx(i, j, k);
          double lhs, rhs;
          if (mu == 0) {
            if (absphi[p] < floor) continue;
            lhs = std::abs(std::real(std::conj(f.phi[p]) * f.phi_t[p])) /
                  absphi[p];
            rhs = std::abs(f.phi_t[p] + cplx(0.0, f.A[0][p]) * f.phi[p]);
          } else {
            lhs = std::abs(fd_axis(absphi, g, i, j, k, mu - 1));
            cplx d = fd_axis(f.phi, g, i, j, k, mu - 1) +
                     cplx(0.0, f.A[mu][p]) * f.phi[p];
            rhs = std::abs(d);
          }
          if (lhs > rhs + tol) ++viol;
          double ratio = lhs / (rhs + tol);
          if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_lhs = lhs;
            worst_rhs = rhs;
          }
        }
    rc.lhs = worst_lhs;
    rc.rhs = worst_rhs;
    rc.ratio = worst_ratio;
    rep.violations += viol;
    rep.max_ratio = std::max(rep.max_ratio, worst_ratio);
    rep.cases.push_back(rc);
  }
  return rep;
}

RatioReport poincare_harness(const SphericalState1D& st, double p, double q,
                             const std::string& region) {
  if (p <= -1.0)
    throw ExponentOutOfRange("need p > -1, got p = " + std::to_string(p));
  if (region == "full") {
    if (!(std::abs(q) < p + 1.0))
      throw ExponentOutOfRange("full-space form needs |q| < p + 1");
  } else if (region == "exterior") {
    if (!(p + 1.0 + q > 0.0))
      throw ExponentOutOfRange("exterior form needs 0 < p + 1 + q");
  } else if (region == "interior") {
    if (!(q < p + 1.0))
      throw ExponentOutOfRange("interior form needs q < p + 1");
  } else {
    throw ExponentOutOfRange("unknown region: " + region);
  }
  double t = st.t;
  double lhs = 0.0, rhs = 0.0;
  // skip the origin cell: its derivative stencil bakes in the odd-parity
  // ghost, which is an artifact for profiles that do not vanish at r = 0
  for (int j = 1; j < st.g.n; ++j) {
    double r = st.g.r(j);
    if (region == "exterior" && !(t < r)) continue;
    if (region == "interior" && !(r < t)) continue;
    double tp = std::sqrt(1.0 + (t + r) * (t + r));
    double tm = std::sqrt(1.0 + (t - r) * (t - r));
    double dx = 4.0 * M_PI * r * r * st.g.h;
    double phi2 = std::norm(st.psi[j] / r);
    // radial gauge A_r = 0: D_r(r phi) = d_r psi
    double drphi2 = std::norm(radial_deriv(st.psi, st.g, j, -1.0) / r);
    lhs += std::pow(tm, p) * std::pow(tp, q) * phi2 * dx;
    rhs += std::pow(tm, p + 2.0) * std::pow(tp, q) * drphi2 * dx;
  }
  RatioReport rep;
  rep.inequality = "radial-poincare";
  RatioCase rc;
  rc.label = region + "(p=" + std::to_string(p) + ",q=" + std::to_string(q) + ")";
  rc.lhs = lhs;
  rc.rhs = rhs;
  if (lhs == 0.0 && rhs == 0.0) {
    rc.skipped = true;
  } else if (rhs == 0.0) {
    rc.ratio = std::numeric_limits<double>::infinity();  // out of hypothesis
    ++rep.violations;
  } else {
    rc.ratio = lhs / rhs;
  }
  rep.max_ratio = rc.ratio;
  rep.cases.push_back(rc);
  return rep;
}

RatioReport sobolev_harness(const std::string& kind,
                            const std::vector<SobolevShell>& shells) {
  if (kind != "exterior" && kind != "interior")
    throw RegionViolation("kind must be exterior or interior: " + kind);
  RatioReport rep;
  rep.inequality = kind + "-sobolev";
  const int nq = 4000;
  for (const auto& sh : shells) {
    RatioCase rc;
    rc.label = sh.label;
    if (!(sh.r_hi > sh.r_lo) || sh.t < 1.0)
      throw RegionViolation(sh.label + ": need r_hi > r_lo and t >= 1");
    if (kind == "exterior" && !(sh.t < 2.0 * sh.r_lo))
      throw RegionViolation(sh.label + ": exterior kind needs t < 2r on the shell");
    if (kind == "interior" && !(sh.r_hi < 0.75 * sh.t))
      throw RegionViolation(sh.label + ": interior kind needs r < (3/4)t");
    double dr = (sh.r_hi - sh.r_lo) / nq;
    double sup = 0.0, l2 = 0.0, l2w = 0.0, l4 = 0.0, l2S = 0.0, l2B = 0.0;
    for (int i = 0; i < nq; ++i) {
      double r = sh.r_lo + (i + 0.5) * dr;
      double fv = sh.f(r), dfr = sh.df_dr(r);
      double vol = 4.0 * M_PI * r * r * dr;
      sup = std::max(sup, std::abs(fv));
      l2 += fv * fv * vol;
      double tm = std::sqrt(1.0 + (sh.t - r) * (sh.t - r));
      l2w += tm * tm * dfr * dfr * vol;
      l4 += fv * fv * fv * fv * vol;
      if (sh.df_dt) {
        double dft = sh.df_dt(r);
        double Sf = sh.t * dft + r * dfr;     // scaling field
        double Bf = sh.t * dfr + r * dft;     // radial boost combination
        l2S += Sf * Sf * vol;
        l2B += Bf * Bf * vol;
      }
    }
    if (sup == 0.0) {
      rc.skipped = true;
      rep.cases.push_back(rc);
      continue;
    }
    if (kind == "exterior") {
      // L^inf_r(L^2(S^2)) form at q = 2; angular terms vanish for
      // spherically symmetric f, the tau_+ power is zero
      double rc2 = 0.5 * (sh.r_lo + sh.r_hi);
      double tauminus = std::sqrt(1.0 + (sh.t - rc2) * (sh.t - rc2));
      rc.lhs = sup * std::sqrt(4.0 * M_PI);
      rc.rhs = std::pow(tauminus, -0.5) * (std::sqrt(l2) + std::sqrt(l2w));
    } else {
      // L^4 against L^2 of {f, Sf, Omega_{0i} f}; for symmetric f the sum
      // over the three boosts carries the angular factor sqrt(3)
      rc.lhs = std::pow(l4, 0.25);
      rc.rhs = std::pow(sh.t, -0.75) *
               (std::sqrt(l2) + std::sqrt(l2S) + std::sqrt(3.0 * l2B));
    }
    rc.ratio = rc.lhs / rc.rhs;
    rep.max_ratio = std::max(rep.max_ratio, rc.ratio);
    rep.cases.push_back(rc);
  }
  return rep;
}

// ----------------------------------------------- identity residual checks ---

namespace {

Vec4 shifted(const Vec4& x, int mu, double d) {
  Vec4 y = x;
  y[mu] += d;
  return y;
}

constexpr double kEta[4] = {-1.0, 1.0, 1.0, 1.0};

}  // namespace

double box_commutator_residual(const SpacetimeScalarField& fld,
                               const AffineField& X, const Vec4& x, double h) {
  // deformation tensor of the affine field must be a multiple of the metric
  Mat4 pi{};
  double mnorm = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int nn = 0; nn < 4; ++nn) {
      pi[m][nn] = kEta[nn] * X.M[nn][m] + kEta[m] * X.M[m][nn];
      mnorm = std::max(mnorm, std::abs(X.M[m][nn]));
    }
  double trpi = 0.0;
  for (int m = 0; m < 4; ++m) trpi += kEta[m] * pi[m][m];
  double conf = trpi / 4.0;
  for (int m = 0; m < 4; ++m)
    for (int nn = 0; nn < 4; ++nn) {
      double target = (m == nn) ? conf / kEta[m] : 0.0;
      if (std::abs(pi[m][nn] - target) > 1e-12 * (1.0 + mnorm))
        throw FieldNotConformalKilling("deformation tensor not proportional to the metric");
    }

  auto Xat = [&](const Vec4& y) {
    return X.eval(point_from_coords(y));
  };
  auto Dmu = [&](const Vec4& y, int mu) -> cplx {
    cplx d = (fld.phi(shifted(y, mu, h)) - fld.phi(shifted(y, mu, -h))) / (2.0 * h);
    return d + cplx(0.0, fld.A[mu](y)) * fld.phi(y);
  };
  // Box^C of an arbitrary sampled complex field
  auto cbox_of = [&](const std::function<cplx(const Vec4&)>& u, const Vec4& y) {
    cplx acc(0.0);
    for (int mu = 0; mu < 4; ++mu) {
      auto Du = [&](const Vec4& z) -> cplx {
        return (u(shifted(z, mu, h)) - u(shifted(z, mu, -h))) / (2.0 * h) +
               cplx(0.0, fld.A[mu](z)) * u(z);
      };
      cplx ddu = (Du(shifted(y, mu, h)) - Du(shifted(y, mu, -h))) / (2.0 * h) +
                 cplx(0.0, fld.A[mu](y)) * Du(y);
      acc += kEta[mu] * ddu;
    }
    return acc;
  };
  std::function<cplx(const Vec4&)> phi = fld.phi;
  std::function<cplx(const Vec4&)> DXphi = [&](const Vec4& y) -> cplx {
    Vec4 Xv = Xat(y);
    cplx acc(0.0);
    for (int mu = 0; mu < 4; ++mu) acc += Xv[mu] * Dmu(y, mu);
    return acc;
  };
  cplx lhs = cbox_of(DXphi, x);

  auto boxphi = [&](const Vec4& y) { return cbox_of(phi, y); };
  Vec4 Xx = Xat(x);
  cplx DXbox(0.0);
  for (int mu = 0; mu < 4; ++mu)
    DXbox += Xx[mu] * (boxphi(shifted(x, mu, h)) - boxphi(shifted(x, mu, -h))) /
             (2.0 * h);
  DXbox += cplx(0.0, 1.0) *
           (Xx[0] * fld.A[0](x) + Xx[1] * fld.A[1](x) + Xx[2] * fld.A[2](x) +
            Xx[3] * fld.A[3](x)) *
           boxphi(x);

  auto Fab = [&](const Vec4& y, int a, int b) -> double {
    double dab = (fld.A[b](shifted(y, a, h)) - fld.A[b](shifted(y, a, -h))) / (2.0 * h);
    double dba = (fld.A[a](shifted(y, b, h)) - fld.A[a](shifted(y, b, -h))) / (2.0 * h);
    return dab - dba;
  };
  // i (2 X^a F_{ab} D^b phi - div^a(X^b F_{ab}) phi)
  cplx fterm(0.0);
  for (int b = 0; b < 4; ++b) {
    double XF = 0.0;
    for (int a = 0; a < 4; ++a) XF += Xx[a] * Fab(x, a, b);
    fterm += 2.0 * XF * kEta[b] * Dmu(x, b);
  }
  auto XbFab = [&](const Vec4& y, int a) -> double {
    Vec4 Xv = Xat(y);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) acc += Xv[b] * Fab(y, a, b);
    return acc;
  };
  double divXF = 0.0;
  for (int a = 0; a < 4; ++a)
    divXF += kEta[a] *
             (XbFab(shifted(x, a, h), a) - XbFab(shifted(x, a, -h), a)) / (2.0 * h);
  fterm -= divXF * fld.phi(x);

  cplx rhs = DXbox + conf * boxphi(x) - cplx(0.0, 1.0) * fterm;
  return std::abs(lhs - rhs);
}

LieComponentResidual lie_component_check(const TwoFormField& F,
                                         const SpacetimePoint& p, double h) {
  double r = p.r();
  if (r < 10.0 * h)
    throw StencilOutOfDomain("point at r = " + std::to_string(r) +
                             " too close to the axis for step " + std::to_string(h));
  NullFrame fr = frame_at(p);
  Vec3 w = p.omega();

  auto comp_at = [&](const Vec4& y, int which, int A) -> double {
    SpacetimePoint q = point_from_coords(y);
    NullComponents nc = null_decompose(F(q), frame_at(q));
    switch (which) {
      case 0: return nc.rho;
      case 1: return nc.sigma;
      default: return nc.alpha[A];
    }
  };
  Vec4 x0 = p.coords();
  auto dir_deriv = [&](const Vec4& v, int which, int A) -> double {
    Vec4 xp = x0, xm = x0;
    for (int m = 0; m < 4; ++m) {
      xp[m] += h * v[m];
      xm[m] -= h * v[m];
    }
    return (comp_at(xp, which, A) - comp_at(xm, which, A)) / (2.0 * h);
  };
  auto lie_comp = [&](const AffineField& X, int which, int A) -> double {
    TwoForm LF = lie_derivative_two_form(F, X, p, h);
    NullComponents nc = null_decompose(LF, fr);
    switch (which) {
      case 0: return nc.rho;
      case 1: return nc.sigma;
      default: return nc.alpha[A];
    }
  };
  NullComponents here = null_decompose(F(p), fr);
  auto base = [&](int which, int A) -> double {
    switch (which) {
      case 0: return here.rho;
      case 1: return here.sigma;
      default: return here.alpha[A];
    }
  };

  // affine fields for the four rows
  std::array<AffineField, 3> trans = {generator_field(Gen::Dx),
                                      generator_field(Gen::Dy),
                                      generator_field(Gen::Dz)};
  std::array<AffineField, 3> boosts = {generator_field(Gen::O10),
                                       generator_field(Gen::O20),
                                       generator_field(Gen::O30)};
  std::array<Gen, 3> rots = {Gen::O23, Gen::O13, Gen::O12};
  AffineField S = generator_field(Gen::S);
  Vec4 radial = {0.0, w[0], w[1], w[2]};
  Vec4 boost_r = {r, p.t * w[0], p.t * w[1], p.t * w[2]};  // omega^i Omega_{0i}

  // bracket coefficient [X, e_A]^B for the rotation rows, via finite
  // differences of the chart-fixed frame field
  auto frame_bracket = [&](const AffineField& X, int A, int B) -> double {
    Vec4 Xv = X.eval(p);
    Vec4 de{};  // X^nu d_nu e_A^mu - e_A^nu d_nu X^mu
    for (int mu = 0; mu < 4; ++mu) {
      double acc = 0.0;
      for (int nu = 0; nu < 4; ++nu) {
        if (Xv[nu] != 0.0) {
          Vec4 yp = shifted(x0, nu, h), ym = shifted(x0, nu, -h);
          double d = (frame_at(point_from_coords(yp)).e[A][mu] -
                      frame_at(point_from_coords(ym)).e[A][mu]) / (2.0 * h);
          acc += Xv[nu] * d;
        }
        acc -= fr.e[A][nu] * X.M[mu][nu];
      }
      de[mu] = acc;
    }
    // project on e_B (spatial unit vector: plain euclidean projection)
    double out = 0.0;
    for (int mu = 1; mu < 4; ++mu) out += de[mu] * fr.e[B][mu];
    return out;
  };

  LieComponentResidual res;
  for (int which = 0; which < 3; ++which) {
    int nA = which == 2 ? 2 : 1;
    for (int A = 0; A < nA; ++A) {
      double rows[4];
      // row 0: d_r = omega^i d_i
      {
        double lhs = dir_deriv(radial, which, A);
        double rhs = 0.0;
        for (int i = 0; i < 3; ++i)
          rhs += w[i] * lie_comp(trans[i], which, A);
        rows[0] = std::abs(lhs - rhs);
      }
      // row 1: rotations (worst over the three)
      {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
          AffineField R = generator_field(rots[i]);
          double lhs = dir_deriv(R.eval(p), which, A);
          double rhs = lie_comp(R, which, A);
          if (which == 2) {
            for (int B = 0; B < 2; ++B)
              rhs += frame_bracket(R, A, B) * here.alpha[B];
          }
          worst = std::max(worst, std::abs(lhs - rhs));
        }
        rows[1] = worst;
      }
      // row 2: scaling, S(c) = c(L_S F) - 2c
      {
        double lhs = dir_deriv(S.eval(p), which, A);
        double rhs = lie_comp(S, which, A) - 2.0 * base(which, A);
        rows[2] = std::abs(lhs - rhs);
      }
      // row 3: radial boost, omega^i-weighted; the bracket
      // omega^i [Omega_{0i}, L] = -L feeds alpha back with weight -1
      {
        double lhs = dir_deriv(boost_r, which, A);
        double rhs = 0.0;
        for (int i = 0; i < 3; ++i)
          rhs += w[i] * lie_comp(boosts[i], which, A);
        if (which == 2) rhs -= here.alpha[A];
        rows[3] = std::abs(lhs - rhs);
      }
      for (int k = 0; k < 4; ++k) {
        if (which == 0) res.rho[k] = std::max(res.rho[k], rows[k]);
        else if (which == 1) res.sigma[k] = std::max(res.sigma[k], rows[k]);
        else res.alpha[k] = std::max(res.alpha[k], rows[k]);
        res.worst = std::max(res.worst, rows[k]);
      }
    }
  }
  return res;
}

}  // namespace csf
