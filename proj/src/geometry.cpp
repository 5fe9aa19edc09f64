#include "csf/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace csf {

// ---------------------------------------------------------------------------
// Smoothed Heaviside

double chi_plus(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = std::exp(-1.0 / x);
  double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double chi_plus_prime(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double a = std::exp(-1.0 / x);
  double b = std::exp(-1.0 / (1.0 - x));
  double s = a + b;
  // d/dx [a/(a+b)] with a' = a/x^2, b' = -b/(1-x)^2
  return a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / (s * s);
}

// ---------------------------------------------------------------------------
// Weights

void WeightParams::validate() const {
  if (!(s > 0.5 && s <= 1.0)) throw std::invalid_argument("s must be in (1/2,1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  double cap = strict ? (s - 0.5) / 4.0 : (s - 0.5);
  if (eps > cap + 1e-15) throw std::invalid_argument("eps too large for s");
  if (!(s + gamma < 1.5)) throw std::invalid_argument("need s + gamma < 3/2");
}

double tau_plus(double t, double r) { return std::sqrt(1.0 + (t + r) * (t + r)); }
double tau_minus(double t, double r) { return std::sqrt(1.0 + (t - r) * (t - r)); }

WeightValues weights_at(const SpacetimePoint& p, const WeightParams& wp) {
  WeightValues w;
  double r = p.r();
  w.tau_plus = tau_plus(p.t, r);
  w.tau_minus = tau_minus(p.t, r);
  w.tau_zero = w.tau_minus / w.tau_plus;
  double chi = wp.sharp_cutoff ? (r - p.t > 0.0 ? 1.0 : 0.0) : chi_plus(r - p.t);
  double tm2g = std::pow(w.tau_minus, 2.0 * wp.gamma);
  w.w_gamma = chi * tm2g + (1.0 - chi);
  w.w_gamma_eps =
      chi * tm2g + (1.0 - chi) * std::pow(w.tau_minus, 2.0 * wp.eps);
  w.w_prime_gamma_eps = chi * std::pow(w.tau_minus, 2.0 * wp.gamma - 1.0) +
                        (1.0 - chi) * std::pow(w.tau_minus, -2.0 * wp.eps - 1.0);
  return w;
}

double w_tilde(double u, double ubar, const WeightParams& wp) {
  double g = wp.gamma, e = wp.eps;
  double chi = chi_plus(-u);
  double first = (1.0 + std::pow(2.0 - u, 2.0 * g)) * chi +
                 (1.0 + std::pow(2.0 + u, -2.0 * e)) * (1.0 - chi);
  double second = std::pow(1.0 + ubar, -2.0 * e) *
                  (std::pow(2.0 - u, 2.0 * (g + e)) * chi + (1.0 - chi));
  return first + second;
}

double neg_L_w_tilde(double u, double ubar, const WeightParams& wp) {
  double g = wp.gamma, e = wp.eps;
  double chi = chi_plus(-u);
  // -L(w~) = -2 d/dubar(w~)
  return 2.0 * (2.0 * e * std::pow(1.0 + ubar, -2.0 * e - 1.0) *
                (std::pow(2.0 - u, 2.0 * (g + e)) * chi + (1.0 - chi)));
}

double neg_Lbar_w_tilde(double u, double ubar, const WeightParams& wp) {
  double g = wp.gamma, e = wp.eps;
  double chi = chi_plus(-u);
  double chip = chi_plus_prime(-u);
  double t1 = (std::pow(2.0 - u, 2.0 * g) - std::pow(2.0 + u, -2.0 * e)) * chip;
  double t2 = std::pow(1.0 + ubar, -2.0 * e) *
              (std::pow(2.0 - u, 2.0 * (g + e)) - 1.0) * chip;
  double t3 = 2.0 * (g + e) * std::pow(1.0 + ubar, -2.0 * e) *
              std::pow(2.0 - u, 2.0 * (g + e) - 1.0) * chi;
  double t4 = 2.0 * g * std::pow(2.0 - u, 2.0 * g - 1.0) * chi;
  double t5 = 2.0 * e * std::pow(2.0 + u, -2.0 * e - 1.0) * (1.0 - chi);
  return 2.0 * (t1 + t2 + t3 + t4 + t5);
}

// ---------------------------------------------------------------------------
// Null frame (two charts; chart 1 excludes z poles, chart 2 excludes x poles)

NullFrame frame_at(const SpacetimePoint& p, double r_min) {
  double r = p.r();
  if (r < r_min) throw DegenerateRadius(r);
  Vec3 w = p.omega();
  Vec3 axis = std::abs(w[2]) <= 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 e1 = cross3(axis, w);
  double n = norm3(e1);
  e1 = {e1[0] / n, e1[1] / n, e1[2] / n};
  Vec3 e2 = cross3(w, e1);  // right-handed: e1 x e2 = omega

  NullFrame fr;
  fr.L = {1.0, w[0], w[1], w[2]};
  fr.Lbar = {1.0, -w[0], -w[1], -w[2]};
  fr.e[0] = {0.0, e1[0], e1[1], e1[2]};
  fr.e[1] = {0.0, e2[0], e2[1], e2[2]};
  return fr;
}

// ---------------------------------------------------------------------------
// Two-forms

double TwoForm::contract(const Vec4& X, const Vec4& Y) const {
  double s = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) s += (*this)(mu, nu) * X[mu] * Y[nu];
  return s;
}

NullComponents null_decompose(const TwoForm& F, const NullFrame& fr) {
  NullComponents nc;
  for (int A = 0; A < 2; ++A) {
    nc.alpha[A] = F.contract(fr.L, fr.e[A]);
    nc.abar[A] = F.contract(fr.Lbar, fr.e[A]);
  }
  nc.rho = 0.5 * F.contract(fr.Lbar, fr.L);
  nc.sigma = F.contract(fr.e[0], fr.e[1]);
  return nc;
}

namespace {
// Levi-Civita symbol, eps_{0123} = +1.
int levi4(int a, int b, int c, int d) {
  int p[4] = {a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) {
        std::swap(p[i], p[j]);
        sign = -sign;
      }
    }
  return sign;
}
}  // namespace

TwoForm hodge_dual(const TwoForm& F) {
  TwoForm D;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          int e = levi4(mu, nu, a, b);
          if (e)
            s += 0.5 * e * metric_sign(a) * metric_sign(b) * F(a, b);
        }
      D.set(mu, nu, s);
    }
  return D;
}

void em_split(const TwoForm& F, Vec3& E, Vec3& H) {
  TwoForm D = hodge_dual(F);
  for (int i = 0; i < 3; ++i) {
    E[i] = F(0, i + 1);
    H[i] = D(0, i + 1);
  }
}

TwoForm two_form_from_EH(const Vec3& E, const Vec3& H) {
  TwoForm F;
  for (int i = 0; i < 3; ++i) F.set(0, i + 1, E[i]);
  F.set(1, 2, H[2]);
  F.set(1, 3, -H[1]);
  F.set(2, 3, H[0]);
  return F;
}

// ---------------------------------------------------------------------------
// Lorentz algebra

const char* gen_name(Gen g) {
  static const char* names[kNumGen] = {"d_t",  "d_x",  "d_y",  "d_z",
                                       "O_23", "O_13", "O_12", "O_10",
                                       "O_20", "O_30", "S"};
  return names[static_cast<int>(g)];
}

std::vector<Gen> all_generators() {
  std::vector<Gen> v;
  for (int i = 0; i < kNumGen; ++i) v.push_back(static_cast<Gen>(i));
  return v;
}

Vec4 AffineField::eval(const SpacetimePoint& p) const {
  Vec4 c = p.coords();
  Vec4 out = b;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) out[mu] += M[mu][nu] * c[nu];
  return out;
}

AffineField generator_field(Gen g) {
  AffineField X{};
  auto rot = [&X](int i, int j) {
    // Omega_ij = x_i d_j - x_j d_i  (spatial indices 1..3)
    X.M[j][i] = 1.0;
    X.M[i][j] = -1.0;
  };
  switch (g) {
    case Gen::Dt: X.b[0] = 1.0; break;
    case Gen::Dx: X.b[1] = 1.0; break;
    case Gen::Dy: X.b[2] = 1.0; break;
    case Gen::Dz: X.b[3] = 1.0; break;
    case Gen::O12: rot(1, 2); break;
    case Gen::O13: rot(1, 3); break;
    case Gen::O23: rot(2, 3); break;
    case Gen::O10: X.M[0][1] = 1.0; X.M[1][0] = 1.0; break;
    case Gen::O20: X.M[0][2] = 1.0; X.M[2][0] = 1.0; break;
    case Gen::O30: X.M[0][3] = 1.0; X.M[3][0] = 1.0; break;
    case Gen::S:
      for (int mu = 0; mu < 4; ++mu) X.M[mu][mu] = 1.0;
      break;
  }
  return X;
}

AffineField LinComb::field() const {
  AffineField out{};
  for (int k = 0; k < kNumGen; ++k) {
    if (coeff[k] == 0.0) continue;
    AffineField X = generator_field(static_cast<Gen>(k));
    for (int mu = 0; mu < 4; ++mu) {
      out.b[mu] += coeff[k] * X.b[mu];
      for (int nu = 0; nu < 4; ++nu) out.M[mu][nu] += coeff[k] * X.M[mu][nu];
    }
  }
  return out;
}

LinComb bracket(Gen Xg, Gen Yg) {
  AffineField X = generator_field(Xg), Y = generator_field(Yg);
  // [X,Y]^mu = X(Y^mu) - Y(X^mu): M_c = M_Y M_X - M_X M_Y, b_c = M_Y b_X - M_X b_Y
  Mat4 Mc{};
  Vec4 bc{};
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k)
        s += Y.M[mu][k] * X.M[k][nu] - X.M[mu][k] * Y.M[k][nu];
      Mc[mu][nu] = s;
    }
    for (int k = 0; k < 4; ++k)
      bc[mu] += Y.M[mu][k] * X.b[k] - X.M[mu][k] * Y.b[k];
  }

  LinComb out;
  out[Gen::Dt] = bc[0];
  out[Gen::Dx] = bc[1];
  out[Gen::Dy] = bc[2];
  out[Gen::Dz] = bc[3];
  // Lower first index: N_{mu nu} = eta_{mu rho} Mc^rho_nu
  Mat4 N{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) N[mu][nu] = metric_sign(mu) * Mc[mu][nu];
  double cS = (Mc[0][0] + Mc[1][1] + Mc[2][2] + Mc[3][3]) / 4.0;
  out[Gen::S] = cS;
  auto A = [&N](int a, int b) { return 0.5 * (N[a][b] - N[b][a]); };
  // coefficient of Omega_{ab} = A_{ab} / (-eta_aa eta_bb)
  out[Gen::O12] = -A(1, 2);
  out[Gen::O13] = -A(1, 3);
  out[Gen::O23] = -A(2, 3);
  out[Gen::O10] = A(1, 0);
  out[Gen::O20] = A(2, 0);
  out[Gen::O30] = A(3, 0);

  // the algebra closes; verify the reconstruction to guard index slips
  AffineField rec = out.field();
  for (int mu = 0; mu < 4; ++mu) {
    assert(std::abs(rec.b[mu] - bc[mu]) < 1e-12);
    for (int nu = 0; nu < 4; ++nu)
      assert(std::abs(rec.M[mu][nu] - Mc[mu][nu]) < 1e-12);
  }
  (void)rec;
  return out;
}

// ---------------------------------------------------------------------------
// Multiplier fields and deformation tensors

Vec4 K0_at(const SpacetimePoint& p) { return K0s_at(p, 1.0); }

Vec4 K0s_at(const SpacetimePoint& p, double s) {
  double u = p.u(), ub = p.ubar();
  double vb = std::pow(ub, 2.0 * s);
  double v = std::pow(std::abs(u), 2.0 * s);
  Vec3 w = p.omega();
  Vec4 out;
  out[0] = 0.5 * (vb + v);
  for (int i = 0; i < 3; ++i) out[i + 1] = 0.5 * (vb - v) * w[i];
  return out;
}

Vec4 K0s_bar_at(const SpacetimePoint& p, double s) {
  Vec4 out = K0s_at(p, s);
  out[0] += 1.0;
  return out;
}

Mat4 deformation_tensor(Gen g) {
  AffineField X = generator_field(g);
  Mat4 pi{};
  // pi_{mu nu} = d_mu X_nu + d_nu X_mu,  d_mu X_nu = eta_{nu rho} M^rho_mu
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      pi[mu][nu] =
          metric_sign(nu) * X.M[nu][mu] + metric_sign(mu) * X.M[mu][nu];
  return pi;
}

Mat4 deformation_tensor_K0(const SpacetimePoint& p) {
  Mat4 pi{};
  for (int mu = 0; mu < 4; ++mu) pi[mu][mu] = 4.0 * p.t * metric_sign(mu);
  return pi;
}

namespace {
double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
}  // namespace

Mat4 deformation_tensor_K0s(const SpacetimePoint& p, double s) {
  double u = p.u(), ub = p.ubar(), r = p.r();
  if (r <= 0.0) throw DegenerateRadius(r);
  double vb = std::pow(ub, 2.0 * s);
  double v = std::pow(std::abs(u), 2.0 * s);
  double trace_part = (vb - v) / r;
  double mf = morawetz_factor(s, p.t, r);
  Vec3 w = p.omega();
  Vec4 Llo = {-1.0, w[0], w[1], w[2]};     // (L)_flat
  Vec4 Lblo = {-1.0, -w[0], -w[1], -w[2]}; // (Lbar)_flat
  Mat4 pi{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      pi[mu][nu] = trace_part * (mu == nu ? metric_sign(mu) : 0.0) +
                   0.5 * mf * (Llo[mu] * Lblo[nu] + Lblo[mu] * Llo[nu]);
  return pi;
}

double morawetz_factor(double s, double t, double r) {
  if (s < 0.5 || s > 1.0) throw std::domain_error("morawetz_factor: s outside [1/2,1]");
  if (!(r > 0.0)) throw std::domain_error("morawetz_factor: r must be positive");
  double u = t - r, ub = t + r;
  // at s = 1 the expression telescopes: (ub^2 - u^2)/r - 2(ub + u) = 0
  // identically; return it exactly instead of through pow cancellation
  if (s == 1.0) return 0.0;
  double vb = std::pow(ub, 2.0 * s);
  double v = std::pow(std::abs(u), 2.0 * s);
  double vbdot = 2.0 * s * std::pow(ub, 2.0 * s - 1.0);
  double vdot = 2.0 * s * std::pow(std::abs(u), 2.0 * s - 1.0) * sgn(u);
  return (vb - v) / r - (vbdot + vdot);
}

double special_cancellation(Gen g, const SpacetimePoint& p) {
  if (p.t >= 2.0 * p.r()) throw RegionViolation("special_cancellation: need t < 2r");
  NullFrame fr = frame_at(p);
  AffineField Xf = generator_field(g);
  Vec4 X = Xf.eval(p);
  // grad^mu X^nu = eta^{mu rho} M^nu_rho  (constant for affine fields)
  Mat4 T{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) T[mu][nu] = metric_sign(mu) * Xf.M[nu][mu];
  // coframe covectors: theta^{Lbar} = -(1/2) (L)_flat, theta^A = (e_A)_flat
  Vec3 w = p.omega();
  Vec4 thLb = {0.5, -0.5 * w[0], -0.5 * w[1], -0.5 * w[2]};
  double worst = 0.0;
  for (int A = 0; A < 2; ++A) {
    Vec4 thA = {0.0, fr.e[A][1], fr.e[A][2], fr.e[A][3]};
    double XA = minkowski_dot(X, fr.e[A]);
    double XLb = -0.5 * minkowski_dot(X, fr.L);
    (void)XLb;
    double TLbA = 0.0, TALb = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        TLbA += thLb[mu] * thA[nu] * T[mu][nu];
        TALb += thA[mu] * thLb[nu] * T[mu][nu];
      }
    double val = std::abs(-XA / p.r() - TLbA + TALb);
    worst = std::max(worst, val);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Finite-difference Lie derivative

TwoForm lie_derivative_two_form(const TwoFormField& F, const AffineField& X,
                                const SpacetimePoint& p, double h) {
  if (h <= 0.0) h = 1e-3 * std::max(1.0, p.r());
  Vec4 Xp = X.eval(p);
  Vec4 c = p.coords();
  TwoForm out{};
  // transport term X^m d_m F_{ab}, centered differences per coordinate
  for (int m = 0; m < 4; ++m) {
    if (Xp[m] == 0.0) continue;
    Vec4 cp = c, cm = c;
    cp[m] += h;
    cm[m] -= h;
    TwoForm d = F(point_from_coords(cp)) - F(point_from_coords(cm));
    out += (Xp[m] / (2.0 * h)) * d;
  }
  // exact frame terms: d_a X^m F_{mb} + d_b X^m F_{am}, d_a X^m = M^m_a
  TwoForm Fp = F(p);
  TwoForm extra{};
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      double s = 0.0;
      for (int m = 0; m < 4; ++m)
        s += X.M[m][a] * Fp(m, b) + X.M[m][b] * Fp(a, m);
      extra.set(a, b, s);
    }
  return out + extra;
}

// ---------------------------------------------------------------------------
// Charge two-form

TwoForm charge_two_form(double q, const SpacetimePoint& p, double offset) {
  double r = p.r();
  if (r < 1e-10) throw DegenerateRadius(r);
  Vec3 w = p.omega();
  double amp = q / (4.0 * M_PI * r * r) * chi_plus(r - p.t - offset);
  TwoForm F;
  for (int i = 0; i < 3; ++i) F.set(0, i + 1, amp * w[i]);
  return F;
}

NullComponents charge_two_form_null(double q, const SpacetimePoint& p,
                                    double offset) {
  double r = p.r();
  if (r < 1e-10) throw DegenerateRadius(r);
  NullComponents nc;
  nc.rho = q / (4.0 * M_PI * r * r) * chi_plus(r - p.t - offset);
  return nc;
}

}  // namespace csf
