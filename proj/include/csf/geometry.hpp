#pragma once

// Pointwise Minkowski null-frame geometry: frames, optical weights, the
// inhomogeneous Lorentz algebra, deformation tensors, and finite-difference
// Lie derivatives of two-forms.  Everything here is a pure function of its
// arguments; no shared state.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csf {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;  // index 0 = t
using Mat4 = std::array<std::array<double, 4>, 4>;

// Metric signature diag(-1,1,1,1).
inline constexpr double metric_sign(int mu) { return mu == 0 ? -1.0 : 1.0; }

inline double minkowski_dot(const Vec4& a, const Vec4& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

struct DegenerateRadius : std::runtime_error {
  explicit DegenerateRadius(double r)
      : std::runtime_error("degenerate radius r=" + std::to_string(r)) {}
};
struct RegionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Points, optical functions, weights

struct SpacetimePoint {
  double t = 0.0;
  Vec3 x{0.0, 0.0, 0.0};

  double r() const { return norm3(x); }
  Vec3 omega() const {
    double rr = r();
    return {x[0] / rr, x[1] / rr, x[2] / rr};
  }
  double u() const { return t - r(); }
  double ubar() const { return t + r(); }
  Vec4 coords() const { return {t, x[0], x[1], x[2]}; }
};

inline SpacetimePoint point_from_coords(const Vec4& c) {
  return {c[0], {c[1], c[2], c[3]}};
}

// Smoothed Heaviside: 0 on (-inf,0], 1 on [1,inf), C^inf bump transition.
double chi_plus(double x);
double chi_plus_prime(double x);

struct WeightParams {
  double s = 0.75;      // (1/2, 1]
  double gamma = 0.5;   // > 0
  double eps = 0.05;    // > 0
  bool strict = false;  // strict mode: 4*eps <= s - 1/2
  bool sharp_cutoff = false;  // sharp chi_{t<r} variant of w_gamma

  void validate() const;
};

struct WeightValues {
  double tau_plus = 1.0;
  double tau_minus = 1.0;
  double tau_zero = 1.0;   // tau_- / tau_+
  double w_gamma = 1.0;
  double w_gamma_eps = 1.0;
  double w_prime_gamma_eps = 1.0;
};

double tau_plus(double t, double r);
double tau_minus(double t, double r);
WeightValues weights_at(const SpacetimePoint& p, const WeightParams& wp);

// Proof-internal weight w~_{gamma,eps}(u,ubar) and its -L, -Lbar derivatives
// (used only for sign checks; energies report in the w_gamma normalization).
double w_tilde(double u, double ubar, const WeightParams& wp);
double neg_L_w_tilde(double u, double ubar, const WeightParams& wp);
double neg_Lbar_w_tilde(double u, double ubar, const WeightParams& wp);

// ---------------------------------------------------------------------------
// Null frame

struct NullFrame {
  Vec4 L;     // d_t + d_r
  Vec4 Lbar;  // d_t - d_r
  Vec4 e[2];  // orthonormal sphere frame (spatial)

  // projection coefficients omega_i^A = e_A(x^i) = spatial comps of e_A
  double omega_A(int A, int i) const { return e[A][i + 1]; }
};

// Deterministic two-chart angular frame; refuses r < r_min.
NullFrame frame_at(const SpacetimePoint& p, double r_min = 1e-10);

// ---------------------------------------------------------------------------
// Two-forms

struct TwoForm {
  // stored strictly lower-triangle-free: c[0..5] = F01,F02,F03,F12,F13,F23
  std::array<double, 6> c{};

  static int slot(int mu, int nu) {
    static constexpr int tab[4][4] = {{-1, 0, 1, 2},
                                      {0, -1, 3, 4},
                                      {1, 3, -1, 5},
                                      {2, 4, 5, -1}};
    return tab[mu][nu];
  }
  double operator()(int mu, int nu) const {
    if (mu == nu) return 0.0;
    double s = mu < nu ? 1.0 : -1.0;
    return s * c[slot(mu, nu)];
  }
  void set(int mu, int nu, double v) {
    double s = mu < nu ? 1.0 : -1.0;
    c[slot(mu, nu)] = s * v;
  }
  // F(X,Y) = F_{mu nu} X^mu Y^nu
  double contract(const Vec4& X, const Vec4& Y) const;

  TwoForm& operator+=(const TwoForm& o) {
    for (int k = 0; k < 6; ++k) c[k] += o.c[k];
    return *this;
  }
  friend TwoForm operator+(TwoForm a, const TwoForm& b) { return a += b; }
  friend TwoForm operator-(TwoForm a, const TwoForm& b) {
    for (int k = 0; k < 6; ++k) a.c[k] -= b.c[k];
    return a;
  }
  friend TwoForm operator*(double s, TwoForm a) {
    for (int k = 0; k < 6; ++k) a.c[k] *= s;
    return a;
  }
};

struct NullComponents {
  double alpha[2]{};  // F(L, e_A)
  double abar[2]{};   // F(Lbar, e_A)
  double rho = 0.0;   // (1/2) F(Lbar, L)
  double sigma = 0.0; // F(e_1, e_2)

  double alpha_norm() const { return std::hypot(alpha[0], alpha[1]); }
  double abar_norm() const { return std::hypot(abar[0], abar[1]); }
};

NullComponents null_decompose(const TwoForm& F, const NullFrame& fr);
TwoForm hodge_dual(const TwoForm& F);

// Electric/magnetic split at a point: E_i = F_{0i}, H_i = *F_{0i}.
void em_split(const TwoForm& F, Vec3& E, Vec3& H);
TwoForm two_form_from_EH(const Vec3& E, const Vec3& H);

// ---------------------------------------------------------------------------
// Lorentz algebra

enum class Gen : std::uint8_t {
  Dt, Dx, Dy, Dz,          // translations
  O23, O13, O12,           // rotations Omega_{ij}
  O10, O20, O30,           // boosts Omega_{i0}
  S,                       // scaling
};
inline constexpr int kNumGen = 11;
const char* gen_name(Gen g);
std::vector<Gen> all_generators();

// Every member of the algebra is an affine field X^mu(x) = M^mu_nu x^nu + b^mu.
struct AffineField {
  Mat4 M{};
  Vec4 b{};

  Vec4 eval(const SpacetimePoint& p) const;
};
AffineField generator_field(Gen g);

struct LinComb {
  std::array<double, kNumGen> coeff{};
  double& operator[](Gen g) { return coeff[static_cast<int>(g)]; }
  double operator[](Gen g) const { return coeff[static_cast<int>(g)]; }
  AffineField field() const;
};

// Exact symbolic bracket [X, Y] expressed back in the generator basis.
LinComb bracket(Gen X, Gen Y);

// Non-affine multiplier fields.
Vec4 K0_at(const SpacetimePoint& p);                    // (1/2)(ub^2 L + u^2 Lb)
Vec4 K0s_at(const SpacetimePoint& p, double s);         // fractional Morawetz
Vec4 K0s_bar_at(const SpacetimePoint& p, double s);     // T + K_0^s

// Deformation tensor pi_{mu nu} = 2 (symm) nabla X  in Cartesian components.
Mat4 deformation_tensor(Gen g);
Mat4 deformation_tensor_K0(const SpacetimePoint& p);
Mat4 deformation_tensor_K0s(const SpacetimePoint& p, double s);

// Positivity factor of Lemma-type bulk term: (vb - v)/r - (vb' + v') >= 0
// for 1/2 <= s <= 1.
double morawetz_factor(double s, double t, double r);

// max_A |(2/r) grad^{Lb}(r) X^A - grad^{Lb}(X^A) + grad^A(X^{Lb})|, exterior
// region t < 2r only.
double special_cancellation(Gen g, const SpacetimePoint& p);

// ---------------------------------------------------------------------------
// Finite-difference Lie derivative of a sampled two-form field

using TwoFormField = std::function<TwoForm(const SpacetimePoint&)>;

// (L_X F)_{ab} = X^m d_m F_ab + d_a X^m F_mb + d_b X^m F_am, centered O(h^2).
// Default step h = 1e-3 * max(1, r).
TwoForm lie_derivative_two_form(const TwoFormField& F, const AffineField& X,
                                const SpacetimePoint& p, double h = 0.0);

// Analytic charge two-form: Ebar_i = q omega_i/(4 pi r^2) chi+(r-t-offset).
TwoForm charge_two_form(double q, const SpacetimePoint& p,
                        double offset = 2.0);
NullComponents charge_two_form_null(double q, const SpacetimePoint& p,
                                    double offset = 2.0);

}  // namespace csf
