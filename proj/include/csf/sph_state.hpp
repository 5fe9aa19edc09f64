#pragma once

// Spherically symmetric 1+1 state in the radial gauge A_r = 0, shared by the
// evolution and the energy/analysis diagnostics.  psi = r*phi and
// Pi = D_t psi; the electric field is purely radial.

#include "csf/grid.hpp"

namespace csf {

struct SphericalState1D {
  RadialGeom g;
  double t = 0.0;
  std::vector<cplx> psi;    // r * phi
  std::vector<cplx> Pi;     // (d_t + i A_t) psi
  std::vector<double> At;   // A_t(r), gauge A_t(r_max) = 0
  std::vector<double> At_dot;
  std::vector<double> Er;   // E_r = F_{0r} = -d_r A_t

  void check() const {
    std::size_t n = std::size_t(g.n);
    if (psi.size() != n || Pi.size() != n || At.size() != n ||
        At_dot.size() != n || Er.size() != n)
      throw GridMismatch("SphericalState1D field sizes");
  }
};

using SphHistory = std::vector<SphericalState1D>;

// Centered radial derivative with parity ghost at the origin (parity = -1
// for odd fields like psi) and a one-sided stencil at the outer edge.
template <typename T>
T radial_deriv(const std::vector<T>& f, const RadialGeom& g, int j,
               double parity = -1.0) {
  if (j == 0) return (f[1] - parity * f[0]) / (2.0 * g.h);
  if (j == g.n - 1)
    return (1.5 * f[j] - 2.0 * f[j - 1] + 0.5 * f[j - 2]) / g.h;
  return (f[j + 1] - f[j - 1]) / (2.0 * g.h);
}

// Null-decomposed scalar quantities at node j.
struct SphPhiComponents {
  cplx DL_rphi_over_r;  // (1/r) D_L(r phi)
  cplx DLbar_phi;       // D_{Lbar} phi
  cplx phi_over_r;      // phi / r
  // slash-D phi vanishes in spherical symmetry
};

inline SphPhiComponents sph_phi_components(const SphericalState1D& st, int j) {
  double r = st.g.r(j);
  cplx dpsi = radial_deriv(st.psi, st.g, j, -1.0);
  SphPhiComponents out;
  out.DL_rphi_over_r = (st.Pi[j] + dpsi) / r;
  out.DLbar_phi = (st.Pi[j] - dpsi) / r + st.psi[j] / (r * r);
  out.phi_over_r = st.psi[j] / (r * r);
  return out;
}

// Current components J_0 and J_r of the scalar field.
inline void sph_current(const SphericalState1D& st, int j, double& J0,
                        double& Jr) {
  double r = st.g.r(j);
  cplx dpsi = radial_deriv(st.psi, st.g, j, -1.0);
  J0 = std::imag(st.psi[j] * std::conj(st.Pi[j])) / (r * r);
  Jr = std::imag(st.psi[j] * std::conj(dpsi)) / (r * r);
}

}  // namespace csf
