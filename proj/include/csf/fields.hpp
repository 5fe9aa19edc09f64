#pragma once

// Grid representations of the complex scalar, gauge potential, and curvature
// on the 3D Cartesian box, with gauge-covariant derivatives and E/H
// extraction.  Radial-grid analogues live with the spherical evolution code.

#include <array>

#include "csf/geometry.hpp"
#include "csf/grid.hpp"

namespace csf {

struct MissingTimeLevel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GaugeField3D {
  BoxGeom g;
  std::vector<cplx> phi;
  std::vector<cplx> phi_t;              // d_t phi
  std::array<std::vector<double>, 4> A;    // A_mu (lower index)
  std::array<std::vector<double>, 4> A_t;  // d_t A_mu

  void check() const;
};

// F_{mu nu} on the box grid, stored via the electric/magnetic split
// E_i = F_{0i}, H_1 = F_{23}, H_2 = -F_{13}, H_3 = F_{12}.
struct CurvatureGrid3D {
  BoxGeom g;
  std::array<std::vector<double>, 3> E;
  std::array<std::vector<double>, 3> H;

  TwoForm at(std::size_t p) const {
    return two_form_from_EH({E[0][p], E[1][p], E[2][p]},
                            {H[0][p], H[1][p], H[2][p]});
  }
};

struct CurrentGrid3D {
  BoxGeom g;
  std::array<std::vector<double>, 4> J;  // J_mu (lower index)
};

// D_mu phi = d_mu phi + i A_mu phi; mu = 0 uses the stored time level.
std::vector<cplx> covariant_derivative(const GaugeField3D& f, int mu);

// F = dA, needs the stored momenta for d_t A.
CurvatureGrid3D curvature_from_potential(const GaugeField3D& f);

// J_mu = Im(phi conj(D_mu phi))
CurrentGrid3D current_from_fields(const GaugeField3D& f);

// residual of div H = 0 (monopole part of the Bianchi identity dF = 0),
// max-norm over the interior with a halo of `halo` cells excluded
double bianchi_residual(const CurvatureGrid3D& F, int halo = 2);

// Lorenz gauge residual d^mu A_mu = -d_t A_0 + div A, max over interior.
double lorenz_residual(const GaugeField3D& f, int halo = 2);

// discrete Gauss residual  div E - J_0, max over interior
double gauss_residual(const CurvatureGrid3D& F, const CurrentGrid3D& J,
                      int halo = 2);

// continuity residual d^mu J_mu = -d_t J_0 + div J_sp with J0_t supplied
double continuity_residual(const CurrentGrid3D& J,
                           const std::vector<double>& J0_t, int halo = 2);

}  // namespace csf
