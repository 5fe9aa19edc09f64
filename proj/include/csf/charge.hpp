#pragma once

// Total-charge quadrature, charge two-form subtraction, Hodge decomposition
// of the electric field, and the weighted elliptic ratio diagnostic built on
// the monopole-corrected inverse Laplacian.

#include "csf/fields.hpp"

namespace csf {

struct SolverNonConvergence : std::runtime_error {
  double residual;
  explicit SolverNonConvergence(double res)
      : std::runtime_error("elliptic solver stalled, residual " +
                           std::to_string(res)),
        residual(res) {}
};

struct WeightOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChargeValue {
  double q = 0.0;
  double quad_err = 0.0;  // coarse/fine quadrature difference
};

struct HodgeSplit {
  BoxGeom g;
  std::array<std::vector<double>, 3> E_df;  // divergence-free part
  std::array<std::vector<double>, 3> E_cf;  // curl-free part, grad(phi_pot)
  std::vector<double> phi_pot;
  double solve_residual = 0.0;
};

// q = integral of J_0; box grid uses h^3 cell sums, radial grid uses the
// trapezoid rule with 4 pi r^2 measure.
ChargeValue total_charge(const BoxGeom& g, const std::vector<double>& J0);
ChargeValue total_charge(const RadialGeom& g, const std::vector<double>& J0);

// F~ = F - bar F(q) evaluated at slice time t; add_charge is the exact
// inverse.
CurvatureGrid3D subtract_charge(const CurvatureGrid3D& F, double q, double t,
                                double offset = 2.0);
CurvatureGrid3D add_charge(const CurvatureGrid3D& F, double q, double t,
                           double offset = 2.0);

// CG solve of the 7-point Laplacian, Dirichlet values on the box faces
// supplied by `boundary`; relative residual target 1e-10.
std::vector<double> poisson_solve(
    const BoxGeom& g, const std::vector<double>& rhs,
    const std::function<double(double, double, double)>& boundary,
    double tol = 1e-10, int max_iter = 20000);

// E = E_df + grad(phi_pot) with Laplacian(phi_pot) = div E; the far field
// of phi_pot is matched to the monopole -Q/(4 pi r), Q = integral of div E.
HodgeSplit hodge_decompose(const BoxGeom& g,
                           const std::array<std::vector<double>, 3>& E);

struct EllipticRatio {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// Radial density rho(r) sampled on g.  lhs integrates
// r^{2 delta} |grad(InvLap rho + q/(4 pi r))|^2, rhs is the squared
// L^{6/5} norm of r^delta rho; requires 1/2 < delta < 3/2.
EllipticRatio weighted_elliptic_ratio(const RadialGeom& g,
                                      const std::vector<double>& rho,
                                      double delta);

// r^2 E_r(r) = integral_0^r s^2 rho ds: the spherically symmetric solution
// of the Gauss constraint.
std::vector<double> radial_E_from_density(const RadialGeom& g,
                                          const std::vector<double>& rho);

struct AdmissibleData {
  std::array<std::vector<double>, 3> E;
  std::array<std::vector<double>, 3> H;
  std::vector<cplx> phi0;
  std::vector<cplx> phi0_dot;
  double constraint_residual = 0.0;  // max |div E - Im(phi conj(phi_dot))|
  double div_H_residual = 0.0;
};

// Builds constraint-satisfying initial data: E = E_df_seed +
// grad(InvLap of Im(phi0 conj(phi0_dot))) and H = divergence-cleaned
// H_seed.  Pass empty seeds for zero.
AdmissibleData make_admissible_data(
    const BoxGeom& g, const std::vector<cplx>& phi0,
    const std::vector<cplx>& phi0_dot,
    const std::array<std::vector<double>, 3>& E_df_seed = {},
    const std::array<std::vector<double>, 3>& H_seed = {});

struct ChargeReportRow {
  double t, q, gauss_residual, tail_slope;
};

void write_charge_report(const std::string& path,
                         const std::vector<ChargeReportRow>& rows);
std::vector<ChargeReportRow> read_charge_report(const std::string& path);

}  // namespace csf
