#pragma once

// Time evolution of the charged scalar field system.
//
// Two schemes:
//   sph1d  -- spherical symmetry, radial gauge A_r = 0.  Unknowns psi = r*phi,
//             Pi = D_t psi, E_r.  A_t is slaved to E_r by A_t(r) = int_r^Rmax E_r,
//             so the only evolved Maxwell quantity is E_r (Ampere's law
//             dE_r/dt = J_r; there are no radiative EM degrees of freedom).
//             Covariant first-order split:
//                 d psi/dt = Pi - i A_t psi
//                 d Pi /dt = psi'' - i A_t Pi
//                 d E_r/dt = J_r
//             which keeps Pi = D_t psi exactly and cancels the connection
//             terms in the charge density algebraically.
//   box3d  -- full 3+1 Cartesian evolution in Lorenz gauge:
//                 Box A_a = -J_a,   Box phi = -2i A^a d_a phi + A^a A_a phi
//             with a quartic sponge ramp in the outer 10% of the box.
//
// Classical RK4 in time, dt = cfl * h.  Optional source callbacks support
// manufactured-solution convergence tests.

#include <complex>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "csf/fields.hpp"
#include "csf/geometry.hpp"
#include "csf/grid.hpp"
#include "csf/sph_state.hpp"

namespace csf {

struct RecipeUnknown : std::runtime_error {
  explicit RecipeUnknown(const std::string& id)
      : std::runtime_error("unknown initial-data recipe: " + id) {}
};
struct CFLViolation : std::runtime_error {
  explicit CFLViolation(const std::string& m) : std::runtime_error(m) {}
};
struct NaNDetected : std::runtime_error {
  explicit NaNDetected(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigParse : std::runtime_error {
  explicit ConfigParse(const std::string& m) : std::runtime_error(m) {}
};

struct RunConfig {
  std::string scheme = "sph1d";  // sph1d | box3d
  int n = 200;                   // radial cells (sph1d) or cells per axis (box3d)
  double h = 0.05;
  double cfl = 0.5;      // dt = cfl * h; must be <= 0.9
  double T = 10.0;       // final time
  double cadence = 1.0;  // snapshot/monitor interval
  WeightParams weights;
  std::string recipe = "zero";  // zero | charged-gaussian | real-pulse
  double offset = 2.0;          // chi+ offset shared with charge subtraction

  // recipe parameters
  double amplitude = 0.05;
  double r0 = 5.0;
  double sigma = 1.0;
  double phase_speed = 1.0;  // c in phi_dot = i c phi

  std::string gauge = "outer";  // outer: A_t(Rmax)=0 | origin: A_t(0)=0
  unsigned long seed = 1;
  int threads = 0;

  void validate() const;  // throws ConfigParse / CFLViolation
  double rmax() const { return n * h; }
};

// key = value text, '#' comments; keys exactly match RunConfig field names.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key_eq_value);

// ---------------------------------------------------------------- sph1d -----

// Optional forcing for manufactured solutions; each term is added to the
// corresponding right-hand side.
struct SphSource {
  std::function<cplx(double t, double r)> S_psi;
  std::function<cplx(double t, double r)> S_Pi;
  std::function<double(double t, double r)> S_E;
};

SphericalState1D init_sph1d(const RunConfig& cfg);
void step_sph1d(SphericalState1D& st, double dt, const SphSource* src = nullptr);

// max_j |(r^2 E)' - r^2 J_0| / max_j |r^2 J_0| using the flux-difference form
// the initializer satisfies exactly; absolute residual when J_0 ~ 0.
double sph_gauss_residual(const SphericalState1D& st);
double sph_charge(const SphericalState1D& st);     // 4*pi int Im(psi~ Pi) dr
double sph_energy(const SphericalState1D& st);     // unweighted int Q_00 dx

// ---------------------------------------------------------------- box3d -----

struct BoxState3D {
  GaugeField3D f;  // phi, phi_t, A[4], A_t[4]
  double t = 0.0;
};

struct BoxSource {
  std::function<cplx(double t, double x, double y, double z)> S_phi;
  std::function<double(double t, double x, double y, double z)> S_A[4];
};

BoxState3D init_box3d(const RunConfig& cfg);
void step_box3d(BoxState3D& st, double dt, const BoxSource* src = nullptr);

double box_gauge_residual(const BoxState3D& st);  // max |d^a A_a| interior
double box_charge(const BoxState3D& st);          // int J_0 dx
double box_energy(const BoxState3D& st);          // int Q_00[total] dx

// sponge damping coefficient at position (x,y,z) for a box of half-width L/2
double sponge_profile(const BoxGeom& g, double x, double y, double z);

// ------------------------------------------------------------------ run -----

struct MonitorRow {
  double t = 0.0;
  double q = 0.0;
  double gauss = 0.0;  // Gauss-law residual
  double gauge = 0.0;  // Lorenz residual (box3d) / 0 (sph1d)
  double energy = 0.0;
};

struct RunResult {
  RunConfig cfg;
  std::vector<MonitorRow> monitors;
  SphHistory history;               // sph1d snapshots at cadence
  std::vector<BoxState3D> box_history;  // box3d snapshots at cadence
};

RunResult run(const RunConfig& cfg);

void write_monitors(const std::string& path, const std::vector<MonitorRow>& rows);
std::vector<MonitorRow> read_monitors(const std::string& path);

}  // namespace csf
