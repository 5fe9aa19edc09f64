#pragma once

// Decay-exponent fitting, inequality-ratio harnesses, and identity residual
// checks on evolved or analytic data.
//
// Loci: exponents in tau_- are measured on fixed-t exterior slices, exponents
// in tau_+ along fixed-u cones, and interior rates on fixed-r worldlines, so
// each fit isolates one weight.  The ratio harnesses never assert a numeric
// constant; they record finiteness and scale stability.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csf/energy.hpp"
#include "csf/fields.hpp"
#include "csf/geometry.hpp"
#include "csf/sph_state.hpp"

namespace csf {

struct InsufficientDecade : std::runtime_error {
  explicit InsufficientDecade(const std::string& m) : std::runtime_error(m) {}
};
struct NonPositiveSamples : std::runtime_error {
  explicit NonPositiveSamples(const std::string& m) : std::runtime_error(m) {}
};
struct NoChargedData : std::runtime_error {
  explicit NoChargedData(const std::string& m) : std::runtime_error(m) {}
};
struct ExponentOutOfRange : std::runtime_error {
  explicit ExponentOutOfRange(const std::string& m) : std::runtime_error(m) {}
};
struct FieldNotConformalKilling : std::runtime_error {
  explicit FieldNotConformalKilling(const std::string& m)
      : std::runtime_error(m) {}
};

// ----------------------------------------------------------- decay fits -----

enum class Locus { FixedTimeSlice, FixedUCone, FixedRWorldline };
const char* locus_name(Locus l);

struct DecaySample {
  double tau_plus, tau_minus, value;
};

struct DecayFit {
  std::string component;
  Locus locus = Locus::FixedTimeSlice;
  double p_plus = 0.0;   // exponent in tau_+
  double p_minus = 0.0;  // exponent in tau_-
  bool fitted_plus = false;  // which of the two was fitted (the other is the
                             // compensated model exponent)
  double residual = 0.0;     // rms residual of the log-log fit
  int samples = 0;
};

// Known exponent in the weight that varies alongside the fitted one; it is
// divided out of the samples before the least-squares slope is taken.
struct WeightModel {
  double known_p_plus = 0.0;   // used on fixed-t slices
  double known_p_minus = 0.0;  // used on cones / worldlines
};

// Least-squares slope of log(value) against log(weight).  Cones and
// worldlines fit tau_+, slices fit tau_-.  Requires >= 8 samples spanning a
// decade in the fitted weight and strictly positive values.
DecayFit fit_decay(const std::string& component, Locus locus,
                   const std::vector<DecaySample>& series,
                   const WeightModel& model = {});

// Sample extraction from spherical runs: f(state, j) -> |component|.
using SphExtract = std::function<double(const SphericalState1D&, int)>;

std::vector<DecaySample> sample_slice(const SphericalState1D& st,
                                      const SphExtract& f, double r_lo,
                                      double r_hi);
// fixed u = t - r; one sample per stored slice with t - u inside the grid
std::vector<DecaySample> sample_cone(const SphHistory& hist,
                                     const SphExtract& f, double u);
std::vector<DecaySample> sample_worldline(const SphHistory& hist,
                                          const SphExtract& f, double r,
                                          double t_min = 0.0);

void write_peel_report(const std::string& path,
                       const std::vector<DecayFit>& fits);

// ----------------------------------------------------- charge jump test -----

struct ChargeJumpReport {
  double q = 0.0;
  double max_exterior_rel_err = 0.0;  // |rho - q/(4 pi r^2)| / |q/(4 pi r^2)|
  long exterior_samples = 0;          // over r > 2t + 10
  double max_rho_tilde_ratio = 0.0;   // |rho - rho_bar| / |rho_bar| exterior
  DecayFit interior_fit;              // rho on a fixed-r interior worldline
  double jump_ratio = 0.0;  // exterior rho / interior rho at matched tau_+
};

ChargeJumpReport charge_jump_check(const SphHistory& hist, double q,
                                   double r_interior = 2.0);

// -------------------------------------------------------- ratio reports -----

struct RatioCase {
  std::string label;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool skipped = false;  // 0/0 cases
};

struct RatioReport {
  std::string inequality;
  std::vector<RatioCase> cases;
  double max_ratio = 0.0;
  long violations = 0;  // harness-specific (pointwise checks)
};

void write_ratio_report(const std::string& path,
                        const std::vector<RatioReport>& reports);

// Pointwise diamagnetic inequality |X(|phi|)| <= |D_X phi| for X in {d_mu},
// finite differences with tolerance tol_factor * h^2 * max|phi|.
RatioReport kato_harness(const GaugeField3D& f, double tol_factor = 10.0);

// Radial covariant Poincare quadrature on one time slice:
//   int tau_-^p tau_+^q |phi|^2 dx  vs  int tau_-^{p+2} tau_+^q |D_r(r phi)/r|^2 dx
// region in {full, exterior, interior} with the matching exponent hypotheses.
RatioReport poincare_harness(const SphericalState1D& st, double p, double q,
                             const std::string& region = "full");

// Weighted global Sobolev quadratures for spherically symmetric test
// functions (the angular-derivative terms drop).
struct SobolevShell {
  std::string label;
  double t = 1.0;
  double r_lo = 0.0, r_hi = 0.0;
  std::function<double(double)> f;      // f(r) on the slice
  std::function<double(double)> df_dr;  // d_r f
  std::function<double(double)> df_dt;  // d_t f (interior kind only)
};
RatioReport sobolev_harness(const std::string& kind,  // exterior | interior
                            const std::vector<SobolevShell>& shells);

// ----------------------------------------------- identity residual checks ---

// Smooth spacetime fields given analytically; all derivatives are nested
// central differences with step h.
struct SpacetimeScalarField {
  std::function<cplx(const Vec4&)> phi;
  std::array<std::function<double(const Vec4&)>, 4> A;
};

// Residual of the covariant wave commutator at x:
//   Box^C(D_X phi) - [ D_X Box^C phi + (tr pi/4) Box^C phi
//                      + i (2 X^a F_{ab} D^b phi - div^a(X^b F_{ab}) phi) ]
// Requires the deformation tensor of X to be a multiple of the metric.
double box_commutator_residual(const SpacetimeScalarField& fld,
                               const AffineField& X, const Vec4& x, double h);

// Scalar-derivative-vs-Lie-component identity table for the null components
// of a two-form field, checked at one point.  Rows: radial, rotations,
// scaling, radial boost; columns rho / sigma / alpha_A.
struct LieComponentResidual {
  double rho[4]{}, sigma[4]{}, alpha[4]{};
  double worst = 0.0;
};
LieComponentResidual lie_component_check(const TwoFormField& F,
                                         const SpacetimePoint& p, double h);

}  // namespace csf
