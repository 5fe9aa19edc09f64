#pragma once

// Energy-momentum tensors, conformal Morawetz tensors, weighted energy
// breakdowns over evolved histories, current norms, and divergence-identity
// residual diagnostics.

#include <map>

#include "csf/geometry.hpp"
#include "csf/sph_state.hpp"

namespace csf {

struct SingularSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WindowNotCovered : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StencilOutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class QKind { F, Phi, ConfI, ConfII, Total };

struct EMTensorValue {
  Mat4 Q{};  // lower indices
  QKind kind = QKind::F;

  // Q(X, Y) for vectors X, Y (upper indices)
  double operator()(const Vec4& X, const Vec4& Y) const {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s += Q[a][b] * X[a] * Y[b];
    return s;
  }
  double trace() const {  // g^{ab} Q_ab
    double s = 0.0;
    for (int a = 0; a < 4; ++a) s += metric_sign(a) * Q[a][a];
    return s;
  }
  double frobenius() const {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s += Q[a][b] * Q[a][b];
    return std::sqrt(s);
  }
  EMTensorValue& operator+=(const EMTensorValue& o) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) Q[a][b] += o.Q[a][b];
    return *this;
  }
};

// Q_ab = F_ag F_b^g - (1/4) g_ab F_gd F^gd (trace-free)
EMTensorValue em_tensor_F(const TwoForm& F);

// Q_ab = Re(D_a phi conj(D_b phi)) - (1/2) g_ab D^g phi conj(D_g phi)
EMTensorValue em_tensor_phi(const std::array<cplx, 4>& Dphi);

// Conformal tensors built from psi = Omega*phi with Omega = r (ConfI) or
// u*ubar (ConfII); the conformal factors cancel so that
// Q~_ab = Re(D_a psi conj(D_b psi)) - (1/2) eta_ab D^g psi conj(D_g psi).
EMTensorValue conformal_tensor(QKind kind, cplx phi,
                               const std::array<cplx, 4>& Dphi,
                               const SpacetimePoint& p, double floor = 1e-8);

// P_a = Q_ab X^b * w
Vec4 momentum_density(const EMTensorValue& Q, const Vec4& X, double w);

// (1/2) Q_ab pi^ab for the fractional multiplier's deformation tensor;
// equals (1/2) * morawetz_factor * (rho^2 + sigma^2) for trace-free Q.
double multiplier_bulk(const EMTensorValue& Q, const SpacetimePoint& p,
                       double s);

// Centered-difference divergence (nabla^a Q_ab) of a sampled tensor field.
Vec4 tensor_divergence(const std::function<Mat4(const Vec4&)>& Qf,
                       const Vec4& x, double h);

// Divergence of the first-kind conformal tensor in its own metric,
// g~ = r^{-2} g, for a field with analytic gradient and A = 0; returns the
// residual against the source term Re(G conj((1/r) D_b(r phi))) * r^4.
Vec4 conformal_divergence_residual_I(
    const std::function<cplx(const Vec4&)>& phi,
    const std::function<std::array<cplx, 4>(const Vec4&)>& dphi,
    const std::function<cplx(const Vec4&)>& G, const Vec4& x, double h);

// ---------------------------------------------------------------------------
// Weighted energies over spherically symmetric histories

struct EnergyBreakdown {
  WeightParams params;
  double t0 = 0.0, t1 = 0.0;
  double charge_sq = 0.0;  // |q|^2 term (F variant only)
  std::map<std::string, double> fixed_time;  // sup over slices, per component
  std::map<std::string, double> cone;        // sup over u
  std::map<std::string, double> spacetime;
  double fixed_time_tail_slope = 0.0;  // log-slope of the fixed-time
                                       // integrand over the outer decade
  bool tail_convergent = true;         // slope < -1

  double total() const {
    double s = charge_sq;
    for (auto& [k, v] : fixed_time) s += v;
    for (auto& [k, v] : cone) s += v;
    for (auto& [k, v] : spacetime) s += v;
    return s;
  }
};

// Charge-modified energy content of F over [t0, t1]; in spherical symmetry
// only rho is nonzero, and rho~ = E_r - rhobar(q) when subtract is set.
EnergyBreakdown energy_breakdown_F(const SphHistory& hist, double q,
                                   const WeightParams& wp, double t0,
                                   double t1, bool subtract_q = true,
                                   double offset = 2.0);

EnergyBreakdown energy_breakdown_phi(const SphHistory& hist,
                                     const WeightParams& wp, double t0,
                                     double t1);

struct CurrentNormValue {
  double JL = 0.0, JLbar = 0.0, slashJ = 0.0;
  double total() const { return JL + JLbar + slashJ; }
};

// Weighted space-time quadrature of the null current components; the
// callable overload takes J(t, r) -> (J0, Jr).
using RadialCurrent = std::function<void(double, double, double&, double&)>;
CurrentNormValue current_norm(const RadialGeom& g, const RadialCurrent& J,
                              const WeightParams& wp, double t0, double t1,
                              double dt);
CurrentNormValue current_norm(const SphHistory& hist, const WeightParams& wp,
                              double t0, double t1);

struct AuditRatios {
  double lhs = 0.0;  // energy content
  double rhs = 0.0;  // source + initial-data side
  double ratio = 0.0;
};

AuditRatios estimate_audit_F(const SphHistory& hist, double q,
                             const WeightParams& wp, double t0, double t1);
AuditRatios estimate_audit_phi(const SphHistory& hist, const WeightParams& wp,
                               double t0, double t1);

// ---------------------------------------------------------------------------
// energy-report v1

struct EnergyReportRow {
  double t_or_u;
  std::string component;
  std::string weight_tag;
  double value;
};

void write_energy_report(const std::string& path,
                         const std::vector<EnergyReportRow>& rows,
                         const std::vector<std::pair<std::string, double>>&
                             summary = {});

}  // namespace csf
