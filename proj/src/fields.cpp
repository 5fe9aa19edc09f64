#include "csf/fields.hpp"

#include <cmath>

#include "csf/parallel.hpp"

namespace csf {

namespace {
constexpr cplx kI{0.0, 1.0};
}

void GaugeField3D::check() const {
  std::size_t np = g.size();
  if (phi.size() != np) throw GridMismatch("phi size");
  if (!phi_t.empty() && phi_t.size() != np) throw GridMismatch("phi_t size");
  for (int mu = 0; mu < 4; ++mu) {
    if (A[mu].size() != np) throw GridMismatch("A size");
    if (!A_t[mu].empty() && A_t[mu].size() != np) throw GridMismatch("A_t size");
  }
}

std::vector<cplx> covariant_derivative(const GaugeField3D& f, int mu) {
  f.check();
  std::size_t np = f.g.size();
  std::vector<cplx> out(np);
  if (mu == 0) {
    if (f.phi_t.empty()) throw MissingTimeLevel("covariant_derivative: no phi_t");
    par::for_each(np, [&](std::size_t p) {
      out[p] = f.phi_t[p] + kI * f.A[0][p] * f.phi[p];
    });
    return out;
  }
  int axis = mu - 1;
  const int n = f.g.n;
  par::for_each(np, [&](std::size_t p) {
    int i = int(p % n), j = int((p / n) % n), k = int(p / (std::size_t(n) * n));
    out[p] = fd_axis(f.phi, f.g, i, j, k, axis) + kI * f.A[mu][p] * f.phi[p];
  });
  return out;
}

CurvatureGrid3D curvature_from_potential(const GaugeField3D& f) {
  f.check();
  for (int mu = 0; mu < 4; ++mu)
    if (f.A_t[mu].empty())
      throw MissingTimeLevel("curvature_from_potential: no A_t");
  std::size_t np = f.g.size();
  CurvatureGrid3D F;
  F.g = f.g;
  for (int i = 0; i < 3; ++i) {
    F.E[i].resize(np);
    F.H[i].resize(np);
  }
  const int n = f.g.n;
  par::for_each(np, [&](std::size_t p) {
    int i = int(p % n), j = int((p / n) % n), k = int(p / (std::size_t(n) * n));
    double dA[3][3];  // dA[a][b] = d_a A_b, spatial
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        dA[a][b] = fd_axis(f.A[b + 1], f.g, i, j, k, a);
    for (int a = 0; a < 3; ++a)
      F.E[a][p] = f.A_t[a + 1][p] - fd_axis(f.A[0], f.g, i, j, k, a);
    // H_1 = F_23, H_2 = -F_13, H_3 = F_12 with F_ab = d_a A_b - d_b A_a
    F.H[0][p] = dA[1][2] - dA[2][1];
    F.H[1][p] = -(dA[0][2] - dA[2][0]);
    F.H[2][p] = dA[0][1] - dA[1][0];
  });
  return F;
}

CurrentGrid3D current_from_fields(const GaugeField3D& f) {
  f.check();
  std::size_t np = f.g.size();
  CurrentGrid3D J;
  J.g = f.g;
  for (int mu = 0; mu < 4; ++mu) {
    std::vector<cplx> D = covariant_derivative(f, mu);
    J.J[mu].resize(np);
    par::for_each(np, [&](std::size_t p) {
      J.J[mu][p] = std::imag(f.phi[p] * std::conj(D[p]));
    });
  }
  return J;
}

namespace {
template <typename F>
double interior_max(const BoxGeom& g, int halo, F&& f) {
  double worst = 0.0;
  for (int k = halo; k < g.n - halo; ++k)
    for (int j = halo; j < g.n - halo; ++j)
      for (int i = halo; i < g.n - halo; ++i)
        worst = std::max(worst, std::abs(f(i, j, k)));
  return worst;
}
}  // namespace

double bianchi_residual(const CurvatureGrid3D& F, int halo) {
  return interior_max(F.g, halo, [&](int i, int j, int k) {
    return fd_axis(F.H[0], F.g, i, j, k, 0) + fd_axis(F.H[1], F.g, i, j, k, 1) +
           fd_axis(F.H[2], F.g, i, j, k, 2);
  });
}

double lorenz_residual(const GaugeField3D& f, int halo) {
  if (f.A_t[0].empty()) throw MissingTimeLevel("lorenz_residual: no A_t");
  return interior_max(f.g, halo, [&](int i, int j, int k) {
    std::size_t p = f.g.idx(i, j, k);
    double div = 0.0;
    for (int a = 0; a < 3; ++a) div += fd_axis(f.A[a + 1], f.g, i, j, k, a);
    return -f.A_t[0][p] + div;
  });
}

double gauss_residual(const CurvatureGrid3D& F, const CurrentGrid3D& J,
                      int halo) {
  return interior_max(F.g, halo, [&](int i, int j, int k) {
    double div = 0.0;
    for (int a = 0; a < 3; ++a) div += fd_axis(F.E[a], F.g, i, j, k, a);
    return div - J.J[0][F.g.idx(i, j, k)];
  });
}

double continuity_residual(const CurrentGrid3D& J,
                           const std::vector<double>& J0_t, int halo) {
  return interior_max(J.g, halo, [&](int i, int j, int k) {
    double div = 0.0;
    for (int a = 0; a < 3; ++a) div += fd_axis(J.J[a + 1], J.g, i, j, k, a);
    return -J0_t[J.g.idx(i, j, k)] + div;
  });
}

}  // namespace csf
