#pragma once

// Finite-difference oracle for the radial channels of the Dirichlet
// Laplace-Beltrami problem on a cap.  Independent of the shooting solver:
// cell-centred second-order differences in flux form, symmetrized with the
// weight and solved as a tridiagonal eigenproblem, then one Richardson step.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace fd_oracle {

// Lowest `k` eigenvalues of channel ℓ on n cells.
inline std::vector<double> channel(int dim, int ell, double theta0, int n, int k) {
  const double h = theta0 / n;
  const double q = double(ell) * double(ell + dim - 3);
  auto s = [&](double th) { return dim == 2 ? 1.0 : std::pow(std::sin(th), dim - 2); };
  // The N = 2 arc is symmetric about the pole: ℓ = 0 is even (no flux), ℓ = 1 odd.
  // For N ≥ 3 the weight vanishes at the pole and the flux term drops by itself.
  const double pole = (dim == 2 && ell == 0) ? 0.0 : 2.0;
  Eigen::VectorXd diag(n), off(n - 1);
  for (int i = 0; i < n; ++i) {
    const double th = (i + 0.5) * h;
    const double sl = s(th - 0.5 * h), sr = s(th + 0.5 * h), sc = s(th);
    double flux = 0.0;
    flux += i == 0 ? pole * sl : sl;
    flux += i == n - 1 ? 2.0 * sr : sr;  // odd reflection at θ0
    diag[i] = flux / (h * h * sc) + q / std::pow(std::sin(th), 2);
    if (i + 1 < n) off[i] = -sr / (h * h * std::sqrt(sc * s(th + h)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + std::min<Eigen::Index>(k, n));
}

// Richardson-extrapolated channel eigenvalues from n and 2n cells.
inline std::vector<double> channel_extrapolated(int dim, int ell, double theta0, int n, int k) {
  const auto a = channel(dim, ell, theta0, n, k), b = channel(dim, ell, theta0, 2 * n, k);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (4.0 * b[i] - a[i]) / 3.0;
  return out;
}

}  // namespace fd_oracle
