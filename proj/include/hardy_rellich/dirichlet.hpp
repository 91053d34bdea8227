#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hardy_rellich/constants.hpp"
#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"

namespace hardy_rellich {

// Conforming cubic Hermite discretization of one harmonic channel on the cap
// (0, θ0) with weight s = sin^{N-2}θ, over functions with f(θ0) = f'(θ0) = 0
// and the pole conditions of order ℓ.  Four forms are assembled:
//   A = ∫(L_ℓ f)² s,  B = ∫(L_ℓ f) f s,  C = ∫(f'² + q f²/sin²θ) s,  D = ∫f² s,
// with L_ℓ f = -f'' - (N-2) cotθ f' + q f / sin²θ.  Assembly and solves run in
// extended precision: the fourth-order form has condition number ~h⁻⁴, which in
// double leaves ~1e-6 relative noise in the eigenvalue and breaks the
// monotonicity of nested refinements.
class DirichletChannel {
 public:
  using Real = long double;
  using SpMat = Eigen::SparseMatrix<Real>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  DirichletChannel(int dim, int ell, double theta0, int elements) : n_(dim), ell_(ell), theta0_(theta0), ne_(elements) {
    if (dim < 2) throw DimensionTooSmall("Dirichlet estimator needs N >= 2");
    if (ell < 0 || (dim == 2 && ell > 1)) throw InvalidArgument("harmonic order out of range for this dimension");
    if (!(theta0 > 0.0) || !(theta0 < boost::math::constants::pi<double>())) throw InvalidAngle("cap angle out of range");
    if (elements < 2) throw InvalidArgument("need at least two elements");
    q_ = double(ell) * double(ell + dim - 3);
    number_dofs();
    assemble();
  }

  int ell() const { return ell_; }
  int elements() const { return ne_; }
  Eigen::Index size() const { return nfree_; }
  const SpMat& A() const { return A_; }
  const SpMat& B() const { return B_; }
  const SpMat& C() const { return C_; }
  const SpMat& D() const { return D_; }

  SpMat K(Real gamma) const { return SpMat(A_ + Real(2) * gamma * B_ + gamma * gamma * D_); }
  SpMat M(Real gamma_hat) const { return SpMat(C_ + gamma_hat * gamma_hat * D_); }

  // Hermite interpolant of g (value and derivative supplied) as a free-DOF vector.
  Vec interpolate(const std::function<double(double)>& g, const std::function<double(double)>& dg) const {
    Vec v = Vec::Zero(nfree_);
    const Real h = Real(theta0_) / ne_;
    for (int i = 0; i <= ne_; ++i) {
      const double th = static_cast<double>(i * h);
      if (map_[2 * i] >= 0) v[map_[2 * i]] = g(th);
      if (map_[2 * i + 1] >= 0) v[map_[2 * i + 1]] = dg(th);
    }
    return v;
  }

  struct Eigenpair {
    Real value;
    Vec vector;
    int iterations;
  };

  // Smallest eigenvalue of K(γ) x = μ M(γ̂) x by inverse iteration.  The
  // estimate xᵀMx / xᵀMy with y = K⁻¹Mx avoids forming xᵀKx, which loses about
  // h⁻⁴ in relative accuracy through cancellation.
  Eigenpair smallest(Real gamma, Real gamma_hat, Real rel_tol = 1e-15L, int max_iter = 4000) const {
    const SpMat K = this->K(gamma), M = this->M(gamma_hat);
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success) throw EigensolveFailure("factorization of the fourth-order form failed");
    Vec x = Vec::Ones(nfree_);
    x /= std::sqrt(x.dot(M * x));
    Real mu = std::numeric_limits<Real>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
      const Vec mx = M * x;
      Vec y = ldlt.solve(mx);
      if (ldlt.info() != Eigen::Success) throw EigensolveFailure("back substitution failed");
      const Real next = x.dot(mx) / y.dot(mx);
      const Real nrm = std::sqrt(y.dot(M * y));
      if (!(nrm > 0.0) || !std::isfinite(nrm)) throw EigensolveFailure("inverse iteration degenerated");
      x = y / nrm;
      if (std::abs(next - mu) <= rel_tol * std::abs(next)) return {next, x, it};
      mu = next;
    }
    throw EigensolveFailure("inverse iteration did not converge");
  }

 private:
  void number_dofs() {
    // DOF 2i is f(θ_i), 2i+1 is f'(θ_i); -1 marks a constrained DOF.
    map_.assign(2 * (ne_ + 1), 0);
    map_[2 * ne_] = map_[2 * ne_ + 1] = -1;
    if (ell_ == 0) map_[1] = -1;
    else if (ell_ == 1) map_[0] = -1;
    else map_[0] = map_[1] = -1;
    nfree_ = 0;
    for (auto& m : map_)
      if (m >= 0) m = static_cast<int>(nfree_++);
  }

  void assemble() {
    // 8-point Gauss-Legendre on each element, nodes and weights from Boost in
    // extended precision.
    using G8 = boost::math::quadrature::gauss<Real, 8>;
    std::vector<Real> gx, gw;
    for (std::size_t i = 0; i < G8::abscissa().size(); ++i) {
      const Real x = G8::abscissa()[i], w = G8::weights()[i];
      gx.push_back(x);
      gw.push_back(w);
      if (x != 0) {
        gx.push_back(-x);
        gw.push_back(w);
      }
    }
    const Real h = Real(theta0_) / ne_;
    const Real q = q_;
    std::vector<Eigen::Triplet<Real>> ta, tb, tc, td;
    for (int e = 0; e < ne_; ++e) {
      const Real a = e * h;
      Real la[4][4] = {}, lb[4][4] = {}, lc[4][4] = {}, ld[4][4] = {};
      for (std::size_t g = 0; g < gx.size(); ++g) {
        const Real xi = (gx[g] + 1) / 2;
        const Real th = a + h * xi;
        const Real w = gw[g] * h / 2;
        const Real sn = std::sin(th), cs = std::cos(th);
        const Real s = n_ == 2 ? Real(1) : std::pow(sn, Real(n_ - 2));
        const Real cot = cs / sn;
        const Real xi2 = xi * xi, xi3 = xi2 * xi;
        const Real H[4] = {1 - 3 * xi2 + 2 * xi3, h * (xi - 2 * xi2 + xi3), 3 * xi2 - 2 * xi3, h * (-xi2 + xi3)};
        const Real dH[4] = {(-6 * xi + 6 * xi2) / h, (1 - 4 * xi + 3 * xi2), (6 * xi - 6 * xi2) / h, (-2 * xi + 3 * xi2)};
        const Real d2H[4] = {(-6 + 12 * xi) / (h * h), (-4 + 6 * xi) / h, (6 - 12 * xi) / (h * h), (-2 + 6 * xi) / h};
        Real L[4];
        for (int i = 0; i < 4; ++i) L[i] = -d2H[i] - (n_ - 2) * cot * dH[i] + q * H[i] / (sn * sn);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            la[i][j] += w * s * L[i] * L[j];
            lb[i][j] += w * s * (L[i] * H[j] + H[i] * L[j]) / 2;
            lc[i][j] += w * s * (dH[i] * dH[j] + q * H[i] * H[j] / (sn * sn));
            ld[i][j] += w * s * H[i] * H[j];
          }
      }
      const int dof[4] = {map_[2 * e], map_[2 * e + 1], map_[2 * e + 2], map_[2 * e + 3]};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          if (dof[i] < 0 || dof[j] < 0) continue;
          ta.emplace_back(dof[i], dof[j], la[i][j]);
          tb.emplace_back(dof[i], dof[j], lb[i][j]);
          tc.emplace_back(dof[i], dof[j], lc[i][j]);
          td.emplace_back(dof[i], dof[j], ld[i][j]);
        }
    }
    auto build = [&](SpMat& m, const std::vector<Eigen::Triplet<Real>>& t) {
      m.resize(nfree_, nfree_);
      m.setFromTriplets(t.begin(), t.end());
    };
    build(A_, ta);
    build(B_, tb);
    build(C_, tc);
    build(D_, td);
  }

  int n_, ell_;
  double theta0_;
  int ne_;
  double q_ = 0.0;
  std::vector<int> map_;
  Eigen::Index nfree_ = 0;
  SpMat A_, B_, C_, D_;
};

struct DirichletModeEstimate {
  int ell;
  double mu;
  int iterations;
};

struct DirichletEstimate {
  double mu0 = 0.0;
  int argmin_ell = 0;
  std::vector<DirichletModeEstimate> per_mode;
  int grid_size = 0;
  double coarse_mu0 = 0.0;         // same estimate on grid_size / 2 elements
  double refinement_delta = 0.0;   // (coarse - fine) / fine
};

namespace detail {

inline std::pair<double, std::vector<DirichletModeEstimate>> dirichlet_min(const ConeParams<double>& p, double theta0,
                                                                           int ell_max, int elements, int& argmin) {
  const auto g = gamma_triple(p);
  std::vector<DirichletModeEstimate> modes;
  double best = std::numeric_limits<double>::infinity();
  const int top = p.dim == 2 ? std::min(ell_max, 1) : ell_max;
  for (int ell = 0; ell <= top; ++ell) {
    DirichletChannel ch(p.dim, ell, theta0, elements);
    const auto ep = ch.smallest(g.gamma, g.gamma_hat);
    const double v = static_cast<double>(ep.value);
    modes.push_back({ell, v, ep.iterations});
    if (v < best) {
      best = v;
      argmin = ell;
    }
  }
  return {best, modes};
}

}  // namespace detail

// Estimate of the Dirichlet-class constant
//   inf ∫_Σ |-Δ_σ φ + γ φ|² / ∫_Σ (|∇_σ φ|² + γ̂² φ²)
// over doubly clamped φ on the cap, minimized over harmonic orders ℓ ≤ ell_max.
inline DirichletEstimate dirichlet_estimate(const ConeParams<double>& p, double theta0, int ell_max = 4,
                                            int grid_size = 1000) {
  p.validate();
  SphericalDomain::cap(theta0);
  if (grid_size < 100) throw InvalidArgument("grid_size must be at least 100");
  if (ell_max < 0) throw InvalidArgument("ell_max must be nonnegative");
  DirichletEstimate r;
  r.grid_size = grid_size;
  auto [mu, modes] = detail::dirichlet_min(p, theta0, ell_max, grid_size, r.argmin_ell);
  r.mu0 = mu;
  r.per_mode = std::move(modes);
  int dummy = 0;
  r.coarse_mu0 = detail::dirichlet_min(p, theta0, ell_max, grid_size / 2, dummy).first;
  r.refinement_delta = (r.coarse_mu0 - r.mu0) / r.mu0;
  return r;
}

}  // namespace hardy_rellich
