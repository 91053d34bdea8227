#pragma once

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/spectra.hpp"

namespace hardy_rellich {

struct CapSolverOptions {
  double theta_min = 1e-6;
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  int root_bits = 50;
  int max_iterations = 400;
};

// Radial channel of the Dirichlet Laplace-Beltrami problem on a cap:
//   -(s f')'/s + q f / sin²θ = λ f on (0, θ0),  s = sin^{N-2}θ,  q = ℓ(ℓ+N-3),
// with f(θ0) = 0 and f regular at the pole.
class CapChannel {
 public:
  CapChannel(int dim, int ell, double theta0, CapSolverOptions opt = {})
      : n_(dim), ell_(ell), theta0_(theta0), q_(double(ell) * double(ell + dim - 3)), opt_(opt) {
    if (dim < 2) throw DimensionTooSmall("cap spectrum needs N >= 2");
    if (ell < 0 || (dim == 2 && ell > 1)) throw InvalidArgument("harmonic order out of range for this dimension");
    if (!(theta0 > 0.0) || !(theta0 < boost::math::constants::pi<double>()))
      throw InvalidAngle("cap angle must lie strictly inside (0, pi)");
  }

  struct Shot {
    int zeros = 0;
    double end_value = 0.0;  // f(θ0) / |(f, s f')| at θ0; continuous in λ
  };

  Shot shoot(double lambda) const {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    const double nm2 = n_ - 2;
    auto weight = [&](double th) { return nm2 == 0 ? 1.0 : std::pow(std::sin(th), nm2); };
    auto rhs = [&](const State& y, State& dy, double th) {
      const double s = weight(th);
      const double sn = std::sin(th);
      dy[0] = y[1] / s;
      dy[1] = s * (q_ / (sn * sn) - lambda) * y[0];
    };

    // Regular series f = θ^ℓ (1 + c θ²), divided by θ_min^ℓ to avoid underflow.
    const double th0 = opt_.theta_min;
    const double c = ((n_ - 2) * ell_ / 3.0 + q_ / 3.0 - lambda) / (4.0 * ell_ + 2.0 * n_ - 2.0);
    const double f0 = 1.0 + c * th0 * th0;
    const double df0 = ell_ / th0 * (1.0 + c * th0 * th0) + 2.0 * c * th0;
    State y{f0, weight(th0) * df0};

    auto stepper = ode::make_controlled(opt_.abs_tol, opt_.rel_tol, ode::runge_kutta_fehlberg78<State>());
    double th = th0;
    double dt = 0.1 * th0;
    const double max_dt = theta0_ / 64.0;
    Shot out;
    double prev = y[0];
    long guard = 0;
    while (th < theta0_) {
      if (++guard > 2000000) throw ConvergenceFailure("shooting integrator did not reach the cap boundary");
      dt = std::min({dt, max_dt, theta0_ - th});
      if (stepper.try_step(rhs, y, th, dt) == ode::fail) continue;
      if ((y[0] > 0 && prev < 0) || (y[0] < 0 && prev > 0)) ++out.zeros;
      if (y[0] != 0.0) prev = y[0];
      const double mag = std::abs(y[0]) + std::abs(y[1]);
      if (mag > 1e100) {
        y[0] /= mag;
        y[1] /= mag;
      }
      if (theta0_ - th < 1e-14 * theta0_) th = theta0_;
    }
    out.end_value = y[0] / std::hypot(y[0], y[1]);
    return out;
  }

  // k-th eigenvalue of the channel (k = 1, 2, ...).
  double eigenvalue(int k) const {
    if (k < 1) throw InvalidArgument("eigenvalue index must be positive");
    double lo = 0.0;
    double hi = std::max(1.0, q_ / std::pow(std::sin(std::min(theta0_, 1.5)), 2));
    int it = 0;
    while (shoot(hi).zeros < k) {
      lo = hi;
      hi *= 2.0;
      if (++it > 200) throw ConvergenceFailure("could not bracket cap eigenvalue");
    }
    // Narrow until (lo, hi) holds exactly the k-th eigenvalue.
    Shot s_lo = shoot(lo), s_hi = shoot(hi);
    it = 0;
    while (!(s_lo.zeros == k - 1 && s_hi.zeros == k)) {
      const double mid = 0.5 * (lo + hi);
      const Shot sm = shoot(mid);
      if (sm.zeros >= k) {
        hi = mid;
        s_hi = sm;
      } else {
        lo = mid;
        s_lo = sm;
      }
      if (++it > opt_.max_iterations) throw ConvergenceFailure("bisection on node count did not isolate the eigenvalue");
    }
    if (s_lo.end_value == 0.0) return lo;
    if (s_hi.end_value == 0.0) return hi;
    if ((s_lo.end_value > 0) == (s_hi.end_value > 0))
      throw ConvergenceFailure("boundary value does not change sign across the bracket");
    boost::uintmax_t iters = opt_.max_iterations;
    auto g = [&](double l) { return shoot(l).end_value; };
    auto r = boost::math::tools::toms748_solve(g, lo, hi, s_lo.end_value, s_hi.end_value,
                                               boost::math::tools::eps_tolerance<double>(opt_.root_bits), iters);
    if (iters >= static_cast<boost::uintmax_t>(opt_.max_iterations))
      throw ConvergenceFailure("root refinement did not converge");
    return 0.5 * (r.first + r.second);
  }

  int ell() const { return ell_; }

 private:
  int n_;
  int ell_;
  double theta0_;
  double q_;
  CapSolverOptions opt_;
};

inline BigInt cap_channel_multiplicity(int dim, int ell) {
  if (dim == 2) return (ell == 0 || ell == 1) ? 1 : 0;
  return harmonic_dim(ell, dim - 1);
}

// Rank among distinct values, values within `tol` being merged.
template <class T>
void assign_distinct_degrees(Spectrum<T>& s, double tol) {
  int rank = 0;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    if (i == 0 || std::abs(to_double(s.entries[i].lambda) - to_double(s.entries[i - 1].lambda)) > tol) ++rank;
    s.entries[i].degree = rank;
  }
}

// Smallest `count` eigenvalues (with multiplicity) of the Dirichlet
// Laplace-Beltrami operator on the cap {θ < θ0} of S^{N-1}.  Without an explicit
// ell_max, channels are added until a channel's lowest eigenvalue exceeds the
// current count-th candidate.
inline Spectrum<double> cap_eigenvalues(int dim, double theta0, int count, std::optional<int> ell_max = std::nullopt,
                                        CapSolverOptions opt = {}) {
  if (dim < 2) throw DimensionTooSmall("cap spectrum needs N >= 2");
  const auto dom = SphericalDomain::cap(theta0);
  if (count < 1) throw InvalidArgument("count must be positive");
  const int ell_cap = dim == 2 ? 1 : 1 << 20;
  const int ell_top = std::min(ell_cap, ell_max.value_or(ell_cap));

  std::vector<SpectrumEntry<double>> cand;
  auto threshold = [&]() -> double {
    std::vector<std::pair<double, BigInt>> v;
    for (const auto& e : cand) v.push_back({e.lambda, e.multiplicity});
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    BigInt acc = 0;
    for (const auto& [l, m] : v) {
      acc += m;
      if (acc >= count) return l;
    }
    return std::numeric_limits<double>::infinity();
  };

  for (int ell = 0; ell <= ell_top; ++ell) {
    CapChannel ch(dim, ell, theta0, opt);
    const BigInt mult = cap_channel_multiplicity(dim, ell);
    for (int k = 1;; ++k) {
      const double lam = ch.eigenvalue(k);
      if (lam > threshold() + 1e-9) {
        if (k == 1 && ell > 0) goto done;  // channel floors grow with ℓ
        break;
      }
      cand.push_back({lam, ell, k, mult, 0});
    }
  }
done:
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.ell < b.ell;
  });
  Spectrum<double> s{dom, dim, {}};
  BigInt acc = 0;
  for (const auto& e : cand) {
    if (acc >= count) break;
    s.entries.push_back(e);
    acc += e.multiplicity;
  }
  assign_distinct_degrees(s, 1e-7);
  return s;
}

}  // namespace hardy_rellich
