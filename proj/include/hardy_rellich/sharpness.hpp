#pragma once

#include <cmath>
#include <vector>

#include "hardy_rellich/constants.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/profiles.hpp"

namespace hardy_rellich {

// Quotient F/G of the separable test function y(εt)φ_λ after multiplying by ε,
// written in eps2 = ε²:
//   [(λ+γ)² m0 + 2 eps2 (λ+γ̄) m1 + eps2² m2] / [(λ+γ̂²) m0 + eps2 m1].
inline double quotient_f(const ConeParams<double>& p, double lambda, const Moments& m, double eps2) {
  if (lambda < 0.0) throw NegativeInput("eigenvalue must be nonnegative");
  if (eps2 < 0.0) throw NegativeInput("eps2 must be nonnegative");
  const auto g = gamma_triple(p);
  const double num = (lambda + g.gamma) * (lambda + g.gamma) * m.m0 + 2.0 * eps2 * (lambda + g.gamma_bar) * m.m1 +
                     eps2 * eps2 * m.m2;
  const double den = (lambda + g.gamma_hat * g.gamma_hat) * m.m0 + eps2 * m.m1;
  if (den == 0.0) throw ZeroDenominator("quotient denominator vanishes (lambda = 0, gamma_hat = 0, eps2 = 0)");
  return num / den;
}

// 2BD - AE for the quotient above, evaluated from p_α and from its definition.
struct DerivativeSign {
  double via_p_alpha;
  double direct;
};

inline DerivativeSign two_bd_minus_ae(const ConeParams<double>& p, double lambda, const Moments& m) {
  const auto g = gamma_triple(p);
  const double A = (lambda + g.gamma) * (lambda + g.gamma) * m.m0;
  const double B = (lambda + g.gamma_bar) * m.m1;
  const double D = (lambda + g.gamma_hat * g.gamma_hat) * m.m0;
  const double E = m.m1;
  return {p_alpha(p, lambda) * m.m0 * m.m1, 2.0 * B * D - A * E};
}

struct SweepPoint {
  double eps;
  double eps2;
  double quotient;
};

struct SharpnessSweep {
  std::vector<SweepPoint> points;
  double limit = 0.0;         // hr_term(λ)
  double gap = 0.0;           // quotient - limit at the smallest ε
  double relative_gap = 0.0;  // gap / limit (gap itself when the limit is 0)
  bool monotone = true;       // strictly decreasing along the descending grid
};

// eps_grid lists ε values in descending order.
inline SharpnessSweep sharpness_sweep(const ConeParams<double>& p, double lambda, const Profile1D& prof,
                                      const std::vector<double>& eps_grid, const QuadConfig& cfg = {}) {
  if (eps_grid.empty()) throw InvalidArgument("eps grid is empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0)) throw InvalidArgument("eps values must be positive");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw InvalidArgument("eps grid must be strictly descending");
  }
  const Moments m = moments(prof, MomentRequest::none(), cfg);
  SharpnessSweep s;
  s.limit = hr_term(p, lambda);
  for (double e : eps_grid) {
    const double q = quotient_f(p, lambda, m, e * e);
    if (!s.points.empty() && !(q < s.points.back().quotient)) s.monotone = false;
    s.points.push_back({e, e * e, q});
  }
  s.gap = s.points.back().quotient - s.limit;
  s.relative_gap = s.limit != 0.0 ? s.gap / s.limit : s.gap;
  return s;
}

// 2 sqrt(m0 (m2 - w2_1/4)) / w2_0 + 2 m1 / w2_0 - 1/4.
inline double r_functional(const Moments& m) {
  if (!m.w2_0 || !m.w2_1) throw InvalidArgument("r_functional needs the t^-2 weighted moments");
  const double rad = m.m0 * (m.m2 - 0.25 * *m.w2_1);
  if (rad < 0.0) throw NegativeRadicand("m2 - w2_1/4 is negative: quadrature accuracy failure");
  return 2.0 * std::sqrt(rad) / *m.w2_0 + 2.0 * m.m1 / *m.w2_0 - 0.25;
}

inline double r_functional_limit() { return std::sqrt(33.0 / 2.0) + 1.25; }

enum class OneDKind { Hardy, Rellich };

inline double oned_quotient(OneDKind kind, const Moments& m) {
  if (kind == OneDKind::Hardy) {
    if (!m.w2_0) throw InvalidArgument("Hardy quotient needs w2_0");
    return m.m1 / *m.w2_0;
  }
  if (!m.w4_0) throw InvalidArgument("Rellich quotient needs w4_0");
  return m.m2 / *m.w4_0;
}

inline double oned_constant(OneDKind kind) { return kind == OneDKind::Hardy ? 0.25 : 9.0 / 16.0; }

struct OneDPoint {
  double eps;
  double quotient;
};

// Quotients along t^{1/2+ε} e^{-t} (Hardy) or t^{3/2+ε} e^{-t} (Rellich).
inline std::vector<OneDPoint> oned_sharpness(OneDKind kind, const std::vector<double>& eps_grid,
                                             const QuadConfig& cfg = {}) {
  std::vector<OneDPoint> out;
  for (double e : eps_grid) {
    const auto prof = Profile1D::powexp(e, kind == OneDKind::Hardy ? 0.5 : 1.5);
    MomentRequest req;
    if (kind == OneDKind::Hardy) req.w2_0 = true;
    else req.w4_0 = true;
    out.push_back({e, oned_quotient(kind, moments(prof, req, cfg))});
  }
  return out;
}

}  // namespace hardy_rellich
