#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "hardy_rellich/error.hpp"

namespace hardy_rellich {

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 10000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 21-point Kronrod rule with its embedded 10-point Gauss rule on [a, b].
template <class F>
Panel gk21(F& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& x = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double kron = f0 * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(c + h * x[i]);
    const double fm = f(c - h * x[i]);
    kron += (fp + fm) * wk[i];
    if (i % 2 == 1) gauss += (fp + fm) * wg[i / 2];
  }
  kron *= h;
  gauss *= h;
  if (!std::isfinite(kron)) throw QuadratureFailure("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  const double err = std::max(std::abs(kron - gauss), 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kron));
  return {a, b, kron, err};
}

template <class F>
QuadResult adaptive_finite(F& f, const std::vector<double>& pts, const QuadConfig& cfg) {
  std::priority_queue<Panel> heap;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    Panel p = gk21(f, pts[i], pts[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int splits = 0;
  while (!heap.empty() && err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (splits >= cfg.max_subdivisions)
      throw QuadratureFailure("tolerance not met within " + std::to_string(cfg.max_subdivisions) +
                              " subdivisions (estimated error " + std::to_string(err) + ")");
    Panel worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b))
      throw QuadratureFailure("interval became too small to subdivide");
    Panel l = gk21(f, worst.a, m);
    Panel r = gk21(f, m, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++splits;
  }
  // Re-sum from the panels to shed the drift of the running update.
  QuadResult out;
  out.subdivisions = splits;
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  return out;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature over [a, b] with optional interior
// breakpoints.  Infinite endpoints are mapped onto [0, 1) by t = a + x/(1-x).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadConfig& cfg = {}, std::vector<double> breaks = {}) {
  if (std::isnan(a) || std::isnan(b)) throw InvalidArgument("integration limits must not be NaN");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, cfg, breaks);
    r.value = -r.value;
    return r;
  }
  const bool ia = std::isinf(a), ib = std::isinf(b);
  if (ia && ib) {
    auto l = integrate(f, a, 0.0, cfg);
    auto r = integrate(f, 0.0, b, cfg);
    return {l.value + r.value, l.error + r.error, l.subdivisions + r.subdivisions};
  }
  if (ib) {
    auto g = [&](double x) {
      if (x >= 1.0) return 0.0;
      const double d = 1.0 - x;
      return f(a + x / d) / (d * d);
    };
    return detail::adaptive_finite(g, {0.0, 0.5, 1.0}, cfg);
  }
  if (ia) {
    auto g = [&](double x) {
      if (x >= 1.0) return 0.0;
      const double d = 1.0 - x;
      return f(b - x / d) / (d * d);
    };
    return detail::adaptive_finite(g, {0.0, 0.5, 1.0}, cfg);
  }
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  return detail::adaptive_finite(f, pts, cfg);
}

}  // namespace hardy_rellich
