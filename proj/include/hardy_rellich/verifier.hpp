#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hardy_rellich/cap_solver.hpp"
#include "hardy_rellich/constants.hpp"
#include "hardy_rellich/dirichlet.hpp"
#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/profiles.hpp"
#include "hardy_rellich/quadrature.hpp"
#include "hardy_rellich/selection.hpp"

namespace hardy_rellich {

enum class InequalityId { HR, ND, ND2, PB, NAV, DIR, SCH };

inline constexpr std::array<InequalityId, 7> all_inequality_ids = {
    InequalityId::HR, InequalityId::ND, InequalityId::ND2, InequalityId::PB,
    InequalityId::NAV, InequalityId::DIR, InequalityId::SCH};

inline std::string to_string(InequalityId id) {
  switch (id) {
    case InequalityId::HR: return "HR";
    case InequalityId::ND: return "ND";
    case InequalityId::ND2: return "ND2";
    case InequalityId::PB: return "PB";
    case InequalityId::NAV: return "NAV";
    case InequalityId::DIR: return "DIR";
    case InequalityId::SCH: return "SCH";
  }
  return "?";
}

inline InequalityId parse_inequality_id(std::string_view s) {
  for (auto id : all_inequality_ids)
    if (s == to_string(id)) return id;
  throw InvalidArgument("unknown inequality id '" + std::string(s) + "' (expected HR | ND | ND2 | PB | NAV | DIR | SCH)");
}

// Cone inequalities live on the whole line t ∈ ℝ, the cone-like domains
// {|x| < 1} and {|x| > 1} on the half-lines t > 0 and t < 0.
enum class LineKind { FullLine, HalfLine };
enum class Side { Interior, Exterior };

inline bool uses_full_line(InequalityId id) { return id == InequalityId::HR || id == InequalityId::SCH; }

// Angular integrals of one mode: ∫φ², ∫|∇_σφ|², ∫|Δ_σφ|², ∫(-Δ_σφ)φ.
struct AngularFactor {
  double phi0 = 1.0;
  double phi1 = 0.0;
  double lap2 = 0.0;
  double lap_grad = 0.0;
  bool clamped = false;  // φ and ∂_νφ vanish on ∂Σ

  static AngularFactor eigen(double lambda) { return {1.0, lambda, lambda * lambda, lambda, false}; }
};

struct CylinderMode {
  double lambda = 0.0;  // eigenvalue, or the angular Rayleigh quotient for clamped factors
  int label = 0;        // spectrum index, or harmonic order ℓ for clamped factors
  Profile1D profile;
  double coefficient = 1.0;
  AngularFactor angular = AngularFactor::eigen(0.0);
};

// w(t, σ) = Σ c_j y_j(t) φ_j(σ).  For the exterior side the stored profile p
// lives on (0, ∞) and y(t) = p(-t).
struct CylinderTestFunction {
  std::vector<CylinderMode> modes;
  LineKind line = LineKind::FullLine;
  Side side = Side::Interior;
};

// The cylinder-side integrals of a test function.
//   F   ∫|x|^α|Δu|² without boundary contribution
//   bd  boundary contribution from y'(0) ≠ 0 (Navier profiles)
//   G   ∫|x|^{α-2}|∇u|²        L2  ∫|x|^{α-4}u²
//   LN  ∫|x|^{α-2}|log|x||⁻²|∇u|²     LNS ∫|x|^{α-4}|log|x||⁻²|∇_σu|²
//   LU2, LU4  ∫|x|^{α-4}|log|x||^{-2,-4}u²
//   DT  ∫|x|^{α-4}|γ̂u + x·∇u|²
struct CylinderIntegrals {
  double F = 0, bd = 0, G = 0, L2 = 0, LN = 0, LNS = 0, LU2 = 0, LU4 = 0, DT = 0;

  CylinderIntegrals& operator+=(const CylinderIntegrals& o) {
    F += o.F; bd += o.bd; G += o.G; L2 += o.L2; LN += o.LN; LNS += o.LNS; LU2 += o.LU2; LU4 += o.LU4; DT += o.DT;
    return *this;
  }
  double laplacian() const { return F + bd; }
};

inline MomentRequest moment_request(InequalityId id) {
  MomentRequest r;
  switch (id) {
    case InequalityId::ND:
    case InequalityId::PB: r.w2_0 = r.w2_1 = r.cross = true; break;
    case InequalityId::ND2: r.w2_0 = r.w4_0 = true; break;
    case InequalityId::NAV: r.w2_0 = true; break;
    case InequalityId::DIR: r.w4_0 = true; break;
    default: break;
  }
  return r;
}

inline CylinderIntegrals mode_integrals(const ConeParams<double>& p, const CylinderMode& mode, const Moments& m,
                                        Side side) {
  const auto g = gamma_triple(p);
  const auto& a = mode.angular;
  const double c2 = mode.coefficient * mode.coefficient;
  const double sgn = side == Side::Exterior ? -1.0 : 1.0;
  const double phil = a.lap2 + 2.0 * g.gamma * a.lap_grad + g.gamma * g.gamma * a.phi0;
  CylinderIntegrals r;
  r.F = c2 * (m.m2 * a.phi0 + 2.0 * m.m1 * (a.phi1 + g.gamma_bar * a.phi0) + m.m0 * phil);
  const double s0 = mode.profile.slope_at_zero();
  r.bd = c2 * sgn * (2.0 - p.alpha) * s0 * s0 * a.phi0;
  r.G = c2 * (m.m0 * (a.phi1 + g.gamma_hat * g.gamma_hat * a.phi0) + m.m1 * a.phi0);
  r.L2 = c2 * m.m0 * a.phi0;
  r.DT = c2 * m.m1 * a.phi0;
  if (m.w2_0) {
    r.LU2 = c2 * *m.w2_0 * a.phi0;
    r.LNS = c2 * *m.w2_0 * a.phi1;
  }
  if (m.w4_0) r.LU4 = c2 * *m.w4_0 * a.phi0;
  if (m.w2_0 && m.w2_1 && m.cross)
    r.LN = c2 * (a.phi1 * *m.w2_0 +
                 a.phi0 * (*m.w2_1 + 2.0 * sgn * g.gamma_hat * *m.cross + g.gamma_hat * g.gamma_hat * *m.w2_0));
  return r;
}

inline CylinderIntegrals cylinder_integrals(const ConeParams<double>& p, const CylinderTestFunction& w,
                                            const MomentRequest& req, const QuadConfig& cfg = {}) {
  CylinderIntegrals total;
  for (const auto& mode : w.modes) total += mode_integrals(p, mode, moments(mode.profile, req, cfg), w.side);
  return total;
}

struct MarginReport {
  std::string inequality_id;
  double lhs = 0.0;  // normalized to unit gradient term
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 1e-9;
  bool pass = false;
  int dim = 0;
  double alpha = 0.0;
  std::string domain;
  std::string selection;
  std::optional<std::uint64_t> seed;
  std::optional<int> trial;
  int modes = 0;
};

// Coefficients of every inequality at one (N, α, Σ, Λ).
struct InequalitySetup {
  InequalityId id = InequalityId::HR;
  ConeParams<double> params;
  SphericalDomain domain;
  LambdaSelection<double> selection;
  std::vector<double> lambdas;  // resolved selection (exhaustive for the minimization)
  double A0 = 0.0;              // sharp constant in front of the gradient term
  double coeff_ln = 0.0;        // log-gradient term
  double coeff_lns = 0.0;       // log spherical-gradient term
  double coeff_lu2 = 0.0;
  double coeff_lu4 = 0.0;
  double coeff_dt = 0.0;
  double coeff_l2 = 0.0;        // Schmincke zero-order term
  double argmin_lambda = 0.0;
  int dirichlet_ell_max = 4;
  int dirichlet_grid = 400;
  int argmin_ell = 0;
};

struct DirichletSuiteConfig {
  int ell_max = 4;
  int grid_size = 400;
};

inline double cap_angle(const SphericalDomain& d) {
  if (d.is_full_sphere()) throw DomainMismatch("the Dirichlet case needs a proper cap");
  return d.theta0;
}

inline InequalitySetup make_setup(InequalityId id, const ConeParams<double>& p, const SphericalDomain& dom,
                                  const LambdaSelection<double>& sel, const DirichletSuiteConfig& dcfg = {}) {
  p.validate();
  InequalitySetup s;
  s.id = id;
  s.params = p;
  s.domain = dom;
  s.selection = sel;
  std::vector<ConeParams<double>> uses{p};
  if (id == InequalityId::SCH) {
    if (p.dim < 3) throw DimensionTooSmall("Schmincke inequality needs N >= 3");
    uses = {p.reflected()};
  }
  if (id == InequalityId::PB && !dom.is_full_sphere())
    throw DomainMismatch("punctured-ball inequality is stated for the full sphere, got " + dom.name());
  if (id == InequalityId::DIR) {
    cap_angle(dom);
    if (sel.kind != SelectionKind::All)
      throw SelectionViolation("the Dirichlet-class check uses clamped angular factors and needs --lambda all");
  }
  s.lambdas = resolved_lambdas<double>(p.dim, dom, sel, uses, {}, false);
  const std::span<const double> L(s.lambdas);
  switch (id) {
    case InequalityId::HR: {
      auto mu = hardy_rellich_constant(p, L);
      s.A0 = mu.value;
      s.argmin_lambda = mu.argmin_lambda;
      break;
    }
    case InequalityId::SCH: {
      auto c = schmincke_coefficients(p, L);
      s.A0 = c.grad_coeff;
      s.coeff_l2 = c.zero_order_coeff;
      s.argmin_lambda = c.reflected.argmin_lambda;
      break;
    }
    case InequalityId::ND: {
      auto c = nd_coefficients(p, L);
      s.A0 = c.A0;
      s.coeff_ln = c.A1;
      s.coeff_lu2 = c.A2;
      s.argmin_lambda = c.mu.argmin_lambda;
      break;
    }
    case InequalityId::ND2: {
      auto c = nd_log_coefficients(p, L);
      s.A0 = c.A0;
      s.coeff_lu2 = c.kappa;
      s.coeff_lu4 = c.A2;
      s.argmin_lambda = c.mu.argmin_lambda;
      break;
    }
    case InequalityId::PB: {
      auto c = punctured_ball_coefficients(p, dom, L);
      s.A0 = c.A0;
      s.coeff_ln = c.A1_grad_log;
      s.coeff_lns = c.A1_sph_grad;
      s.coeff_lu2 = c.K;
      s.argmin_lambda = c.mu.argmin_lambda;
      break;
    }
    case InequalityId::NAV: {
      auto c = navier_coefficients(p, L);
      s.A0 = c.A0;
      s.coeff_lu2 = c.A1;
      s.argmin_lambda = c.mu.argmin_lambda;
      break;
    }
    case InequalityId::DIR: {
      s.dirichlet_ell_max = dcfg.ell_max;
      s.dirichlet_grid = dcfg.grid_size;
      const auto [mu0, modes] = detail::dirichlet_min(p, cap_angle(dom), dcfg.ell_max, dcfg.grid_size, s.argmin_ell);
      (void)modes;
      auto c = dirichlet_conelike_coefficients(p, L, mu0);
      s.A0 = c.A0;
      s.coeff_dt = c.kappa0;
      s.coeff_lu4 = c.A1;
      s.argmin_lambda = c.lambda_min;
      break;
    }
  }
  return s;
}

inline double rhs_of(const InequalitySetup& s, const CylinderIntegrals& c) {
  double r = s.A0 * c.G;
  if (s.id == InequalityId::SCH) r += s.A0 == 0.0 ? 0.0 : s.coeff_l2 * c.L2;
  r += s.coeff_ln * c.LN + s.coeff_lns * c.LNS + s.coeff_lu2 * c.LU2 + s.coeff_lu4 * c.LU4 + s.coeff_dt * c.DT;
  return r;
}

namespace detail {

inline bool lambda_in_selection(const InequalitySetup& s, double lambda) {
  if (std::any_of(s.lambdas.begin(), s.lambdas.end(), [&](double v) { return nearly_equal(v, lambda); })) return true;
  if (s.selection.finite()) return false;
  // Beyond the resolved prefix: look the value up in a spectrum long enough to contain it.
  int size = 8;
  for (int round = 0; round < 24; ++round, size *= 2) {
    const auto spec = build_spectrum<double>(s.params.dim, s.domain, size);
    if (spec.entries.back().lambda < lambda && !nearly_equal(spec.entries.back().lambda, lambda)) continue;
    const auto vals = resolve_selection(spec, s.selection);
    return std::any_of(vals.begin(), vals.end(), [&](double v) { return nearly_equal(v, lambda); });
  }
  return false;
}

inline void check_boundary_class(const InequalitySetup& s, const CylinderTestFunction& w) {
  const std::string id = to_string(s.id);
  if (uses_full_line(s.id)) {
    if (w.line != LineKind::FullLine)
      throw BoundaryClassViolation(id + " is a cone inequality and needs a full-line test function");
    for (const auto& m : w.modes)
      if (m.angular.clamped) throw BoundaryClassViolation(id + " uses eigenfunction angular factors");
    return;
  }
  if (w.line != LineKind::HalfLine) throw BoundaryClassViolation(id + " needs a half-line test function");
  for (const auto& m : w.modes) {
    const auto [lo, hi] = m.profile.support();
    if (!std::isfinite(hi)) throw BoundaryClassViolation(id + " needs compactly supported profiles");
    if (s.id == InequalityId::NAV) {
      if (lo < 0.0) throw BoundaryClassViolation("NAV profiles must vanish for t <= 0");
    } else if (!(lo > 0.0)) {
      throw BoundaryClassViolation(id + " needs profiles vanishing near t = 0");
    }
    if (s.id == InequalityId::DIR) {
      if (!m.angular.clamped) throw BoundaryClassViolation("DIR needs doubly clamped angular factors");
    } else if (m.angular.clamped) {
      throw BoundaryClassViolation(id + " uses eigenfunction angular factors");
    }
  }
}

}  // namespace detail

inline void validate_test(const InequalitySetup& s, const CylinderTestFunction& w) {
  if (w.modes.empty()) throw InvalidProfile("test function has no modes");
  detail::check_boundary_class(s, w);
  for (std::size_t i = 0; i < w.modes.size(); ++i)
    for (std::size_t j = i + 1; j < w.modes.size(); ++j)
      if (w.modes[i].label == w.modes[j].label)
        throw InvalidArgument("modes must carry distinct labels so that cross terms vanish");
  if (s.id == InequalityId::DIR) {
    for (const auto& m : w.modes)
      if (m.label < 0 || m.label > s.dirichlet_ell_max)
        throw SelectionViolation("harmonic order outside the estimated range");
    return;
  }
  for (const auto& m : w.modes)
    if (!detail::lambda_in_selection(s, m.lambda))
      throw SelectionViolation("mode eigenvalue " + std::to_string(m.lambda) + " is outside the selection " +
                               s.selection.describe());
}

inline MarginReport margin_from(const InequalitySetup& s, const CylinderIntegrals& c, double tolerance) {
  MarginReport r;
  r.inequality_id = to_string(s.id);
  if (!(c.G > 0.0)) throw InvalidProfile("gradient term vanishes for this test function");
  r.lhs = c.laplacian() / c.G;
  r.rhs = rhs_of(s, c) / c.G;
  r.margin = r.lhs - r.rhs;
  r.tolerance = tolerance;
  r.pass = r.margin >= -tolerance;
  r.dim = s.params.dim;
  r.alpha = s.params.alpha;
  r.domain = s.domain.name();
  r.selection = s.selection.describe();
  return r;
}

inline MarginReport inequality_margin(const InequalitySetup& s, const CylinderTestFunction& w,
                                      double tolerance = 1e-9, const QuadConfig& cfg = {}) {
  validate_test(s, w);
  const auto c = cylinder_integrals(s.params, w, moment_request(s.id), cfg);
  auto r = margin_from(s, c, tolerance);
  r.modes = static_cast<int>(w.modes.size());
  return r;
}

inline MarginReport inequality_margin(InequalityId id, const ConeParams<double>& p, const SphericalDomain& dom,
                                      const LambdaSelection<double>& sel, const CylinderTestFunction& w,
                                      double tolerance = 1e-9, const QuadConfig& cfg = {}) {
  return inequality_margin(make_setup(id, p, dom, sel), w, tolerance, cfg);
}

// Clamped angular factor of harmonic order ℓ from a finite element vector.
inline AngularFactor clamped_factor(const DirichletChannel& ch, const DirichletChannel::Vec& f) {
  AngularFactor a;
  a.phi0 = static_cast<double>(f.dot(ch.D() * f));
  a.phi1 = static_cast<double>(f.dot(ch.C() * f));
  a.lap2 = static_cast<double>(f.dot(ch.A() * f));
  a.lap_grad = static_cast<double>(f.dot(ch.B() * f));
  a.clamped = true;
  return a;
}

// ---------------------------------------------------------------------------
// Random suites

struct SuiteConfig {
  int trials = 100;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
  unsigned threads = 0;  // 0: hardware concurrency
  DirichletSuiteConfig dirichlet;
  QuadConfig quad;
};

struct SuiteReport {
  std::vector<MarginReport> reports;
  bool pass = true;
  double min_margin = std::numeric_limits<double>::infinity();
};

namespace detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }
inline int uniform_int(Rng& g, int a, int b) { return std::uniform_int_distribution<int>(a, b)(g); }

// A bump or spline supported in [lo, lo + span].
inline Profile1D random_profile(Rng& g, double lo, double span, double slope_left) {
  if (slope_left == 0.0 && uniform_int(g, 0, 1) == 0) {
    const double r = uniform(g, 0.2, 0.5) * span;
    return Profile1D::bump(lo + r, r);
  }
  const int n = uniform_int(g, 4, 7);
  std::vector<double> t(n), v(n, 0.0);
  for (int i = 0; i < n; ++i) t[i] = lo + span * double(i) / double(n - 1);
  for (int i = 1; i + 1 < n; ++i) v[i] = uniform(g, -1.0, 1.0);
  return Profile1D::spline(std::move(t), std::move(v), slope_left);
}

inline Profile1D random_profile_for(Rng& g, InequalityId id) {
  const double span = uniform(g, 0.8, 4.0);
  if (uses_full_line(id)) return random_profile(g, uniform(g, -3.0, 2.0), span, 0.0);
  if (id == InequalityId::NAV && uniform_int(g, 0, 1) == 0) {
    double slope = uniform(g, -2.0, 2.0);
    if (std::abs(slope) < 0.1) slope = 0.5;
    return random_profile(g, 0.0, span, slope);
  }
  return random_profile(g, uniform(g, 0.05, 2.0), span, 0.0);
}

inline double random_coefficient(Rng& g) {
  const double c = uniform(g, -1.0, 1.0);
  return c == 0.0 ? 0.5 : c;
}

// Distinct picks from {0, ..., n-1}.
inline std::vector<int> pick_distinct(Rng& g, int n, int count) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < count; ++i) std::swap(idx[i], idx[uniform_int(g, i, n - 1)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Smooth clamped angular profile with the pole behaviour of order ℓ.
inline DirichletChannel::Vec random_clamped(Rng& g, const DirichletChannel& ch, double theta0) {
  const double c0 = uniform(g, 0.5, 1.5), c1 = uniform(g, -1.0, 1.0), c2 = uniform(g, -1.0, 1.0);
  const double w = boost::math::constants::pi<double>() / theta0;
  const int pole = std::min(ch.ell(), 2);
  auto shape = [=](double th) { return c0 + c1 * std::cos(w * th) + c2 * std::sin(w * th); };
  auto dshape = [=](double th) { return -c1 * w * std::sin(w * th) + c2 * w * std::cos(w * th); };
  auto base = [=](double th) {
    const double q = theta0 * theta0 - th * th;
    return std::pow(th, pole) * q * q;
  };
  auto dbase = [=](double th) {
    const double q = theta0 * theta0 - th * th;
    const double tp = pole == 0 ? 0.0 : pole * std::pow(th, pole - 1);
    return tp * q * q - 4.0 * th * std::pow(th, pole) * q;
  };
  return ch.interpolate([&](double th) { return base(th) * shape(th); },
                        [&](double th) { return dbase(th) * shape(th) + base(th) * dshape(th); });
}

inline std::vector<DirichletChannel> dirichlet_channels(const InequalitySetup& s) {
  std::vector<DirichletChannel> out;
  const int top = s.params.dim == 2 ? std::min(s.dirichlet_ell_max, 1) : s.dirichlet_ell_max;
  for (int ell = 0; ell <= top; ++ell) out.emplace_back(s.params.dim, ell, cap_angle(s.domain), s.dirichlet_grid);
  return out;
}

inline CylinderTestFunction random_test(Rng& g, const InequalitySetup& s,
                                        const std::vector<DirichletChannel>& channels) {
  CylinderTestFunction w;
  w.line = uses_full_line(s.id) ? LineKind::FullLine : LineKind::HalfLine;
  if (w.line == LineKind::HalfLine) w.side = uniform_int(g, 0, 1) == 0 ? Side::Interior : Side::Exterior;
  if (s.id == InequalityId::DIR) {
    const int avail = static_cast<int>(channels.size());
    const int count = uniform_int(g, 1, std::min(5, avail));
    for (int ell : pick_distinct(g, avail, count)) {
      const auto& ch = channels[ell];
      const auto f = random_clamped(g, ch, cap_angle(s.domain));
      CylinderMode m{0.0, ell, random_profile_for(g, s.id), random_coefficient(g), clamped_factor(ch, f)};
      m.lambda = m.angular.phi1 / m.angular.phi0;
      w.modes.push_back(std::move(m));
    }
    return w;
  }
  const int avail = static_cast<int>(std::min<std::size_t>(8, s.lambdas.size()));
  const int count = uniform_int(g, 1, std::min(5, avail));
  for (int i : pick_distinct(g, avail, count)) {
    const double lam = s.lambdas[i];
    w.modes.push_back({lam, i, random_profile_for(g, s.id), random_coefficient(g), AngularFactor::eigen(lam)});
  }
  return w;
}

}  // namespace detail

inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t(out[1]) << 32) | out[0];
}

// Test function number `trial` of a suite; identical for identical (setup, seed, trial).
inline CylinderTestFunction suite_test_function(const InequalitySetup& s, std::uint64_t seed, int trial,
                                                const std::vector<DirichletChannel>& channels = {}) {
  detail::Rng g(trial_seed(seed, trial));
  return detail::random_test(g, s, channels);
}

inline SuiteReport random_test_suite(const InequalitySetup& s, const SuiteConfig& cfg = {}) {
  if (cfg.trials < 1) throw InvalidArgument("trials must be at least 1");
  std::vector<DirichletChannel> channels;
  if (s.id == InequalityId::DIR) channels = detail::dirichlet_channels(s);
  std::vector<std::optional<MarginReport>> slots(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  auto work = [&](int first, int stride) {
    for (int t = first; t < cfg.trials; t += stride) {
      try {
        const auto w = suite_test_function(s, cfg.seed, t, channels);
        auto r = inequality_margin(s, w, cfg.tolerance, cfg.quad);
        r.seed = cfg.seed;
        r.trial = t;
        slots[t] = std::move(r);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  unsigned nt = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, static_cast<unsigned>(cfg.trials));
  if (nt <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(work, static_cast<int>(i), static_cast<int>(nt));
    for (auto& th : pool) th.join();
  }
  SuiteReport out;
  for (int t = 0; t < cfg.trials; ++t) {
    if (errors[t]) std::rethrow_exception(errors[t]);
    out.min_margin = std::min(out.min_margin, slots[t]->margin);
    out.pass = out.pass && slots[t]->pass;
    out.reports.push_back(std::move(*slots[t]));
  }
  return out;
}

inline SuiteReport random_test_suite(InequalityId id, const ConeParams<double>& p, const SphericalDomain& dom,
                                     const LambdaSelection<double>& sel, const SuiteConfig& cfg = {}) {
  return random_test_suite(make_setup(id, p, dom, sel, cfg.dirichlet), cfg);
}

// ---------------------------------------------------------------------------
// Sharpness witness: single mode at the argmin, profile y(εt).

struct SharpnessWitness {
  std::string inequality_id;
  double eps = 0.0;
  double A0 = 0.0;
  double lambda = 0.0;  // argmin eigenvalue (harmonic order for DIR)
  double quotient = 0.0;         // lhs / gradient term
  double relative_excess = 0.0;  // (lhs - A0·gradient term) / gradient term
};

inline SharpnessWitness sharpness_witness(const InequalitySetup& s, double eps, const QuadConfig& cfg = {}) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  CylinderTestFunction w;
  w.line = uses_full_line(s.id) ? LineKind::FullLine : LineKind::HalfLine;
  const Profile1D prof =
      w.line == LineKind::FullLine ? Profile1D::bump(0.0, 1.0).dilated(eps) : Profile1D::bump(1.5, 0.5).dilated(eps);
  SharpnessWitness r;
  r.inequality_id = to_string(s.id);
  r.eps = eps;
  r.A0 = s.A0;
  if (s.id == InequalityId::DIR) {
    DirichletChannel ch(s.params.dim, s.argmin_ell, cap_angle(s.domain), s.dirichlet_grid);
    const auto g = gamma_triple(s.params);
    const auto ep = ch.smallest(g.gamma, g.gamma_hat);
    w.modes.push_back({0.0, s.argmin_ell, prof, 1.0, clamped_factor(ch, ep.vector)});
    r.lambda = s.argmin_ell;
  } else {
    w.modes.push_back({s.argmin_lambda, 0, prof, 1.0, AngularFactor::eigen(s.argmin_lambda)});
    r.lambda = s.argmin_lambda;
  }
  const auto c = cylinder_integrals(s.params, w, MomentRequest::none(), cfg);
  double grad = c.G;
  if (s.id == InequalityId::SCH && s.A0 != 0.0) grad += c.L2 * s.coeff_l2 / s.A0;
  r.quotient = c.laplacian() / grad;
  r.relative_excess = r.quotient - s.A0;
  return r;
}

// ---------------------------------------------------------------------------
// Identity checks against x-space quadrature.

struct IdentityReport {
  std::string name;
  double x_space = 0.0;
  double cylinder = 0.0;
  double relative_discrepancy = 0.0;
  double tolerance = 1e-8;
  bool pass = false;
};

inline IdentityReport identity_report(std::string name, double x, double c, double tol) {
  IdentityReport r{std::move(name), x, c, 0.0, tol, false};
  const double scale = std::max(std::abs(c), std::numeric_limits<double>::min());
  r.relative_discrepancy = std::abs(x - c) / scale;
  r.pass = r.relative_discrepancy <= tol;
  return r;
}

namespace detail {

// Radial function values (v, v_r, v_rr) at r.
using Radial = std::function<std::array<double, 3>(double)>;

struct XSpaceIntegrals {
  double i0 = 0, i1 = 0, i2 = 0;
  std::optional<double> ln, lu2, lu4;
};

// ∫ r^{α-4}v², ∫ r^{α-2}(v_r² + λv²/r²), ∫ r^α (v_rr + (N-1)v_r/r - λv/r²)², all
// against r^{N-1} dr, plus the |log r|-weighted variants when `logs` is set.
inline XSpaceIntegrals radial_integrals(int dim, double alpha, double lambda, const Radial& v, double r_lo,
                                        double r_hi, const std::vector<double>& breaks, const MomentRequest& logs,
                                        const QuadConfig& cfg) {
  XSpaceIntegrals out;
  const double n1 = dim - 1;
  auto quad = [&](auto&& f) { return integrate(f, r_lo, r_hi, cfg, breaks).value; };
  out.i0 = quad([&](double r) {
    const auto u = v(r);
    return std::pow(r, alpha - 4 + n1) * u[0] * u[0];
  });
  out.i1 = quad([&](double r) {
    const auto u = v(r);
    return std::pow(r, alpha - 2 + n1) * (u[1] * u[1] + lambda * u[0] * u[0] / (r * r));
  });
  out.i2 = quad([&](double r) {
    const auto u = v(r);
    const double lap = u[2] + n1 * u[1] / r - lambda * u[0] / (r * r);
    return std::pow(r, alpha + n1) * lap * lap;
  });
  // r = 1 itself can be hit by rounding near the boundary sphere; the point has no mass.
  if (logs.w2_1)
    out.ln = quad([&](double r) {
      const auto u = v(r);
      const double l = std::log(r);
      if (l == 0.0) return 0.0;
      return std::pow(r, alpha - 2 + n1) * (u[1] * u[1] + lambda * u[0] * u[0] / (r * r)) / (l * l);
    });
  if (logs.w2_0)
    out.lu2 = quad([&](double r) {
      const auto u = v(r);
      const double l = std::log(r);
      if (l == 0.0) return 0.0;
      return std::pow(r, alpha - 4 + n1) * u[0] * u[0] / (l * l);
    });
  if (logs.w4_0)
    out.lu4 = quad([&](double r) {
      const auto u = v(r);
      const double l = std::log(r);
      if (l == 0.0) return 0.0;
      return std::pow(r, alpha - 4 + n1) * u[0] * u[0] / (l * l * l * l);
    });
  return out;
}

// u(r) = r^k Y(-log r) with Y(t) = p(t), or p(-t) on the exterior side.
inline Radial inverse_transform(double k, const Profile1D& prof, Side side) {
  const double sgn = side == Side::Exterior ? -1.0 : 1.0;
  return [=](double r) -> std::array<double, 3> {
    const double t = -std::log(r);
    const auto y = prof.eval(sgn * t);
    const double Y = y[0], Y1 = sgn * y[1], Y2 = y[2];
    const double rk = std::pow(r, k);
    return {rk * Y, rk / r * (k * Y - Y1), rk / (r * r) * (k * (k - 1) * Y - (2 * k - 1) * Y1 + Y2)};
  };
}

struct RRange {
  double lo, hi;
  std::vector<double> breaks;
};

inline RRange r_range(const Profile1D& prof, Side side) {
  const auto [tlo, thi] = prof.support();
  RRange r;
  if (side == Side::Exterior) {
    r.lo = std::exp(tlo);
    r.hi = std::exp(thi);
    for (double b : prof.breakpoints()) r.breaks.push_back(std::exp(b));
  } else {
    r.lo = std::exp(-thi);
    r.hi = std::exp(-tlo);
    for (double b : prof.breakpoints()) r.breaks.push_back(std::exp(-b));
  }
  if (!(r.hi < std::numeric_limits<double>::infinity()) || !(r.lo > 0.0 || thi == std::numeric_limits<double>::infinity()))
    throw InvalidArgument("profile support is too wide for x-space quadrature");
  std::sort(r.breaks.begin(), r.breaks.end());
  return r;
}

}  // namespace detail

struct EmdenFowlerConfig {
  QuadConfig quad{1e-15, 1e-12, 20000};
  double tolerance = 1e-8;
};

// Cross-validates the transform identities for u = T⁻¹(y φ_λ) on the cone (full
// line) or on {|x| < 1} / {|x| > 1} (half line, with the logarithmic identities).
inline std::vector<IdentityReport> emden_fowler_check(const ConeParams<double>& p, const Profile1D& prof,
                                                      double lambda, LineKind line = LineKind::FullLine,
                                                      Side side = Side::Interior, const EmdenFowlerConfig& cfg = {}) {
  p.validate();
  if (lambda < 0.0) throw NegativeInput("eigenvalue must be nonnegative");
  const bool half = line == LineKind::HalfLine;
  if (half && prof.support().first < 0.0) throw BoundaryClassViolation("half-line profiles must vanish for t < 0");
  if (!half && side == Side::Exterior) throw InvalidArgument("the exterior side applies to half-line tests only");
  const double k = (4.0 - p.dim - p.alpha) / 2.0;
  const auto rr = detail::r_range(prof, side);
  // Logarithmic identities wherever the weighted integrals converge at t = 0.
  MomentRequest req;
  if (half) {
    const auto ord = prof.order_at_zero();
    auto ok = [&](int deriv, int pw) { return !ord || detail::weight_integrable(*ord, deriv, pw); };
    req.w2_0 = ok(0, 2);
    req.w4_0 = ok(0, 4);
    req.w2_1 = req.cross = ok(1, 2) && req.w2_0;
  }
  const auto x = detail::radial_integrals(p.dim, p.alpha, lambda, detail::inverse_transform(k, prof, side), rr.lo,
                                          rr.hi, rr.breaks, req, cfg.quad);
  CylinderTestFunction w{{{lambda, 0, prof, 1.0, AngularFactor::eigen(lambda)}}, line, side};
  const auto c = cylinder_integrals(p, w, req, cfg.quad);
  std::vector<IdentityReport> out;
  out.push_back(identity_report("L2", x.i0, c.L2, cfg.tolerance));
  out.push_back(identity_report("gradient", x.i1, c.G, cfg.tolerance));
  out.push_back(identity_report("laplacian", x.i2, c.laplacian(), cfg.tolerance));
  if (x.ln) out.push_back(identity_report("log-gradient", *x.ln, c.LN, cfg.tolerance));
  if (x.lu2) out.push_back(identity_report("log-L2", *x.lu2, c.LU2, cfg.tolerance));
  if (x.lu4) out.push_back(identity_report("log4-L2", *x.lu4, c.LU4, cfg.tolerance));
  return out;
}

// Kelvin identities for û(x) = |x|^{2-N} u(x/|x|²), with u = T⁻¹(y φ_λ) taken
// for the exponent 4 - α.  The x-space side integrates û with weight exponent α;
// the cylinder side evaluates the 4 - α forms of y.
inline std::vector<IdentityReport> kelvin_check(const ConeParams<double>& p, const Profile1D& prof, double lambda,
                                                const EmdenFowlerConfig& cfg = {}) {
  p.validate();
  if (lambda < 0.0) throw NegativeInput("eigenvalue must be nonnegative");
  const auto q = p.reflected();
  const double k = (4.0 - q.dim - q.alpha) / 2.0;
  const auto u = detail::inverse_transform(k, prof, Side::Interior);
  const double n = p.dim;
  detail::Radial uhat = [=](double r) -> std::array<double, 3> {
    const auto v = u(1.0 / r);
    const double w0 = v[0], w1 = -v[1] / (r * r), w2 = 2.0 * v[1] / (r * r * r) + v[2] / (r * r * r * r);
    const double a = std::pow(r, 2.0 - n);
    return {a * w0, (2.0 - n) * a / r * w0 + a * w1,
            (2.0 - n) * (1.0 - n) * a / (r * r) * w0 + 2.0 * (2.0 - n) * a / r * w1 + a * w2};
  };
  const auto rr = detail::r_range(prof, Side::Interior);
  std::vector<double> br;
  for (double b : rr.breaks) br.push_back(1.0 / b);
  std::sort(br.begin(), br.end());
  const auto x = detail::radial_integrals(p.dim, p.alpha, lambda, uhat, 1.0 / rr.hi, 1.0 / rr.lo, br, MomentRequest::none(), cfg.quad);
  CylinderTestFunction w{{{lambda, 0, prof, 1.0, AngularFactor::eigen(lambda)}}, LineKind::FullLine, Side::Interior};
  const auto c = cylinder_integrals(q, w, MomentRequest::none(), cfg.quad);
  std::vector<IdentityReport> out;
  out.push_back(identity_report("kelvin-L2", x.i0, c.L2, cfg.tolerance));
  out.push_back(identity_report("kelvin-gradient", x.i1, c.G + (n - 2.0) * (p.alpha - 2.0) * c.L2, cfg.tolerance));
  out.push_back(identity_report("kelvin-laplacian", x.i2, c.laplacian(), cfg.tolerance));
  return out;
}

// ---------------------------------------------------------------------------
// Resonance

struct ResonanceEntry {
  double lambda;
  double alpha_minus;  // solutions of γ_α = -λ
  double alpha_plus;
  bool resonant;
};

struct ResonanceReport {
  bool resonant = false;
  std::optional<double> resonant_lambda;
  double gamma = 0.0;
  std::vector<ResonanceEntry> entries;
};

inline ResonanceReport resonance_report(const ConeParams<double>& p, const std::vector<double>& lambdas,
                                        double tol = 1e-7) {
  p.validate();
  ResonanceReport r;
  const auto g = gamma_triple(p);
  r.gamma = g.gamma;
  const double a = (p.dim - 2) / 2.0;
  for (double l : lambdas) {
    const double s = 2.0 * std::sqrt(a * a + l);
    const bool res = std::abs(l + g.gamma) <= tol && !(std::abs(l) <= tol && std::abs(g.gamma_hat) <= tol);
    r.entries.push_back({l, 2.0 - s, 2.0 + s, res});
    if (res && !r.resonant) {
      r.resonant = true;
      r.resonant_lambda = l;
    }
  }
  return r;
}

inline ResonanceReport resonance_report(const ConeParams<double>& p, const SphericalDomain& dom,
                                        const LambdaSelection<double>& sel) {
  return resonance_report(p, resolved_lambdas<double>(p.dim, dom, sel, {p}, {}, false));
}

}  // namespace hardy_rellich
