#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/scalar.hpp"

namespace hardy_rellich {

template <class T>
struct ConeParams {
  int dim = 2;
  T alpha = T(0);

  void validate() const {
    if (dim < 2) throw DimensionTooSmall("dimension must be at least 2, got " + std::to_string(dim));
    if constexpr (!is_exact_v<T>) {
      if (!std::isfinite(static_cast<double>(alpha))) throw InvalidArgument("alpha must be finite");
    }
  }

  // The Kelvin partner exponent 4 - alpha.
  ConeParams reflected() const { return {dim, T(4) - alpha}; }
};

template <class T>
ConeParams<double> to_double(const ConeParams<T>& p) {
  return {p.dim, to_double(p.alpha)};
}

template <class T>
struct GammaTriple {
  T gamma;
  T gamma_bar;
  T gamma_hat;
};

template <class T>
GammaTriple<T> gamma_triple(const ConeParams<T>& p) {
  p.validate();
  const T a = T(p.dim - 2) / T(2);
  const T b = (p.alpha - T(2)) / T(2);
  return {a * a - b * b, a * a + b * b, a + b};
}

// (γ+λ)²/(γ̂²+λ). At λ = 0 the value (N-α)²/4 is returned for every (N, α);
// it agrees with γ²/γ̂² whenever γ̂ ≠ 0 and is the convention when γ̂ = 0.
template <class T>
T hr_term(const ConeParams<T>& p, const T& lambda) {
  if (lambda < T(0)) throw NegativeInput("eigenvalue must be nonnegative");
  if (lambda == T(0)) {
    const T h = (T(p.dim) - p.alpha) / T(2);
    p.validate();
    return h * h;
  }
  const auto g = gamma_triple(p);
  const T num = g.gamma + lambda;
  return num * num / (g.gamma_hat * g.gamma_hat + lambda);
}

template <class T>
T rellich_term(const ConeParams<T>& p, const T& lambda) {
  if (lambda < T(0)) throw NegativeInput("eigenvalue must be nonnegative");
  const auto g = gamma_triple(p);
  return (g.gamma + lambda) * (g.gamma + lambda);
}

template <class T>
T p_alpha(const ConeParams<T>& p, const T& lambda) {
  if (lambda < T(0)) throw NegativeInput("eigenvalue must be nonnegative");
  const auto g = gamma_triple(p);
  const T h2 = g.gamma_hat * g.gamma_hat;
  const T am2 = p.alpha - T(2);
  return lambda * lambda + (am2 * am2 + T(2) * h2) * lambda + h2 * h2;
}

template <class T>
struct ConstantResult {
  T value;
  T argmin_lambda;
  bool resonant = false;
  std::optional<Rational> exact;
};

namespace detail {

template <class T, class Term>
ConstantResult<T> minimize(const ConeParams<T>& p, std::span<const T> lambdas, Term term) {
  p.validate();
  if (lambdas.empty()) throw EmptyLambda("eigenvalue set is empty");
  const auto g = gamma_triple(p);
  ConstantResult<T> r{};
  bool first = true;
  for (const T& l : lambdas) {
    const T v = term(l);
    if (first || v < r.value || (v == r.value && l < r.argmin_lambda)) {
      r.value = v;
      r.argmin_lambda = l;
      first = false;
    }
    // λ = 0 with γ̂ = 0 is the 0/0 convention, not a vanishing term.
    const bool convention = abs_value(l) <= equality_tolerance<T>() && abs_value(g.gamma_hat) <= equality_tolerance<T>();
    if (!convention && abs_value(T(l + g.gamma)) <= equality_tolerance<T>()) r.resonant = true;
  }
  if constexpr (is_exact_v<T>) r.exact = r.value;
  return r;
}

}  // namespace detail

template <class T>
ConstantResult<T> hardy_rellich_constant(const ConeParams<T>& p, std::span<const T> lambdas) {
  return detail::minimize(p, lambdas, [&](const T& l) { return hr_term(p, l); });
}

template <class T>
ConstantResult<T> rellich_constant(const ConeParams<T>& p, std::span<const T> lambdas) {
  return detail::minimize(p, lambdas, [&](const T& l) { return rellich_term(p, l); });
}

// Every eigenvalue above the returned bound has a larger Hardy-Rellich and
// Rellich term than `first`, so a scan up to it (plus one value) is exhaustive.
// Uses term(λ) ≥ λ + 2γ - γ̂² and |γ+λ| ≤ (γ+λ)² + 1.
template <class T>
T minimization_cutoff(const ConeParams<T>& p, const T& first) {
  const auto g = gamma_triple(p);
  const T hr = hr_term(p, first) - T(2) * g.gamma + g.gamma_hat * g.gamma_hat;
  const T rel = -g.gamma + rellich_term(p, first) + T(1);
  return std::max(hr, rel);
}

// Cutoff for the Hardy-Rellich term alone; much smaller than the joint one
// because the Rellich term grows quadratically in λ.
template <class T>
T hardy_rellich_cutoff(const ConeParams<T>& p, const T& first) {
  const auto g = gamma_triple(p);
  return hr_term(p, first) - T(2) * g.gamma + g.gamma_hat * g.gamma_hat;
}

template <class T>
struct MonotoneRange {
  T lower;
  T upper;
  bool in_range;
};

template <class T>
MonotoneRange<T> monotone_range(const ConeParams<T>& p) {
  p.validate();
  MonotoneRange<T> r{T(8 - p.dim) / T(3), T(p.dim), false};
  r.in_range = r.lower <= p.alpha && p.alpha <= r.upper;
  return r;
}

template <class T>
T min_lambda(std::span<const T> lambdas) {
  if (lambdas.empty()) throw EmptyLambda("eigenvalue set is empty");
  return *std::min_element(lambdas.begin(), lambdas.end());
}

template <class T>
struct SchminckeCoefficients {
  T grad_coeff;
  T zero_order_coeff;
  ConstantResult<T> reflected;
};

template <class T>
SchminckeCoefficients<T> schmincke_coefficients(const ConeParams<T>& p, std::span<const T> lambdas) {
  p.validate();
  if (p.dim < 3) throw DimensionTooSmall("Schmincke inequality needs N >= 3");
  auto mu = hardy_rellich_constant(p.reflected(), lambdas);
  return {mu.value, mu.value * T(p.dim - 2) * (T(2) - p.alpha), mu};
}

template <class T>
struct NdCoefficients {
  T A0, A1, A2;
  T lambda_min;
  ConstantResult<T> mu;
};

template <class T>
NdCoefficients<T> nd_coefficients(const ConeParams<T>& p, std::span<const T> lambdas) {
  auto mu = hardy_rellich_constant(p, lambdas);
  const T lmin = min_lambda(lambdas);
  const auto g = gamma_triple(p);
  const T den = T(4) * (lmin + g.gamma_hat * g.gamma_hat);
  const T am2 = p.alpha - T(2);
  // The denominator vanishes only when λ_Λ = 0, and then so does the numerator.
  const T a2 = den == T(0) ? T(0) : lmin * am2 * am2 / den;
  return {mu.value, T(1) / T(4), a2, lmin, mu};
}

template <class T>
T kappa_of(const ConeParams<T>& p, const T& lambda_min, const T& mu) {
  const auto g = gamma_triple(p);
  return (T(2) * g.gamma_bar + T(2) * lambda_min - mu) / T(4);
}

template <class T>
struct NdLogCoefficients {
  T A0, kappa, A2;
  T lambda_min;
  ConstantResult<T> mu;
};

template <class T>
NdLogCoefficients<T> nd_log_coefficients(const ConeParams<T>& p, std::span<const T> lambdas) {
  auto mu = hardy_rellich_constant(p, lambdas);
  const T lmin = min_lambda(lambdas);
  return {mu.value, kappa_of(p, lmin, mu.value), T(9) / T(16), lmin, mu};
}

template <class T>
struct PuncturedBallCoefficients {
  T A0, A1_grad_log, A1_sph_grad, K;
  ConstantResult<T> mu;
};

template <class T>
PuncturedBallCoefficients<T> punctured_ball_coefficients(const ConeParams<T>& p, const SphericalDomain& domain,
                                                         std::span<const T> lambdas) {
  if (!domain.is_full_sphere())
    throw DomainMismatch("punctured-ball coefficients are defined for the full sphere only, got " + domain.name());
  auto mu = hardy_rellich_constant(p, lambdas);
  const auto g = gamma_triple(p);
  const T k = (T(2) * g.gamma_bar - g.gamma_hat * g.gamma_hat - mu.value) / T(4);
  return {mu.value, T(1) / T(4), T(1) / T(4), k, mu};
}

template <class T>
struct NavierCoefficients {
  T A0, A1;
  T lambda_min;
  ConstantResult<T> mu;
};

template <class T>
NavierCoefficients<T> navier_coefficients(const ConeParams<T>& p, std::span<const T> lambdas) {
  auto mu = hardy_rellich_constant(p, lambdas);
  const T lmin = min_lambda(lambdas);
  return {mu.value, kappa_of(p, lmin, mu.value), lmin, mu};
}

template <class T>
struct DirichletConelikeCoefficients {
  T A0, kappa0, A1;
  T lambda_min;
};

template <class T>
DirichletConelikeCoefficients<T> dirichlet_conelike_coefficients(const ConeParams<T>& p, std::span<const T> lambdas,
                                                                 const T& mu0) {
  p.validate();
  if (mu0 < T(0)) throw NegativeInput("mu0 must be nonnegative");
  const T lmin = min_lambda(lambdas);
  return {mu0, kappa_of(p, lmin, mu0), T(9) / T(16), lmin};
}

struct WeightFreeRow {
  int dim;
  Rational mu0;
  Rational kappa0;
};

// Weight-free (α = 0) constants for the punctured ball: μ_0 and κ_0.
inline WeightFreeRow weight_free_table(int n) {
  if (n < 2) throw DimensionTooSmall("weight-free table needs N >= 2");
  switch (n) {
    case 2: return {2, Rational(0), Rational(1, 2)};
    case 3: return {3, Rational(25, 36), Rational(65, 144)};
    case 4: return {4, Rational(3), Rational(1, 4)};
    default: break;
  }
  const Rational q(n - 4, 4);
  return {n, Rational(n * n, 4), q * q};
}

}  // namespace hardy_rellich
