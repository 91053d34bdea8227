#pragma once

// Closed forms written straight from (N, α, λ), without the gamma triple, so
// that the library's algebra is checked against an independent expansion.

#include "hardy_rellich/scalar.hpp"

namespace rational_oracle {

using hardy_rellich::Rational;

inline Rational hr_term(int n, const Rational& alpha, const Rational& lambda) {
  const Rational num = Rational((n - 2) * (n - 2), 4) - (alpha - 2) * (alpha - 2) / 4 + lambda;
  const Rational den = (n + alpha - 4) * (n + alpha - 4) / 4 + lambda;
  if (lambda == 0) return (n - alpha) * (n - alpha) / 4;
  return num * num / den;
}

// min over the first `count` sphere (or hemisphere) eigenvalues j(j+N-2).
inline Rational mu(int n, const Rational& alpha, bool hemisphere, int count = 64) {
  Rational best = -1;
  for (int j = hemisphere ? 1 : 0; j < count; ++j) {
    const Rational v = hr_term(n, alpha, Rational(j * (j + n - 2)));
    if (best < 0 || v < best) best = v;
  }
  return best;
}

inline Rational half_ball_mu(int n) { return Rational((n * n - 4) * (n * n - 4), 4 * ((n - 2) * (n - 2) + 8)); }
inline Rational half_ball_log_coefficient(int n) { return Rational(4 * (n - 1), (n - 2) * (n - 2) + 8); }
inline Rational half_ball_navier_coefficient(int n) {
  const int m = n - 2;
  return Rational(m * m * m * m + 16 * (n * n + 4), 16 * (m * m + 8));
}

}  // namespace rational_oracle
