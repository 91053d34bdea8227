#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/scalar.hpp"

namespace hardy_rellich {

// Binomial coefficient with C(m, r) = 0 for m < r or m < 0.
inline BigInt binomial(long long m, long long r) {
  if (r < 0 || m < r || m < 0) return 0;
  BigInt b = 1;
  for (long long i = 1; i <= r; ++i) {
    b *= (m - r + i);
    b /= i;
  }
  return b;
}

// Dimension of the space of degree-k spherical harmonics on S^{n-1}.
inline BigInt harmonic_dim(int k, int n) {
  if (k < 0 || n < 1) return 0;
  if (n == 1) return k <= 1 ? 1 : 0;
  return binomial(k + n - 1, n - 1) - binomial(k + n - 3, n - 1);
}

// One eigenvalue of the Dirichlet Laplace-Beltrami operator.  (ell, k) labels the
// harmonic order on S^{N-2} and the radial index; for the closed-form spectra the
// label names the lowest harmonic order present in the eigenspace.  `degree` is j
// for sphere and hemisphere and the rank among distinct values for caps.
template <class T>
struct SpectrumEntry {
  T lambda;
  int ell = 0;
  int k = 1;
  BigInt multiplicity = 1;
  int degree = 0;
};

template <class T>
struct Spectrum {
  SphericalDomain domain;
  int dim = 2;
  std::vector<SpectrumEntry<T>> entries;

  const T& principal() const {
    if (entries.empty()) throw EmptyLambda("empty spectrum");
    return entries.front().lambda;
  }

  std::vector<T> values() const {
    std::vector<T> v;
    v.reserve(entries.size());
    for (const auto& e : entries) v.push_back(e.lambda);
    return v;
  }

  // First `count` eigenvalues repeated according to multiplicity.
  std::vector<T> expanded(std::size_t count) const {
    std::vector<T> v;
    for (const auto& e : entries) {
      for (BigInt m = 0; m < e.multiplicity && v.size() < count; ++m) v.push_back(e.lambda);
      if (v.size() >= count) break;
    }
    return v;
  }
};

template <class T>
Spectrum<T> sphere_eigenvalues(int n, int j_max) {
  if (n < 2) throw DimensionTooSmall("sphere spectrum needs N >= 2");
  if (j_max < 0) throw InvalidArgument("j_max must be nonnegative");
  Spectrum<T> s{SphericalDomain::sphere(), n, {}};
  for (int j = 0; j <= j_max; ++j)
    s.entries.push_back({T(j) * T(j + n - 2), 0, j + 1, harmonic_dim(j, n), j});
  return s;
}

template <class T>
Spectrum<T> hemisphere_eigenvalues(int n, int j_max) {
  if (n < 2) throw DimensionTooSmall("hemisphere spectrum needs N >= 2");
  if (j_max < 1) throw InvalidArgument("j_max must be at least 1");
  Spectrum<T> s{SphericalDomain::hemisphere(), n, {}};
  for (int j = 1; j <= j_max; ++j) {
    // Harmonics odd in x_N: degree-j harmonics split into (x_N-parity) x H_l(R^{N-1}).
    BigInt mult = 0;
    for (int l = (j % 2 == 1) ? 0 : 1; l <= j; l += 2) mult += harmonic_dim(l, n - 1);
    const int l0 = (j % 2 == 1) ? 0 : 1;
    s.entries.push_back({T(j) * T(j + n - 2), l0, (j - l0 + 1) / 2, mult, j});
  }
  return s;
}

}  // namespace hardy_rellich
