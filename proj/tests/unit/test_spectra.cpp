#include <catch_amalgamated.hpp>

#include <boost/math/constants/constants.hpp>

#include "fd_oracle.hpp"
#include "hardy_rellich/cap_solver.hpp"
#include "hardy_rellich/selection.hpp"
#include "hardy_rellich/spectra.hpp"

namespace hr = hardy_rellich;
using hr::Rational;
using boost::math::constants::pi;
using boost::math::constants::half_pi;

TEST_CASE("sphere eigenvalues and multiplicities", "[spectra]") {
  const auto s = hr::sphere_eigenvalues<Rational>(3, 3);
  REQUIRE(s.entries.size() == 4);
  const Rational want[] = {0, 2, 6, 12};
  for (int j = 0; j < 4; ++j) {
    CHECK(s.entries[j].lambda == want[j]);
    CHECK(s.entries[j].multiplicity == 2 * j + 1);
  }
  CHECK(s.principal() == 0);
  // Degree-j harmonics in N = 4 number (j+1)².
  const auto s4 = hr::sphere_eigenvalues<Rational>(4, 5);
  for (int j = 0; j <= 5; ++j) CHECK(s4.entries[j].multiplicity == (j + 1) * (j + 1));
  // N = 2: cos jθ and sin jθ.
  const auto s2 = hr::sphere_eigenvalues<Rational>(2, 4);
  CHECK(s2.entries[0].multiplicity == 1);
  for (int j = 1; j <= 4; ++j) CHECK(s2.entries[j].multiplicity == 2);
  CHECK_THROWS_AS(hr::sphere_eigenvalues<Rational>(1, 3), hr::DimensionTooSmall);
}

TEST_CASE("hemisphere eigenvalues and multiplicities", "[spectra]") {
  for (int n = 2; n <= 8; ++n) CHECK(hr::hemisphere_eigenvalues<Rational>(n, 3).principal() == n - 1);
  const auto h3 = hr::hemisphere_eigenvalues<Rational>(3, 6);
  for (int j = 1; j <= 6; ++j) {
    CHECK(h3.entries[j - 1].lambda == j * (j + 1));
    CHECK(h3.entries[j - 1].multiplicity == j);  // Y_j^m with j - m odd
  }
  const auto h2 = hr::hemisphere_eigenvalues<Rational>(2, 5);
  for (const auto& e : h2.entries) CHECK(e.multiplicity == 1);
  // Odd and even harmonics together make up the full sphere space.
  for (int n = 3; n <= 7; ++n)
    for (int j = 1; j <= 6; ++j) {
      hr::BigInt even = 0;
      for (int l = j % 2; l <= j; l += 2) even += hr::harmonic_dim(l, n - 1);
      CHECK(hr::hemisphere_eigenvalues<Rational>(n, j).entries.back().multiplicity + even == hr::harmonic_dim(j, n));
    }
  CHECK_THROWS_AS(hr::hemisphere_eigenvalues<Rational>(3, 0), hr::InvalidArgument);
}

TEST_CASE("cap of half angle reproduces the hemisphere", "[spectra]") {
  for (int n = 2; n <= 4; ++n) {
    const auto cap = hr::cap_eigenvalues(n, half_pi<double>(), 5);
    const auto hemi = hr::hemisphere_eigenvalues<double>(n, 8);
    const auto a = cap.expanded(5), b = hemi.expanded(5);
    REQUIRE(a.size() == 5);
    for (int i = 0; i < 5; ++i) {
      INFO("N=" << n << " i=" << i);
      CHECK(std::abs(a[i] - b[i]) <= 1e-8 * b[i]);
    }
  }
}

TEST_CASE("shooting agrees with the finite-difference oracle", "[spectra]") {
  for (int n : {2, 3, 5})
    for (double th : {0.6, 1.3, 2.4}) {
      const int top = n == 2 ? 1 : 2;
      for (int ell = 0; ell <= top; ++ell) {
        const hr::CapChannel ch(n, ell, th);
        const auto ref = fd_oracle::channel_extrapolated(n, ell, th, 2000, 2);
        for (int k = 1; k <= 2; ++k) {
          const double v = ch.eigenvalue(k);
          INFO("N=" << n << " theta0=" << th << " ell=" << ell << " k=" << k);
          CHECK(std::abs(v - ref[k - 1]) <= 1e-6 * v);
        }
      }
    }
}

TEST_CASE("cap spectrum is sorted with labels", "[spectra]") {
  const auto s = hr::cap_eigenvalues(4, 1.1, 12);
  REQUIRE(!s.entries.empty());
  hr::BigInt total = 0;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    CHECK(s.entries[i].lambda >= 0.0);
    if (i) CHECK(s.entries[i - 1].lambda <= s.entries[i].lambda);
    CHECK(s.entries[i].multiplicity == hr::harmonic_dim(s.entries[i].ell, 3));
    total += s.entries[i].multiplicity;
  }
  CHECK(total >= 12);
  CHECK(s.principal() == s.entries.front().lambda);
  CHECK(s.entries.front().ell == 0);
}

TEST_CASE("principal eigenvalue decreases with the cap angle", "[spectra]") {
  for (int n : {2, 3, 4}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double th = 0.3; th < 3.0; th += 0.3) {
      const double v = hr::cap_eigenvalues(n, th, 1).principal();
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("cap arguments are validated", "[spectra]") {
  CHECK_THROWS_AS(hr::cap_eigenvalues(3, 0.0, 3), hr::InvalidAngle);
  CHECK_THROWS_AS(hr::cap_eigenvalues(3, pi<double>(), 3), hr::InvalidAngle);
  CHECK_THROWS_AS(hr::cap_eigenvalues(3, 1.0, 0), hr::InvalidArgument);
  CHECK_THROWS_AS(hr::cap_eigenvalues(1, 1.0, 3), hr::DimensionTooSmall);
}

TEST_CASE("domain grammar", "[spectra]") {
  CHECK(hr::parse_domain("sphere").is_full_sphere());
  CHECK(hr::parse_domain("hemisphere").kind == hr::DomainKind::Hemisphere);
  CHECK(hr::parse_domain("cap:0.5").theta0 == 0.5);
  CHECK_THROWS_AS(hr::parse_domain("cap:"), hr::InvalidArgument);
  CHECK_THROWS_AS(hr::parse_domain("cap:4"), hr::InvalidAngle);
  CHECK_THROWS_AS(hr::parse_domain("ball"), hr::InvalidArgument);
}

TEST_CASE("eigenvalue selections", "[spectra]") {
  const auto S = hr::sphere_eigenvalues<Rational>(3, 6);
  using Sel = hr::LambdaSelection<Rational>;
  CHECK(hr::resolve_selection(S, Sel::all()).front() == 0);
  CHECK(hr::resolve_selection(S, hr::parse_selection<Rational>("tail:2")).front() == 6);
  CHECK(hr::resolve_selection(S, Sel::exclude_principal()).front() == 2);
  const auto set = hr::resolve_selection(S, hr::parse_selection<Rational>("set:12,2,2"));
  REQUIRE(set.size() == 2);
  CHECK(set[0] == 2);
  CHECK(set[1] == 12);
  CHECK(hr::resolve_selection(S, hr::parse_selection<Rational>("only:6")) == std::vector<Rational>{6});
  CHECK_THROWS_AS(hr::resolve_selection(S, hr::parse_selection<Rational>("only:5")), hr::NotInSpectrum);
  CHECK_THROWS_AS(hr::parse_selection<Rational>("tail:0"), hr::InvalidArgument);
  CHECK_THROWS_AS(hr::parse_selection<Rational>("set:-1"), hr::NegativeInput);
  CHECK_THROWS_AS(hr::parse_selection<Rational>("most"), hr::InvalidArgument);
  CHECK(hr::parse_selection<Rational>("set:1/2,3").describe() == "set:1/2,3/1");
}

TEST_CASE("resolved eigenvalues extend past the cutoff", "[spectra]") {
  const hr::ConeParams<Rational> p{6, Rational(1)};
  const auto L = hr::resolved_lambdas<Rational>(6, hr::SphericalDomain::sphere(), hr::LambdaSelection<Rational>::all(),
                                                {p});
  CHECK(L.back() > hr::minimization_cutoff(p, L.front()));
  const auto C = hr::resolved_lambdas<double>(3, hr::SphericalDomain::cap(1.0), hr::LambdaSelection<double>::all(),
                                              {{3, 0.0}}, {}, false);
  CHECK(C.back() > hr::hardy_rellich_cutoff(hr::ConeParams<double>{3, 0.0}, C.front()));
}
