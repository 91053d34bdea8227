#include <catch_amalgamated.hpp>

#include <random>

#include "hardy_rellich/constants.hpp"
#include "hardy_rellich/selection.hpp"
#include "rational_oracle.hpp"

namespace hr = hardy_rellich;
using hr::Rational;
using Q = hr::ConeParams<Rational>;

namespace {

std::vector<Rational> lambdas(int n, const hr::SphericalDomain& d, const Rational& alpha,
                              const char* sel = "all") {
  return hr::resolved_lambdas<Rational>(n, d, hr::parse_selection<Rational>(sel), {Q{n, alpha}}, {}, false);
}

Rational mu(int n, const Rational& alpha, const hr::SphericalDomain& d) {
  const auto L = lambdas(n, d, alpha);
  return hr::hardy_rellich_constant(Q{n, alpha}, std::span<const Rational>(L)).value;
}

}  // namespace

TEST_CASE("gamma triple", "[constants]") {
  auto g = hr::gamma_triple(Q{4, Rational(0)});
  CHECK(g.gamma == 0);
  CHECK(g.gamma_bar == 2);
  CHECK(g.gamma_hat == 0);

  g = hr::gamma_triple(Q{5, Rational(1, 2)});
  CHECK(g.gamma == Rational(27, 16));
  CHECK(g.gamma_bar == Rational(45, 16));
  CHECK(g.gamma_hat == Rational(3, 4));

  CHECK_THROWS_AS(hr::gamma_triple(Q{1, Rational(0)}), hr::DimensionTooSmall);
}

TEST_CASE("hr_term at zero is (N - alpha)^2 / 4", "[constants]") {
  for (int n = 2; n <= 9; ++n)
    for (int a2 = -6; a2 <= 12; ++a2) {
      const Rational a(a2, 2);
      CHECK(hr::hr_term(Q{n, a}, Rational(0)) == (n - a) * (n - a) / 4);
    }
  CHECK_THROWS_AS(hr::hr_term(Q{3, Rational(0)}, Rational(-1)), hr::NegativeInput);
}

TEST_CASE("hr_term matches the direct expansion", "[constants]") {
  std::mt19937_64 g(11);
  std::uniform_int_distribution<int> nd(2, 12), num(-40, 40), den(1, 9), lam(0, 300);
  for (int i = 0; i < 500; ++i) {
    const int n = nd(g);
    const Rational a(num(g), den(g)), l(lam(g), den(g));
    INFO("N=" << n << " alpha=" << a << " lambda=" << l);
    if (l != 0 && (n + a - 4) * (n + a - 4) / 4 + l == 0) continue;
    CHECK(hr::hr_term(Q{n, a}, l) == rational_oracle::hr_term(n, a, l));
  }
}

TEST_CASE("classical weight-free constants", "[constants]") {
  const auto S = hr::SphericalDomain::sphere();
  CHECK(mu(4, Rational(0), S) == 3);
  CHECK(mu(3, Rational(0), S) == Rational(25, 36));
  CHECK(mu(2, Rational(0), S) == 0);
  for (int n = 5; n <= 12; ++n) CHECK(mu(n, Rational(0), S) == Rational(n * n, 4));
}

TEST_CASE("half-space constant", "[constants]") {
  for (int n = 2; n <= 10; ++n) {
    INFO("N=" << n);
    CHECK(mu(n, Rational(0), hr::SphericalDomain::hemisphere()) == rational_oracle::half_ball_mu(n));
  }
}

TEST_CASE("exhaustive scan agrees with a long brute-force scan", "[constants]") {
  for (int n = 2; n <= 8; ++n)
    for (int a2 = -4; a2 <= 14; ++a2) {
      const Rational a(a2, 2);
      INFO("N=" << n << " alpha=" << a);
      CHECK(mu(n, a, hr::SphericalDomain::sphere()) == rational_oracle::mu(n, a, false));
      CHECK(mu(n, a, hr::SphericalDomain::hemisphere()) == rational_oracle::mu(n, a, true));
    }
}

TEST_CASE("constant at alpha = 4 - N", "[constants]") {
  for (int n = 3; n <= 10; ++n) {
    const Rational a(4 - n);
    const auto L = lambdas(n, hr::SphericalDomain::sphere(), a);
    const auto c = hr::hardy_rellich_constant(Q{n, a}, std::span<const Rational>(L));
    INFO("N=" << n);
    CHECK(c.value == std::min(Rational((n - 2) * (n - 2)), Rational(n - 1)));
  }
}

TEST_CASE("resonance makes the constant vanish", "[constants]") {
  // N = 4, α = 6: γ = -3, so λ = 3 is resonant.
  const Q p{4, Rational(0)};
  const auto g = hr::gamma_triple(Q{4, Rational(6)});
  std::vector<Rational> L{Rational(0), -g.gamma};
  const auto c = hr::hardy_rellich_constant(Q{4, Rational(6)}, std::span<const Rational>(L));
  CHECK(c.value == 0);
  CHECK(c.resonant);
  std::vector<Rational> L2{Rational(3)};
  CHECK_FALSE(hr::hardy_rellich_constant(p, std::span<const Rational>(L2)).resonant);
  // N = 4, α = 4: γ = 0 and γ̂ = 2, so the λ = 0 term vanishes.
  const auto L4 = lambdas(4, hr::SphericalDomain::sphere(), Rational(4));
  const auto c4 = hr::hardy_rellich_constant(Q{4, Rational(4)}, std::span<const Rational>(L4));
  CHECK(c4.value == 0);
  CHECK(c4.resonant);
  // N = 4, α = 0 has γ = 0 ∈ -Λ, but the λ = 0 term is the (N - α)²/4 convention.
  const auto L0 = lambdas(4, hr::SphericalDomain::sphere(), Rational(0));
  const auto c0 = hr::hardy_rellich_constant(p, std::span<const Rational>(L0));
  CHECK(c0.value == 3);
  CHECK_FALSE(c0.resonant);
}

TEST_CASE("empty eigenvalue set", "[constants]") {
  std::vector<Rational> none;
  CHECK_THROWS_AS(hr::hardy_rellich_constant(Q{3, Rational(0)}, std::span<const Rational>(none)), hr::EmptyLambda);
}

TEST_CASE("half-ball remainder coefficients", "[constants]") {
  for (int n = 2; n <= 10; ++n) {
    INFO("N=" << n);
    const auto L = lambdas(n, hr::SphericalDomain::hemisphere(), Rational(0));
    const std::span<const Rational> S(L);
    const Q p{n, Rational(0)};
    const auto nd = hr::nd_coefficients(p, S);
    CHECK(nd.A0 == rational_oracle::half_ball_mu(n));
    CHECK(nd.A1 == Rational(1, 4));
    CHECK(nd.A2 == rational_oracle::half_ball_log_coefficient(n));
    const auto nav = hr::navier_coefficients(p, S);
    CHECK(nav.A1 == rational_oracle::half_ball_navier_coefficient(n));
  }
}

TEST_CASE("log-gradient coefficient algebra", "[constants]") {
  // (1/4)(2λ + 2γ̄ - hr_term(λ)) - (λ + γ̂²)/4 = λ(α-2)² / (4(λ + γ̂²))
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> nd(2, 12), num(-60, 60), den(1, 12), lam(1, 400);
  int checked = 0;
  while (checked < 1000) {
    const int n = nd(g);
    const Rational a(num(g), den(g)), l(lam(g), den(g));
    const Q p{n, a};
    const auto t = hr::gamma_triple(p);
    if (l + t.gamma_hat * t.gamma_hat == 0) continue;
    const Rational lhs = (2 * l + 2 * t.gamma_bar - hr::hr_term(p, l)) / 4 - (l + t.gamma_hat * t.gamma_hat) / 4;
    const Rational rhs = l * (a - 2) * (a - 2) / (4 * (l + t.gamma_hat * t.gamma_hat));
    INFO("N=" << n << " alpha=" << a << " lambda=" << l);
    REQUIRE(lhs == rhs);
    ++checked;
  }
}

TEST_CASE("punctured-ball K coefficient", "[constants]") {
  for (int n = 2; n <= 12; ++n)
    for (int a2 = -4; a2 <= 12; ++a2) {
      const Rational a(a2, 2);
      const auto L = lambdas(n, hr::SphericalDomain::sphere(), a);
      const auto c = hr::punctured_ball_coefficients(Q{n, a}, hr::SphericalDomain::sphere(),
                                                     std::span<const Rational>(L));
      INFO("N=" << n << " alpha=" << a);
      CHECK(c.K >= 0);
      CHECK(4 * c.K == (n - a) * (n - a) / 4 - c.A0);
      if (n >= 5 && a == 0) CHECK(c.K == 0);
    }
  const auto L = lambdas(3, hr::SphericalDomain::hemisphere(), Rational(0));
  CHECK_THROWS_AS(hr::punctured_ball_coefficients(Q{3, Rational(0)}, hr::SphericalDomain::hemisphere(),
                                                  std::span<const Rational>(L)),
                  hr::DomainMismatch);
}

TEST_CASE("weight-free table from the general formula", "[constants]") {
  for (int n = 2; n <= 10; ++n) {
    const auto L = lambdas(n, hr::SphericalDomain::sphere(), Rational(0));
    const auto c = hr::nd_log_coefficients(Q{n, Rational(0)}, std::span<const Rational>(L));
    const auto row = hr::weight_free_table(n);
    INFO("N=" << n);
    CHECK(c.A0 == row.mu0);
    CHECK(c.kappa == row.kappa0);
  }
  CHECK(hr::weight_free_table(3).kappa0 == Rational(65, 144));
  CHECK(hr::weight_free_table(7).kappa0 == Rational(9, 16));
  CHECK_THROWS_AS(hr::weight_free_table(1), hr::DimensionTooSmall);
}

TEST_CASE("Schmincke coefficients use the reflected exponent", "[constants]") {
  const Q p{5, Rational(0)};
  const auto L = lambdas(5, hr::SphericalDomain::sphere(), Rational(4));
  const auto c = hr::schmincke_coefficients(p, std::span<const Rational>(L));
  CHECK(c.grad_coeff == Rational(1, 4));
  CHECK(c.zero_order_coeff == Rational(3, 2));
  CHECK_THROWS_AS(hr::schmincke_coefficients(Q{2, Rational(0)}, std::span<const Rational>(L)),
                  hr::DimensionTooSmall);
}

TEST_CASE("Dirichlet-class coefficients", "[constants]") {
  std::vector<double> L{2.0, 6.0};
  const auto c = hr::dirichlet_conelike_coefficients(hr::ConeParams<double>{3, 0.0}, std::span<const double>(L), 5.0);
  CHECK(c.A0 == 5.0);
  CHECK(c.kappa0 == Catch::Approx((2 * 1.25 + 4 - 5) / 4.0));
  CHECK(c.A1 == 9.0 / 16.0);
  CHECK_THROWS_AS(hr::dirichlet_conelike_coefficients(hr::ConeParams<double>{3, 0.0}, std::span<const double>(L), -1.0),
                  hr::NegativeInput);
}

TEST_CASE("monotone range", "[constants]") {
  const auto r = hr::monotone_range(Q{5, Rational(2)});
  CHECK(r.lower == 1);
  CHECK(r.upper == 5);
  CHECK(r.in_range);
  CHECK_FALSE(hr::monotone_range(Q{5, Rational(6)}).in_range);
}

TEST_CASE("exact and double arithmetic agree", "[constants]") {
  for (int n = 2; n <= 8; ++n) {
    const auto Lq = lambdas(n, hr::SphericalDomain::hemisphere(), Rational(1, 3));
    const auto Ld = hr::resolved_lambdas<double>(n, hr::SphericalDomain::hemisphere(),
                                                 hr::LambdaSelection<double>::all(), {{n, 1.0 / 3.0}}, {}, false);
    const auto q = hr::hardy_rellich_constant(Q{n, Rational(1, 3)}, std::span<const Rational>(Lq));
    const auto d = hr::hardy_rellich_constant(hr::ConeParams<double>{n, 1.0 / 3.0}, std::span<const double>(Ld));
    CHECK(d.value == Catch::Approx(hr::to_double(q.value)).epsilon(1e-14));
  }
}
