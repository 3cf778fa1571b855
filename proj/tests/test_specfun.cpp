#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqnls/errors.hpp"
#include "cqnls/specfun.hpp"
#include "oracles.hpp"

using namespace cqnls;
using namespace cqnls::specfun;

TEST_CASE("erfi: zero, odd symmetry and the Maclaurin value at 1") {
  CHECK(erfi(0.0) == 0.0);
  CHECK(erfi(-1.3) == -erfi(1.3));
  CHECK(erfi(1.0) == doctest::Approx(1.650425758797543).epsilon(1e-15));
  CHECK(erfi(1.0) == doctest::Approx(static_cast<double>(oracle::erfi_maclaurin(1.0L))).epsilon(1e-15));
}

TEST_CASE("erfi matches the long-double Maclaurin oracle to 1e-13 on |x| <= 6") {
  double worst = 0.0;
  for (double x = -6.0; x <= 6.0 + 1e-12; x += 0.01) {
    const auto ref = static_cast<double>(oracle::erfi_maclaurin(x));
    if (ref == 0.0) continue;
    worst = std::max(worst, std::abs(erfi(x) - ref) / std::abs(ref));
    CHECK(erfi(-x) == -erfi(x));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("erfi asymptotic branch agrees with the oracle beyond the switch point") {
  for (double x : {6.5, 8.0, 12.0, 20.0, 25.9}) {
    const auto ref = static_cast<double>(oracle::erfi_maclaurin(x));
    CHECK(erfi(x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("erfi rejects arguments beyond the overflow bound") {
  CHECK_THROWS_AS(erfi(26.5), DomainError);
  CHECK_THROWS_AS(erfi(-30.0), DomainError);
  CHECK_THROWS_AS(erfi(std::nan("")), DomainError);
  CHECK_NOTHROW(erfi(26.0));
}

TEST_CASE("dawson is exp(-x^2) sqrt(pi)/2 erfi(x)") {
  for (double x : {0.3, 1.0, 2.5, 5.0, 9.0}) {
    const double ref = std::exp(-x * x) * std::sqrt(std::numbers::pi) / 2.0 *
                       static_cast<double>(oracle::erfi_maclaurin(x));
    CHECK(dawson(x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("jacobi_sn limits: circular at k = 0, hyperbolic at k = 1") {
  CHECK(jacobi_sn(0.7, 0.0) == doctest::Approx(std::sin(0.7)).epsilon(1e-15));
  CHECK(jacobi_sn(0.7, 1.0) == doctest::Approx(std::tanh(0.7)).epsilon(1e-15));
  CHECK(jacobi_sn(0.7, 0.0) == doctest::Approx(0.644217687).epsilon(1e-9));
  CHECK(jacobi_sn(0.7, 1.0) == doctest::Approx(0.604367777).epsilon(1e-9));
  CHECK(jacobi_cn(0.7, 1.0) == doctest::Approx(1.0 / std::cosh(0.7)).epsilon(1e-15));
  CHECK(jacobi_dn(0.7, 0.0) == 1.0);
}

TEST_CASE("jacobi_sn(0.5, 0.5) agrees with quadrature inversion of F(phi | k)") {
  CHECK(jacobi_sn(0.5, 0.5) == doctest::Approx(oracle::sn_by_inversion(0.5, 0.5)).epsilon(1e-12));
  for (double k : {0.1, 0.7, 0.95}) {
    for (double u : {0.2, 0.9, 1.4}) {
      CHECK(jacobi_sn(u, k) == doctest::Approx(oracle::sn_by_inversion(u, k)).epsilon(1e-11));
    }
  }
}

TEST_CASE("sn, cn, dn satisfy the Pythagorean identities on a (u, k) lattice") {
  double worst = 0.0;
  for (int ik = 0; ik <= 10; ++ik) {
    const double k = ik / 10.0;
    for (double u = -10.0; u <= 10.0; u += 0.05) {
      const auto e = jacobi_elliptic(u, k);
      worst = std::max(worst, std::abs(e.sn * e.sn + e.cn * e.cn - 1.0));
      worst = std::max(worst, std::abs(e.dn * e.dn + k * k * e.sn * e.sn - 1.0));
      CHECK(std::abs(e.sn) <= 1.0);
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("jacobi functions reject a modulus outside [0, 1]") {
  CHECK_THROWS_AS(jacobi_sn(0.3, -0.1), DomainError);
  CHECK_THROWS_AS(jacobi_sn(0.3, 1.01), DomainError);
}

TEST_CASE("elliptic_k: quarter period of sn") {
  CHECK(elliptic_k(0.0) == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-15));
  CHECK(std::isinf(elliptic_k(1.0)));
  const double k = 0.6;
  CHECK(elliptic_k(k) == doctest::Approx(oracle::ellint_f(std::numbers::pi / 2.0, k)).epsilon(1e-12));
  CHECK(jacobi_sn(elliptic_k(k), k) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("WeierstrassInvariants: discriminant and classification") {
  const WeierstrassInvariants trivial(0.0, 0.0);
  CHECK(trivial.classification() == InvariantClass::trivial);
  CHECK(trivial.delta() == 0.0);

  const WeierstrassInvariants degenerate(4.0 / 3.0, -8.0 / 27.0);
  CHECK(degenerate.classification() == InvariantClass::degenerate);

  const WeierstrassInvariants generic(4.0, 1.0);
  CHECK(generic.classification() == InvariantClass::generic);
  CHECK(generic.delta() == doctest::Approx(64.0 - 27.0));

  CHECK_NOTHROW(WeierstrassInvariants(4.0, 1.0, 37.0));
  CHECK_THROWS_AS(WeierstrassInvariants(4.0, 1.0, 36.0), DomainError);
  CHECK(std::string(to_string(InvariantClass::degenerate)) == "degenerate");
}

TEST_CASE("cubic_roots: degenerate cases agree with synthetic division") {
  const auto zero = cubic_roots(WeierstrassInvariants(0.0, 0.0));
  for (const auto& e : zero) CHECK(std::abs(e) == 0.0);

  // 4t^3 - (4/3) t + 8/27 has the double root 1/3.
  const auto f1 = oracle::synthetic_division(4.0 / 3.0, -8.0 / 27.0, 1.0 / 3.0);
  CHECK(f1.remainder == doctest::Approx(0.0));
  const auto r1 = cubic_roots(WeierstrassInvariants(4.0 / 3.0, -8.0 / 27.0));
  CHECK(r1[0].real() == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  CHECK(r1[1].real() == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  CHECK(r1[2].real() == doctest::Approx(f1.q2.real()).epsilon(1e-12));
  CHECK(r1[2].real() == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));

  const auto f2 = oracle::synthetic_division(16.0 / 3.0, -64.0 / 27.0, 2.0 / 3.0);
  CHECK(f2.remainder == doctest::Approx(0.0));
  const auto r2 = cubic_roots(WeierstrassInvariants(16.0 / 3.0, -64.0 / 27.0));
  CHECK(r2[0].real() == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
  CHECK(r2[2].real() == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));

  // Opposite sign of g3 mirrors the roots.
  const auto r3 = cubic_roots(WeierstrassInvariants(4.0 / 3.0, 8.0 / 27.0));
  CHECK(r3[0].real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r3[2].real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("cubic_roots reconstruct g2, g3 and sum to zero") {
  for (auto [g2, g3] : {std::pair{4.0, 1.0}, {4.0, -1.0}, {1.0, 2.0}, {-3.0, 0.5}, {7.0, 0.0}}) {
    const auto e = cubic_roots(WeierstrassInvariants(g2, g3));
    CHECK(std::abs(e[0] + e[1] + e[2]) <= 1e-12);
    CHECK(std::abs(-4.0 * (e[0] * e[1] + e[0] * e[2] + e[1] * e[2]) - g2) <= 1e-11);
    CHECK(std::abs(4.0 * e[0] * e[1] * e[2] - g3) <= 1e-11);
    for (const auto& r : e) CHECK(std::abs(4.0 * r * r * r - g2 * r - g3) <= 1e-12 * std::max(1.0, std::abs(g2)));
    CHECK(e[0].real() >= e[1].real());
    CHECK(e[1].real() >= e[2].real());
  }
}

TEST_CASE("weierstrass_p: trivial and degenerate closed forms") {
  CHECK(weierstrass_p(2.0, WeierstrassInvariants(0.0, 0.0)) == doctest::Approx(0.25).epsilon(1e-15));

  const WeierstrassInvariants ex2(4.0 / 3.0, -8.0 / 27.0);
  const double csch1 = 1.0 / std::sinh(1.0);
  CHECK(weierstrass_p(1.0, ex2) == doctest::Approx(1.0 / 3.0 + csch1 * csch1).epsilon(1e-14));
  CHECK(weierstrass_p(1.0, ex2) == doctest::Approx(1.057395).epsilon(1e-6));

  const WeierstrassInvariants ex1(16.0 / 3.0, -64.0 / 27.0);  // a = 1
  for (double z : {0.3, 0.8, 1.7, -2.2}) {
    const double c = 1.0 / std::sinh(std::sqrt(2.0) * z);
    CHECK(std::abs(weierstrass_p(z, ex1) - (2.0 / 3.0 + 2.0 * c * c)) <= 1e-10 * (1.0 + 2.0 * c * c));
  }
}

TEST_CASE("weierstrass_p satisfies its differential equation in every class") {
  const WeierstrassInvariants classes[] = {
      {0.0, 0.0}, {4.0 / 3.0, -8.0 / 27.0}, {4.0 / 3.0, 8.0 / 27.0}, {4.0, 1.0}, {4.0, -1.0}, {1.0, 2.0}};
  for (const auto& inv : classes) {
    const auto p = [&](double z) { return weierstrass_p(z, inv); };
    const double spacing = real_pole_spacing(inv);
    double worst = 0.0;
    for (double z = 0.05; z < 3.0; z += 0.0137) {
      if (std::isfinite(spacing)) {
        const double d = std::abs(z - spacing * std::nearbyint(z / spacing));
        if (d < 0.05) continue;
      }
      const double w = p(z);
      const double dp = oracle::d1(p, z, 1e-4);
      const double scale = std::max(1.0, 4.0 * std::abs(w * w * w));
      worst = std::max(worst, std::abs(dp * dp - (4.0 * w * w * w - inv.g2() * w - inv.g3())) / scale);
    }
    CAPTURE(inv.g2());
    CAPTURE(inv.g3());
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("weierstrass_p is even and periodic along the real line") {
  const WeierstrassInvariants inv(4.0, -1.0);
  const double spacing = real_pole_spacing(inv);
  REQUIRE(std::isfinite(spacing));
  for (double z : {0.3, 0.7, 1.1}) {
    CHECK(weierstrass_p(-z, inv) == doctest::Approx(weierstrass_p(z, inv)).epsilon(1e-12));
    CHECK(weierstrass_p(z + spacing, inv) == doctest::Approx(weierstrass_p(z, inv)).epsilon(1e-10));
  }
}

TEST_CASE("weierstrass_p refuses to evaluate at a pole") {
  CHECK_THROWS_AS(weierstrass_p(0.0, WeierstrassInvariants(0.0, 0.0)), PoleError);
  CHECK_THROWS_AS(weierstrass_p(1e-9, WeierstrassInvariants(4.0 / 3.0, -8.0 / 27.0)), PoleError);
  const WeierstrassInvariants inv(4.0, 1.0);
  CHECK_THROWS_AS(weierstrass_p(real_pole_spacing(inv), inv), PoleError);
  CHECK(std::isinf(real_pole_spacing(WeierstrassInvariants(4.0 / 3.0, -8.0 / 27.0))));
}
