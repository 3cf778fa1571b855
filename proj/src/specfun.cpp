#include "cqnls/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cqnls/errors.hpp"

namespace cqnls::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;

// Maclaurin sum of int_0^x exp(s^2) ds; every term has the sign of x.
double erfi_series(double x) {
  const double x2 = x * x;
  double power = x;  // x^(2n+1) / n!
  double sum = x;
  for (int n = 1; n < 2000; ++n) {
    power *= x2 / n;
    const double term = power / (2 * n + 1);
    sum += term;
    if (std::abs(term) <= 0.25 * kEps * std::abs(sum)) break;
  }
  return sum;
}

// Asymptotic expansion F(x) ~ 1/(2x) sum (2n-1)!!/(2x^2)^n, truncated at the
// smallest term.  Only used for |x| > 6 where that term is below 1e-16.
double dawson_asymptotic(double x) {
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 200; ++n) {
    const double next = term * (2 * n - 1) * inv2x2;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term <= 0.25 * kEps * sum) break;
  }
  return sum / (2.0 * x);
}

void require_modulus(double k) {
  if (!(k >= 0.0 && k <= 1.0)) {
    std::ostringstream msg;
    msg << "elliptic modulus k=" << k << " outside [0, 1]";
    throw DomainError(msg.str());
  }
}

double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > kEps * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return 0.5 * (a + b);
}

double distance_to_pole(double zeta, double spacing) {
  if (!std::isfinite(spacing)) return std::abs(zeta);
  return std::abs(zeta - spacing * std::nearbyint(zeta / spacing));
}

void require_off_pole(double zeta, double spacing) {
  if (distance_to_pole(zeta, spacing) < kPoleExclusionRadius) {
    std::ostringstream msg;
    msg << "weierstrass_p: zeta=" << zeta << " is within "
        << kPoleExclusionRadius << " of a lattice pole";
    throw PoleError(msg.str());
  }
}

struct Degenerate {
  double double_root;
  double simple_root;
};

// Double-root factorization 4t^3 - g2 t - g3 = 4 (t - d)^2 (t + 2d) with
// g2 = 12 d^2, g3 = -8 d^3.
Degenerate degenerate_roots(const WeierstrassInvariants& inv) {
  const double d = -1.5 * inv.g3() / inv.g2();
  return {d, -2.0 * d};
}

double newton_polish(double t, double g2, double g3) {
  for (int i = 0; i < 4; ++i) {
    const double f = (4.0 * t * t - g2) * t - g3;
    const double fp = 12.0 * t * t - g2;
    if (fp == 0.0) break;
    const double step = f / fp;
    t -= step;
    if (std::abs(step) <= kEps * std::abs(t)) break;
  }
  return t;
}

}  // namespace

double erfi(double x) {
  if (!std::isfinite(x) || std::abs(x) > kErfiMaxArgument) {
    std::ostringstream msg;
    msg << "erfi: argument " << x << " outside |x| <= " << kErfiMaxArgument;
    throw DomainError(msg.str());
  }
  const double ax = std::abs(x);
  if (ax <= 6.0) return kTwoOverSqrtPi * erfi_series(x);
  const double value = kTwoOverSqrtPi * std::exp(ax * ax) * dawson_asymptotic(ax);
  return std::copysign(value, x);
}

double dawson(double x) {
  const double ax = std::abs(x);
  if (ax > 6.0) return std::copysign(dawson_asymptotic(ax), x);
  return std::exp(-x * x) * erfi_series(x);
}

JacobiElliptic jacobi_elliptic(double u, double k) {
  require_modulus(k);
  if (k == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (k == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  const double kc = std::sqrt((1.0 - k) * (1.0 + k));
  // Reduce to one real period 4K when that helps.
  const double quarter = elliptic_k(k);
  if (std::abs(u) > 4.0 * quarter) {
    u -= 4.0 * quarter * std::nearbyint(u / (4.0 * quarter));
  }

  std::array<double, 32> a{};
  std::array<double, 32> c{};
  a[0] = 1.0;
  c[0] = k;
  double b = kc;
  int n = 0;
  while (std::abs(c[n]) > kEps * a[n] && n < 30) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  if (n == 0) {
    const double s = std::sin(u);
    return {s, std::cos(u), std::sqrt(1.0 - k * k * s * s)};
  }

  double phi = std::ldexp(a[n] * u, n);
  for (int j = n; j >= 1; --j) {
    phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = std::sqrt((1.0 - k * sn) * (1.0 + k * sn));
  return {sn, cn, dn};
}

double jacobi_sn(double u, double k) { return jacobi_elliptic(u, k).sn; }
double jacobi_cn(double u, double k) { return jacobi_elliptic(u, k).cn; }
double jacobi_dn(double u, double k) { return jacobi_elliptic(u, k).dn; }

double elliptic_k(double k) {
  require_modulus(k);
  if (k == 1.0) return std::numeric_limits<double>::infinity();
  const double kc = std::sqrt((1.0 - k) * (1.0 + k));
  return 0.5 * std::numbers::pi / agm(1.0, kc);
}

const char* to_string(InvariantClass c) {
  switch (c) {
    case InvariantClass::generic:
      return "generic";
    case InvariantClass::degenerate:
      return "degenerate";
    case InvariantClass::trivial:
      return "trivial";
  }
  return "unknown";
}

WeierstrassInvariants::WeierstrassInvariants(double g2, double g3)
    : g2_(g2), g3_(g3), delta_(g2 * g2 * g2 - 27.0 * g3 * g3) {
  if (!std::isfinite(g2) || !std::isfinite(g3)) {
    throw DomainError("Weierstrass invariants must be finite");
  }
}

WeierstrassInvariants::WeierstrassInvariants(double g2, double g3, double delta)
    : WeierstrassInvariants(g2, g3) {
  const double scale = std::abs(g2 * g2 * g2) + 27.0 * g3 * g3;
  if (std::abs(delta - delta_) > 8.0 * kEps * scale) {
    std::ostringstream msg;
    msg << "stored discriminant " << delta << " disagrees with g2^3-27g3^2 = " << delta_;
    throw DomainError(msg.str());
  }
}

InvariantClass WeierstrassInvariants::classification() const noexcept {
  if (g2_ == 0.0 && g3_ == 0.0) return InvariantClass::trivial;
  const double scale = std::abs(g2_ * g2_ * g2_) + 27.0 * g3_ * g3_;
  if (std::abs(delta_) <= 64.0 * kEps * scale) return InvariantClass::degenerate;
  return InvariantClass::generic;
}

std::array<std::complex<double>, 3> cubic_roots(const WeierstrassInvariants& inv) {
  using C = std::complex<double>;
  const double g2 = inv.g2();
  const double g3 = inv.g3();
  std::array<C, 3> roots{};

  switch (inv.classification()) {
    case InvariantClass::trivial:
      return {C{0.0}, C{0.0}, C{0.0}};
    case InvariantClass::degenerate: {
      const auto [d, s] = degenerate_roots(inv);
      roots = {C{d}, C{d}, C{s}};
      break;
    }
    case InvariantClass::generic:
      if (inv.delta() > 0.0) {
        // Three real roots: t = 2 sqrt(g2/12) cos(theta/3 - 2 pi j/3).
        const double amp = std::sqrt(g2 / 12.0);
        const double arg = std::clamp(g3 / (8.0 * amp * amp * amp), -1.0, 1.0);
        const double theta = std::acos(arg);
        for (int j = 0; j < 3; ++j) {
          const double t = 2.0 * amp * std::cos((theta - 2.0 * std::numbers::pi * j) / 3.0);
          roots[j] = C{newton_polish(t, g2, g3)};
        }
      } else {
        // One real root by Cardano on t^3 + p t + q with p = -g2/4, q = -g3/4.
        const double p = -0.25 * g2;
        const double q = -0.25 * g3;
        const double disc = 0.25 * q * q + p * p * p / 27.0;
        const double half = -0.5 * q;
        const double u = std::cbrt(half + std::copysign(std::sqrt(disc), half == 0.0 ? 1.0 : half));
        double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        t = newton_polish(t, g2, g3);
        // Remaining pair: sum -t, product -g2/4 + t^2.
        const double im = std::sqrt(std::max(0.0, 0.75 * t * t - 0.25 * g2));
        roots = {C{-0.5 * t, im}, C{t, 0.0}, C{-0.5 * t, -im}};
      }
      break;
  }
  std::sort(roots.begin(), roots.end(), [](const C& a, const C& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return roots;
}

namespace {

// Jacobi representation of a generic wp on the real line.
//   delta > 0: wp = base + scale / sn^2(rate zeta | k)
//   delta < 0: wp = base + scale (1 + cn(rate zeta | k))^2 / sn^2(rate zeta | k)
// (the second is e2 + H (1+cn)/(1-cn) with 1-cn = sn^2/(1+cn)).
struct GenericForm {
  bool positive_delta;
  double base;
  double scale;
  double rate;
  double k;
  double pole_spacing;
};

GenericForm generic_form(const WeierstrassInvariants& inv) {
  const auto r = cubic_roots(inv);
  GenericForm f{};
  f.positive_delta = inv.delta() > 0.0;
  if (f.positive_delta) {
    const double e1 = r[0].real();
    const double e2 = r[1].real();
    const double e3 = r[2].real();
    f.base = e3;
    f.scale = e1 - e3;
    f.rate = std::sqrt(e1 - e3);
    f.k = std::sqrt(std::clamp((e2 - e3) / (e1 - e3), 0.0, 1.0));
    f.pole_spacing = 2.0 * elliptic_k(f.k) / f.rate;
  } else {
    const auto real_root = std::find_if(r.begin(), r.end(), [](const auto& e) { return e.imag() == 0.0; });
    const auto complex_root = std::find_if(r.begin(), r.end(), [](const auto& e) { return e.imag() != 0.0; });
    const double e2 = real_root->real();
    const double h = std::abs(*complex_root - e2);
    f.base = e2;
    f.scale = h;
    f.rate = 2.0 * std::sqrt(h);
    f.k = std::sqrt(std::clamp(0.5 - 0.75 * e2 / h, 0.0, 1.0));
    f.pole_spacing = 4.0 * elliptic_k(f.k) / f.rate;
  }
  return f;
}

}  // namespace

double real_pole_spacing(const WeierstrassInvariants& inv) {
  switch (inv.classification()) {
    case InvariantClass::trivial:
      return std::numeric_limits<double>::infinity();
    case InvariantClass::degenerate: {
      const auto [d, s] = degenerate_roots(inv);
      if (d > s) return std::numeric_limits<double>::infinity();
      return std::numbers::pi / std::sqrt(s - d);
    }
    case InvariantClass::generic:
      break;
  }
  return generic_form(inv).pole_spacing;
}

double weierstrass_p(double zeta, const WeierstrassInvariants& inv) {
  if (!std::isfinite(zeta)) throw DomainError("weierstrass_p: non-finite argument");
  switch (inv.classification()) {
    case InvariantClass::trivial:
      require_off_pole(zeta, std::numeric_limits<double>::infinity());
      return 1.0 / (zeta * zeta);
    case InvariantClass::degenerate: {
      const auto [d, s] = degenerate_roots(inv);
      if (d > s) {
        // wp = d + c csch^2(sqrt(c) zeta), c = d - s
        const double c = d - s;
        require_off_pole(zeta, std::numeric_limits<double>::infinity());
        const double sh = std::sinh(std::sqrt(c) * zeta);
        return d + c / (sh * sh);
      }
      // wp = d + c csc^2(sqrt(c) zeta), c = s - d
      const double c = s - d;
      require_off_pole(zeta, std::numbers::pi / std::sqrt(c));
      const double sn = std::sin(std::sqrt(c) * zeta);
      return d + c / (sn * sn);
    }
    case InvariantClass::generic:
      break;
  }
  const GenericForm f = generic_form(inv);
  require_off_pole(zeta, f.pole_spacing);
  const JacobiElliptic j = jacobi_elliptic(f.rate * zeta, f.k);
  const double s2 = j.sn * j.sn;
  if (f.positive_delta) return f.base + f.scale / s2;
  const double num = 1.0 + j.cn;
  return f.base + f.scale * num * num / s2;
}

}  // namespace cqnls::specfun
