#pragma once

// Special functions needed by the soliton families: the imaginary error
// function, Jacobi elliptic functions and the Weierstrass P function on the
// real line.
//
// Elliptic convention: every `k` below is the elliptic MODULUS, so that
// dn^2 + k^2 sn^2 = 1.  The parameter is m = k^2.

#include <array>
#include <complex>

namespace cqnls::specfun {

/// Largest |x| accepted by erfi(); erfi(26.64) already overflows a double.
inline constexpr double kErfiMaxArgument = 26.0;

/// Radius around a real lattice pole of wp inside which evaluation is refused.
inline constexpr double kPoleExclusionRadius = 1e-8;

/// Erfi(x) = (2/sqrt(pi)) int_0^x exp(s^2) ds.  Throws DomainError for
/// non-finite x or |x| > kErfiMaxArgument.
double erfi(double x);

/// Dawson's integral F(x) = exp(-x^2) int_0^x exp(s^2) ds.
double dawson(double x);

struct JacobiElliptic {
  double sn;
  double cn;
  double dn;
};

/// sn, cn, dn of (u | modulus k) by the descending Landen (AGM) recursion.
/// Throws DomainError unless 0 <= k <= 1.
JacobiElliptic jacobi_elliptic(double u, double k);

double jacobi_sn(double u, double k);
double jacobi_cn(double u, double k);
double jacobi_dn(double u, double k);

/// Complete elliptic integral of the first kind K(k), modulus convention.
/// Returns +inf for k == 1.
double elliptic_k(double k);

enum class InvariantClass { generic, degenerate, trivial };

const char* to_string(InvariantClass c);

/// Weierstrass invariants (g2, g3) with discriminant g2^3 - 27 g3^2.
class WeierstrassInvariants {
 public:
  WeierstrassInvariants(double g2, double g3);
  /// Checks that `delta` agrees with g2^3 - 27 g3^2 to a few ulps of the
  /// larger term; throws DomainError otherwise.
  WeierstrassInvariants(double g2, double g3, double delta);

  double g2() const noexcept { return g2_; }
  double g3() const noexcept { return g3_; }
  double delta() const noexcept { return delta_; }

  /// trivial iff g2 == g3 == 0; degenerate iff |delta| is at rounding level
  /// relative to g2^3 and 27 g3^2.
  InvariantClass classification() const noexcept;

 private:
  double g2_;
  double g3_;
  double delta_;
};

/// Roots of 4t^3 - g2 t - g3 sorted by descending real part.  For delta < 0
/// the conjugate pair is returned with e1.imag() > 0.
std::array<std::complex<double>, 3> cubic_roots(const WeierstrassInvariants& inv);

/// wp(zeta; g2, g3) for real zeta on the real period line.
/// Throws PoleError within kPoleExclusionRadius of a pole.
double weierstrass_p(double zeta, const WeierstrassInvariants& inv);

/// Distance between consecutive real poles of wp (twice the real half
/// period), or +inf when the only real pole is zeta = 0.
double real_pole_spacing(const WeierstrassInvariants& inv);

}  // namespace cqnls::specfun
