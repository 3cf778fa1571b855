#pragma once

// Sine-Gordon branch: a lab-frame equation with the non-polynomial
// nonlinearity
//
//   N(Psi) = gamma^(5/2) F'^(3/2) b^-2 sin(b sqrt(F'/gamma) |Psi|) Psi/|Psi|
//          = sum_n c_n gamma^(2-n) F'^(n+2) |Psi|^(2n) Psi,
//   c_n = (-1)^n b^(2n-1) / (2n+1)!,
//
// maps onto the static sine-Gordon equation Phi'' = sin(b Phi)/b^2.

#include <complex>

#include "cqnls/pde.hpp"
#include "cqnls/transform.hpp"

namespace cqnls::generalized {

struct SineGordonParams {
  double b = 1.0;   ///< sine-Gordon constant, b > 0
  double nu = 1.0;  ///< elliptic modulus of the snoidal profile, 0 <= nu <= 1

  /// Throws DomainError when b <= 0 or nu is outside [0, 1].
  void validate() const;
};

/// c_n = (-1)^n b^(2n-1) / (2n+1)!.
double sg_series_constant(int n, double b);

/// c_n gamma^(2-n) F'(xi)^(n+2), the coefficient of |Psi|^(2n) Psi.
double sg_series_coefficient(int n, double xi, double t, const transform::ProfileMap& prof,
                             const transform::Modulation& mod, const SineGordonParams& sg);

/// The summed nonlinearity N(Psi).  At Psi = 0 the limit is zero.
std::complex<double> sg_closed_form_nonlinearity(std::complex<double> psi, double xi, double t,
                                                 const transform::ProfileMap& prof,
                                                 const transform::Modulation& mod,
                                                 const SineGordonParams& sg);

/// Phi(zeta) = (2/b) arccos(nu sn(zeta/sqrt(b) | nu)).  For nu = 1 the kink
/// (4/b) atan(exp(-zeta/sqrt(b))) is used, which is the same function.
double sg_stationary_phi(double zeta, const SineGordonParams& sg);

/// |Psi|^2 = 4 gamma arccos^2(nu sn(F/sqrt(b) | nu)) / (b^2 F').
double sg_amplitude(double x, double t, const transform::ProfileMap& prof,
                    const transform::Modulation& mod, const SineGordonParams& sg);

/// Lab coefficients with V built from mu = 0 and the first `n_terms` series terms.
transform::LabCoefficients sg_lab_coefficients(const transform::Modulation& mod,
                                               const transform::ProfileMap& prof,
                                               const SineGordonParams& sg, double E,
                                               int n_terms = 12);

/// H = int { Psi* (-Psi_zz + v Psi) - (2/b^3) gamma^3 F' cos(b sqrt(F'/gamma) |Psi|) } dz
/// with a periodic 4th-order stencil and the trapezoid rule.  Its functional
/// derivative dH/dPsi* is -Psi_zz + v Psi + N(Psi).
double sg_hamiltonian(const pde::ComplexField& field, const transform::LabCoefficients& coeffs,
                      const SineGordonParams& sg);

}  // namespace cqnls::generalized
