#pragma once

// The point canonical transformation: from a time modulation (gamma, delta,
// a), a profile map xi -> F(xi) and a stationary solution Phi(zeta), build
// the lab-frame coefficients v, g3, g5 of
//
//   i Psi_t = -Psi_xx + v Psi + g3 |Psi|^2 Psi + g5 |Psi|^4 Psi
//
// and the lab-frame field Psi(x, t) = sqrt(gamma/F'(xi)) e^{-i eta} Phi(F(xi)),
// with xi = gamma(t) x + delta(t).

#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqnls/stationary.hpp"

namespace cqnls::transform {

using RealFunction = std::function<double(double)>;
using NamedParams = std::map<std::string, double, std::less<>>;

/// gamma(t), delta(t), the gauge a(t) and their derivatives.  Builtins code
/// the derivatives analytically; user modulations must supply them too.
struct Modulation {
  std::string name;
  RealFunction gamma, gamma_t, gamma_tt;
  RealFunction delta, delta_t, delta_tt;
  RealFunction a, a_t;
  /// Optional closed form of tau(t) = int_0^t gamma^2.  Empty means quadrature.
  RealFunction tau;
};

/// Compares the supplied derivatives of gamma, delta and a with 4th-order
/// finite differences at `samples` points of [t0, t1] (relative tolerance
/// 1e-6) and checks gamma > 0.  Throws DomainError on failure.
void validate_modulation(const Modulation& mod, double t0, double t1, int samples = 33);

Modulation constant_modulation();
Modulation breathing_modulation();
/// gamma = 1 + q^2, q = 1 + g1 sin t + g2 sin(sqrt(2) t).  Requires |g1|, |g2| <= 0.5.
Modulation quasiperiodic_modulation(double g1, double g2);

/// Names: constant, breathing, quasiperiodic (params gamma1, gamma2).
Modulation builtin_modulation(std::string_view name, const NamedParams& params = {});

/// Replaces the gauge a(t).
Modulation with_gauge(Modulation mod, RealFunction a, RealFunction a_t);

/// Gauge presets:
///   zero        a = 0
///   linear      a = rate * t                       (param: rate)
///   sinusoid    a = amplitude * sin(omega t)       (params: amplitude, omega)
///   cancel_f2   a_t = -(delta_t / 2 gamma)^2, so that f2 vanishes
///   erfi_bright a = (E - 1/(3 b^2)) tau(t)         (param: b)
Modulation apply_gauge_preset(Modulation mod, std::string_view preset,
                              const NamedParams& params, double E);

/// F(xi) and its first three derivatives on the open interval (lo, hi).
struct ProfileMap {
  std::string name;
  RealFunction F, Fp, Fpp, Fppp;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double xi) const noexcept { return xi > lo && xi < hi; }
  /// Throws DomainError when xi is outside (lo, hi).
  void require(double xi) const;
};

/// Finite-difference check of Fp, Fpp, Fppp against F (relative 1e-6) and
/// F' > 0 at `samples` points of [xi0, xi1].  Throws DomainError.
void validate_profile(const ProfileMap& prof, double xi0, double xi1, int samples = 33);

ProfileMap identity_profile();

/// F = sqrt(3 pi) b / (2 s) Erfi(xi / (sqrt(3) b)), s = g3c^(1/3).
/// Requires b > 0 and g3c > 0.
ProfileMap erfi_profile(double b, double g3c);

/// F' = g3c^(-1/3) sec^(2A/alpha)(alpha xi) on |alpha xi| < pi/2, with
/// F(0) = 0.  Requires A > 0, alpha > 0, g3c > 0.
ProfileMap scarf_profile(double A, double alpha, double g3c);

/// Repeats a profile defined on a bounded cell (lo, hi) with period hi - lo.
/// At the cell edges F' is +inf.
ProfileMap periodic_extension(const ProfileMap& cell);

/// Names: identity, erfi (params b, G3), scarf (params A, alpha, G3).
ProfileMap builtin_profile(std::string_view name, const NamedParams& params = {});

struct OscillatorCoefficients {
  double omega;
  double f1;
  double f2;
};

OscillatorCoefficients oscillator_coeffs(double t, const Modulation& mod);

/// V = W^2 - W' - mu F'^2 + E with W = F''/(2F').
double trap_V(double xi, const ProfileMap& prof, double mu, double E);

/// tau(t) = int_0^t gamma(s)^2 ds by composite Gauss-Legendre quadrature.
double tau_of_t(double t, const Modulation& mod);

/// eta = gamma_t/(4 gamma) x^2 + delta_t/(2 gamma) x - a(t) + E tau(t).
double phase_eta(double x, double t, const Modulation& mod, double E);

/// A term K * gamma^gamma_exponent * F'^fprime_exponent * |Psi|^(2 power) Psi.
struct NonlinearTerm {
  int power;
  double coupling;
  double gamma_exponent;
  double fprime_exponent;
};

/// Lab-frame coefficients of a transformed equation.  Immutable; all methods
/// are safe to call concurrently.
class LabCoefficients {
 public:
  LabCoefficients(Modulation mod, ProfileMap prof, double mu, double E,
                  std::vector<NonlinearTerm> terms);

  double xi(double x, double t) const;
  double v(double x, double t) const;
  /// Sum of the |Psi|^2 Psi couplings.
  double g3(double x, double t) const;
  /// Sum of the |Psi|^4 Psi couplings.
  double g5(double x, double t) const;
  double nonlinear_coefficient(std::size_t term, double x, double t) const;

  /// out[j] = v(xs[j], t) + sum_n coefficient_n(xs[j], t) abs2[j]^n.
  void local_rate(double t, std::span<const double> xs, std::span<const double> abs2,
                  std::span<double> out) const;

  const Modulation& modulation() const noexcept { return mod_; }
  const ProfileMap& profile() const noexcept { return prof_; }
  const std::vector<NonlinearTerm>& terms() const noexcept { return terms_; }
  double mu() const noexcept { return mu_; }
  double energy() const noexcept { return E_; }

 private:
  double power_sum(int power, double x, double t) const;

  Modulation mod_;
  ProfileMap prof_;
  double mu_;
  double E_;
  std::vector<NonlinearTerm> terms_;
};

/// g3 = G3 gamma F'^3, g5 = G5 F'^4, v with the given mu and E.
LabCoefficients lab_coefficients(const Modulation& mod, const ProfileMap& prof,
                                 const stationary::CQParameters& params, double E);

/// sqrt(gamma/F') e^{-i eta} Phi(F(xi)).  Throws DomainError outside the
/// profile domain or for non-finite Phi.
std::complex<double> assemble_psi(double x, double t, const Modulation& mod,
                                  const ProfileMap& prof, double E, const RealFunction& phi);

/// A lab-frame solution ready for sampling.  An optional mask zeroes the
/// field wherever it returns false.
class AnalyticSolution {
 public:
  using Mask = std::function<bool(double x, double t)>;

  AnalyticSolution(Modulation mod, ProfileMap prof, double E, RealFunction phi, Mask mask = {});

  std::complex<double> operator()(double x, double t) const;
  /// gamma Phi(F)^2 / F', computed without the phase.
  double modulus_squared(double x, double t) const;
  double phase(double x, double t) const;

  void sample(double t, std::span<const double> xs, std::span<std::complex<double>> out) const;
  void sample_modulus_squared(double t, std::span<const double> xs,
                              std::span<double> out) const;

  const Modulation& modulation() const noexcept { return mod_; }
  const ProfileMap& profile() const noexcept { return prof_; }

 private:
  bool masked_out(double x, double t) const { return mask_ && !mask_(x, t); }

  Modulation mod_;
  ProfileMap prof_;
  double E_;
  RealFunction phi_;
  Mask mask_;
};

}  // namespace cqnls::transform
