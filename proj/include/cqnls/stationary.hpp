#pragma once

// Real solutions Phi(zeta) of the constant-coefficient stationary
// cubic-quintic equation
//
//   Phi'' = -mu Phi + G3 Phi^3 + G5 Phi^5,
//
// through its first integral (Phi')^2 = eps - mu Phi^2 + G3/2 Phi^4 + G5/3 Phi^6
// and the Weierstrass mapping.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqnls/specfun.hpp"

namespace cqnls::stationary {

enum class BetaBranch { plus, minus };

/// Solution category, fixed by (eps, mu).
enum class Category {
  elliptic,     ///< eps != 0
  degenerate,   ///< eps == 0, mu != 0
  algebraic,    ///< eps == 0, mu == 0
};

struct CQParameters {
  double mu = 0.0;   ///< chemical potential
  double g3c = 0.0;  ///< cubic coupling G3
  double g5c = 0.0;  ///< quintic coupling G5
  double eps = 0.0;  ///< first-integral constant
  BetaBranch beta_branch = BetaBranch::plus;

  Category category() const noexcept;

  /// beta = +-sqrt(G3^2/4 + 4 mu G5 / 3).  Throws DomainError when the
  /// radicand is negative.
  double beta() const;
};

specfun::WeierstrassInvariants weierstrass_invariants(const CQParameters& p);

/// The discriminant of the elliptic category written out in the couplings:
/// -4 eps^2/3 (6 eps G3^3 + 36 eps^2 G5^2 + 36 G3 G5 eps mu - 3 mu^2 G3^2 - 16 mu^3 G5).
double elliptic_category_discriminant(const CQParameters& p);

/// Phi(zeta) by the category formula.  In the elliptic category the square
/// root changes sign across every real pole of wp, so odd kinks come out
/// with their sign.
double phi(double zeta, const CQParameters& p);

/// (dPhi)^2 - [eps - mu Phi^2 + G3/2 Phi^4 + G5/3 Phi^6].
double first_integral_residual(double phi_val, double dphi_val, const CQParameters& p);

/// Phi'' - (-mu Phi + G3 Phi^3 + G5 Phi^5).
double field_equation_residual(double phi_val, double d2phi_val, const CQParameters& p);

struct EffectivePotential {
  CQParameters params;
  double c = 0.0;  ///< additive constant

  /// U(Phi) = (1/2)(-mu Phi^2 + G3/2 Phi^4 + G5/3 Phi^6 + c)
  double value(double phi_val) const noexcept;
  double derivative(double phi_val) const noexcept;
  double second_derivative(double phi_val) const noexcept;
};

double effective_potential_value(double phi_val, const EffectivePotential& u);

/// All strict local minima of U, ascending.
std::vector<double> local_minima(const EffectivePotential& u);

/// Local minima sharing the lowest value of U (relative tolerance 1e-12).
std::vector<double> minima(const EffectivePotential& u);

/// Distance between the outermost crossings of `level` by the sampled
/// profile, linearly interpolated.  Throws NotFoundError if never crossed.
double half_level_width(std::span<const double> zeta, std::span<const double> profile,
                        double level);

/// Samples `profile` on `zeta` and measures the width as above.
double half_level_width(const std::function<double(double)>& profile,
                        std::span<const double> zeta, double level);

/// A closed-form solution together with the parameters it solves.
struct NamedSolution {
  std::string id;
  CQParameters params;
  std::function<double(double)> phi;
  bool dark = false;  ///< plateau at infinity (true) or decaying/periodic (false)
};

/// Closed form of the wide dark family, Phi = a tanh(s zeta)/sqrt(sech^2(s zeta) + a^2),
/// s = sqrt(1 + a^2).  No regime check.
double wide_dark_profile(double a, double zeta);

/// Couplings of the wide dark family: mu = 2a^2 - 1, G3 = 2(a^2 - 2), G5 = 3,
/// eps = a^2.
CQParameters wide_dark_parameters(double a);

/// Requires 0 < a^2 < 1/2.
NamedSolution wide_dark(double a);

/// Requires lambda^2 < 1 and g3c < 0; G5 = 3 (1 - lambda^4) G3^2 / (16 |mu|).
NamedSolution wide_bright(double lambda, double mu_mag, double g3c);
inline NamedSolution wide_bright(double lambda, double mu_mag) {
  return wide_bright(lambda, mu_mag, -mu_mag);
}

NamedSolution thin_bright();
NamedSolution periodic_1();
NamedSolution periodic_2();
NamedSolution kink_example3();

/// Phi = (1 + zeta^2)^(-1/2) with mu = 0, G3 = 2, G5 = -3, eps = 0.
NamedSolution algebraic_bright();

/// Phi = zeta/sqrt(1 + zeta^2) with mu = 3, G3 = 6, G5 = -3, eps = 1.
NamedSolution algebraic_dark();

/// Builds a solution by id; `param` supplies named scalars (a, lambda,
/// mu_mag, G3).  Throws DomainError for unknown ids or bad parameters.
NamedSolution named_solution(std::string_view id,
                             const std::function<double(std::string_view, double)>& param);

}  // namespace cqnls::stationary
