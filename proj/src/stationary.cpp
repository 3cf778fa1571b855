#include "cqnls/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cqnls/errors.hpp"

namespace cqnls::stationary {
namespace {

[[noreturn]] void radicand_error(const char* what, double zeta, double radicand) {
  std::ostringstream msg;
  msg << what << ": negative radicand " << radicand << " at zeta=" << zeta;
  throw DomainError(msg.str());
}

double crossing(double z0, double z1, double p0, double p1, double level) {
  if (p1 == p0) return z0;
  return z0 + (level - p0) * (z1 - z0) / (p1 - p0);
}

bool crosses(double p0, double p1, double level) {
  return (p0 - level) * (p1 - level) < 0.0 || (p1 == level && p0 != level);
}

}  // namespace

Category CQParameters::category() const noexcept {
  if (eps != 0.0) return Category::elliptic;
  if (mu != 0.0) return Category::degenerate;
  return Category::algebraic;
}

double CQParameters::beta() const {
  const double radicand = 0.25 * g3c * g3c + 4.0 * mu * g5c / 3.0;
  if (radicand < 0.0) {
    std::ostringstream msg;
    msg << "beta is not real: G3^2/4 + 4 mu G5/3 = " << radicand << " < 0";
    throw DomainError(msg.str());
  }
  const double b = std::sqrt(radicand);
  return beta_branch == BetaBranch::plus ? b : -b;
}

specfun::WeierstrassInvariants weierstrass_invariants(const CQParameters& p) {
  switch (p.category()) {
    case Category::elliptic: {
      const double g2 = 4.0 / 3.0 * p.mu * p.mu - 2.0 * p.g3c * p.eps;
      const double g3 = 8.0 / 27.0 * p.mu * p.mu * p.mu - 2.0 / 3.0 * p.g3c * p.mu * p.eps -
                        4.0 / 3.0 * p.g5c * p.eps * p.eps;
      return {g2, g3};
    }
    case Category::degenerate:
      return {4.0 / 3.0 * p.mu * p.mu, 8.0 / 27.0 * p.mu * p.mu * p.mu};
    case Category::algebraic:
      break;
  }
  return {0.0, 0.0};
}

double elliptic_category_discriminant(const CQParameters& p) {
  const double e = p.eps;
  const double g3 = p.g3c;
  const double g5 = p.g5c;
  const double mu = p.mu;
  return -4.0 * e * e / 3.0 *
         (6.0 * e * g3 * g3 * g3 + 36.0 * e * e * g5 * g5 + 36.0 * g3 * g5 * e * mu -
          3.0 * mu * mu * g3 * g3 - 16.0 * mu * mu * mu * g5);
}

double phi(double zeta, const CQParameters& p) {
  switch (p.category()) {
    case Category::elliptic: {
      const auto inv = weierstrass_invariants(p);
      const double spacing = specfun::real_pole_spacing(inv);
      const double nearest = std::isfinite(spacing) ? spacing * std::nearbyint(zeta / spacing) : 0.0;
      // Phi -> 0 at a pole of wp.
      if (std::abs(zeta - nearest) < specfun::kPoleExclusionRadius) return 0.0;
      const double radicand = p.eps / (specfun::weierstrass_p(zeta, inv) + p.mu / 3.0);
      if (radicand < 0.0) radicand_error("phi (eps != 0)", zeta, radicand);
      double sign = 1.0;
      if (std::isfinite(spacing)) {
        if (static_cast<long long>(std::floor(zeta / spacing)) % 2 != 0) sign = -1.0;
      } else if (zeta < 0.0) {
        sign = -1.0;
      }
      return sign * std::sqrt(radicand);
    }
    case Category::degenerate: {
      const double beta = p.beta();
      const double offset = (p.g3c - 2.0 * beta) / (4.0 * p.mu);
      const auto inv = weierstrass_invariants(p);
      double pole_term = 0.0;
      try {
        pole_term = beta / (specfun::weierstrass_p(zeta, inv) + p.mu / 3.0);
      } catch (const PoleError&) {
        pole_term = 0.0;
      }
      const double radicand = offset + pole_term;
      if (!(radicand > 0.0)) radicand_error("phi (eps = 0, mu != 0)", zeta, radicand);
      return 1.0 / std::sqrt(radicand);
    }
    case Category::algebraic: {
      if (p.g3c == 0.0) throw DomainError("phi (eps = mu = 0): G3 must be nonzero");
      const double radicand = -2.0 * p.g5c / (3.0 * p.g3c) + 0.5 * p.g3c * zeta * zeta;
      if (!(radicand > 0.0)) radicand_error("phi (eps = mu = 0)", zeta, radicand);
      return 1.0 / std::sqrt(radicand);
    }
  }
  return 0.0;
}

double first_integral_residual(double phi_val, double dphi_val, const CQParameters& p) {
  const double f2 = phi_val * phi_val;
  const double rhs = p.eps + f2 * (-p.mu + f2 * (0.5 * p.g3c + f2 * p.g5c / 3.0));
  return dphi_val * dphi_val - rhs;
}

double field_equation_residual(double phi_val, double d2phi_val, const CQParameters& p) {
  const double f2 = phi_val * phi_val;
  return d2phi_val - phi_val * (-p.mu + f2 * (p.g3c + f2 * p.g5c));
}

double EffectivePotential::value(double f) const noexcept {
  const double f2 = f * f;
  return 0.5 * (f2 * (-params.mu + f2 * (0.5 * params.g3c + f2 * params.g5c / 3.0)) + c);
}

double EffectivePotential::derivative(double f) const noexcept {
  const double f2 = f * f;
  return f * (-params.mu + f2 * (params.g3c + f2 * params.g5c));
}

double EffectivePotential::second_derivative(double f) const noexcept {
  const double f2 = f * f;
  return -params.mu + f2 * (3.0 * params.g3c + 5.0 * f2 * params.g5c);
}

double effective_potential_value(double phi_val, const EffectivePotential& u) {
  return u.value(phi_val);
}

std::vector<double> local_minima(const EffectivePotential& u) {
  // dU/dPhi = Phi (-mu + G3 y + G5 y^2), y = Phi^2.
  const double a = u.params.g5c;
  const double b = u.params.g3c;
  const double c = -u.params.mu;
  std::vector<double> ys;
  if (a == 0.0) {
    if (b != 0.0) ys.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0.0 ? 1.0 : b));
      if (q != 0.0) {
        ys.push_back(q / a);
        ys.push_back(c / q);
      } else {
        ys.push_back(0.0);
      }
    }
  }

  std::vector<double> critical{0.0};
  for (double y : ys) {
    if (y > 0.0) {
      critical.push_back(std::sqrt(y));
      critical.push_back(-std::sqrt(y));
    }
  }
  std::vector<double> out;
  for (double f : critical) {
    if (u.second_derivative(f) > 0.0) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> minima(const EffectivePotential& u) {
  const auto local = local_minima(u);
  if (local.empty()) return local;
  double lowest = std::numeric_limits<double>::infinity();
  for (double f : local) lowest = std::min(lowest, u.value(f));
  const double tol = 1e-12 * std::max(1.0, std::abs(lowest));
  std::vector<double> out;
  for (double f : local) {
    if (u.value(f) - lowest <= tol) out.push_back(f);
  }
  return out;
}

double half_level_width(std::span<const double> zeta, std::span<const double> profile,
                        double level) {
  if (zeta.size() != profile.size() || zeta.size() < 2) {
    throw DomainError("half_level_width: need matching samples (at least two)");
  }
  const std::size_t n = zeta.size();
  std::size_t first = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (crosses(profile[i], profile[i + 1], level)) {
      first = i;
      break;
    }
  }
  if (first == n) {
    std::ostringstream msg;
    msg << "half_level_width: level " << level << " is never crossed";
    throw NotFoundError(msg.str());
  }
  std::size_t last = first;
  for (std::size_t i = n - 1; i > first; --i) {
    if (crosses(profile[i], profile[i - 1], level)) {
      last = i - 1;
      break;
    }
  }
  const double left = crossing(zeta[first], zeta[first + 1], profile[first], profile[first + 1], level);
  const double right = crossing(zeta[last], zeta[last + 1], profile[last], profile[last + 1], level);
  return right - left;
}

double half_level_width(const std::function<double(double)>& profile,
                        std::span<const double> zeta, double level) {
  std::vector<double> values(zeta.size());
  std::transform(zeta.begin(), zeta.end(), values.begin(), profile);
  return half_level_width(zeta, values, level);
}

double wide_dark_profile(double a, double zeta) {
  const double s = std::sqrt(1.0 + a * a) * zeta;
  const double sech = 1.0 / std::cosh(s);
  return a * std::tanh(s) / std::sqrt(sech * sech + a * a);
}

CQParameters wide_dark_parameters(double a) {
  const double a2 = a * a;
  return {2.0 * a2 - 1.0, 2.0 * (a2 - 2.0), 3.0, a2, BetaBranch::plus};
}

NamedSolution wide_dark(double a) {
  const double a2 = a * a;
  if (!(a2 > 0.0 && a2 < 0.5)) {
    std::ostringstream msg;
    msg << "wide_dark: dark-soliton regime requires 0 < a^2 < 1/2, got a^2 = " << a2;
    throw DomainError(msg.str());
  }
  return {"wide_dark", wide_dark_parameters(a), [a](double z) { return wide_dark_profile(a, z); },
          true};
}

NamedSolution wide_bright(double lambda, double mu_mag, double g3c) {
  const double l2 = lambda * lambda;
  if (!(l2 > 0.0 && l2 < 1.0)) {
    std::ostringstream msg;
    msg << "wide_bright: requires 0 < lambda^2 < 1, got " << l2;
    throw DomainError(msg.str());
  }
  if (!(mu_mag > 0.0)) throw DomainError("wide_bright: requires |mu| > 0");
  if (!(g3c < 0.0)) throw DomainError("wide_bright: requires G3 < 0");
  const double g5c = 3.0 * (1.0 - l2 * l2) * g3c * g3c / (16.0 * mu_mag);
  if (!(g5c < 3.0 * g3c * g3c / (16.0 * mu_mag))) {
    throw DomainError("wide_bright: requires G5 < 3 G3^2 / (16 |mu|)");
  }
  const double amp = 2.0 * std::sqrt(-mu_mag / g3c);
  const double rate = 2.0 * std::sqrt(mu_mag);
  return {"wide_bright",
          {-mu_mag, g3c, g5c, 0.0, BetaBranch::plus},
          [=](double z) { return amp / std::sqrt(l2 * std::cosh(rate * z) + 1.0); },
          false};
}

NamedSolution thin_bright() {
  return {"thin_bright",
          {-1.0, -1.0, 0.0, 0.0, BetaBranch::plus},
          [](double z) { return std::sqrt(2.0) / std::cosh(z); },
          false};
}

NamedSolution periodic_1() {
  const double r5 = std::sqrt(5.0);
  return {"periodic_1",
          {5.0, 10.0, -3.0, 0.0, BetaBranch::plus},
          [r5](double z) {
            const double s = std::sin(r5 * z);
            return std::sqrt(10.0) / std::sqrt((5.0 - r5) + 2.0 * r5 * s * s);
          },
          false};
}

NamedSolution periodic_2() {
  const double r5 = std::sqrt(5.0);
  return {"periodic_2",
          {5.0, 10.0, -3.0, 0.0, BetaBranch::minus},
          [r5](double z) {
            const double s = std::sin(r5 * z);
            return std::sqrt(10.0) / std::sqrt((5.0 + r5) - 2.0 * r5 * s * s);
          },
          false};
}

NamedSolution kink_example3() {
  const double r10 = std::sqrt(10.0);
  const double eps = 5.0 * (4.0 * r10 - 5.0) / 27.0;
  const double amp = std::sqrt((4.0 * r10 - 5.0) / 3.0);
  const double rate = std::sqrt(5.0 * (r10 - 2.0) / 3.0);
  return {"kink_example3",
          {5.0, 10.0, -3.0, eps, BetaBranch::plus},
          [=](double z) {
            const double sh = std::sinh(rate * z);
            return amp * sh / std::sqrt(3.0 * (r10 - 2.0) + (r10 + 1.0) * sh * sh);
          },
          true};
}

NamedSolution algebraic_bright() {
  return {"algebraic_bright",
          {0.0, 2.0, -3.0, 0.0, BetaBranch::plus},
          [](double z) { return 1.0 / std::sqrt(1.0 + z * z); },
          false};
}

NamedSolution algebraic_dark() {
  return {"algebraic_dark",
          {3.0, 6.0, -3.0, 1.0, BetaBranch::plus},
          [](double z) { return z / std::sqrt(1.0 + z * z); },
          true};
}

NamedSolution named_solution(std::string_view id,
                             const std::function<double(std::string_view, double)>& param) {
  if (id == "wide_dark") return wide_dark(param("a", 0.1));
  if (id == "wide_bright") {
    const double mu_mag = param("mu_mag", 4.0);
    return wide_bright(param("lambda", 0.5), mu_mag, param("G3", -mu_mag));
  }
  if (id == "thin_bright") return thin_bright();
  if (id == "periodic_1") return periodic_1();
  if (id == "periodic_2") return periodic_2();
  if (id == "kink_example3") return kink_example3();
  if (id == "algebraic_bright") return algebraic_bright();
  if (id == "algebraic_dark") return algebraic_dark();
  std::ostringstream msg;
  msg << "unknown stationary solution '" << id << "'";
  throw DomainError(msg.str());
}

}  // namespace cqnls::stationary
