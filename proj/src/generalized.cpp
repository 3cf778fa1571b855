#include "cqnls/generalized.hpp"

#include <cmath>
#include <sstream>

#include "cqnls/errors.hpp"
#include "cqnls/specfun.hpp"

namespace cqnls::generalized {

void SineGordonParams::validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "sine-Gordon constant b must be positive, got " << b;
    throw DomainError(msg.str());
  }
  if (!(nu >= 0.0 && nu <= 1.0)) {
    std::ostringstream msg;
    msg << "snoidal modulus nu must lie in [0, 1], got " << nu;
    throw DomainError(msg.str());
  }
}

double sg_series_constant(int n, double b) {
  if (n < 0) throw DomainError("sg_series_constant: n must be non-negative");
  double factorial = 1.0;
  for (int i = 2; i <= 2 * n + 1; ++i) factorial *= i;
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  return sign * std::pow(b, 2 * n - 1) / factorial;
}

double sg_series_coefficient(int n, double xi, double t, const transform::ProfileMap& prof,
                             const transform::Modulation& mod, const SineGordonParams& sg) {
  sg.validate();
  prof.require(xi);
  return sg_series_constant(n, sg.b) * std::pow(mod.gamma(t), 2 - n) *
         std::pow(prof.Fp(xi), n + 2);
}

std::complex<double> sg_closed_form_nonlinearity(std::complex<double> psi, double xi, double t,
                                                 const transform::ProfileMap& prof,
                                                 const transform::Modulation& mod,
                                                 const SineGordonParams& sg) {
  sg.validate();
  prof.require(xi);
  const double modulus = std::abs(psi);
  if (modulus == 0.0) return 0.0;
  const double g = mod.gamma(t);
  const double fp = prof.Fp(xi);
  const double s = sg.b * std::sqrt(fp / g) * modulus;
  return g * g * std::sqrt(g) * fp * std::sqrt(fp) / (sg.b * sg.b) * std::sin(s) * psi / modulus;
}

double sg_stationary_phi(double zeta, const SineGordonParams& sg) {
  sg.validate();
  const double u = zeta / std::sqrt(sg.b);
  if (sg.nu == 1.0) return 4.0 / sg.b * std::atan(std::exp(-u));
  return 2.0 / sg.b * std::acos(sg.nu * specfun::jacobi_sn(u, sg.nu));
}

double sg_amplitude(double x, double t, const transform::ProfileMap& prof,
                    const transform::Modulation& mod, const SineGordonParams& sg) {
  sg.validate();
  const double g = mod.gamma(t);
  const double xi = g * x + mod.delta(t);
  prof.require(xi);
  const double arc = std::acos(sg.nu * specfun::jacobi_sn(prof.F(xi) / std::sqrt(sg.b), sg.nu));
  return 4.0 * g * arc * arc / (sg.b * sg.b * prof.Fp(xi));
}

transform::LabCoefficients sg_lab_coefficients(const transform::Modulation& mod,
                                               const transform::ProfileMap& prof,
                                               const SineGordonParams& sg, double E,
                                               int n_terms) {
  sg.validate();
  std::vector<transform::NonlinearTerm> terms;
  for (int n = 0; n < n_terms; ++n) {
    terms.push_back({n, sg_series_constant(n, sg.b), 2.0 - n, n + 2.0});
  }
  return transform::LabCoefficients(mod, prof, 0.0, E, std::move(terms));
}

double sg_hamiltonian(const pde::ComplexField& field, const transform::LabCoefficients& coeffs,
                      const SineGordonParams& sg) {
  sg.validate();
  const std::size_t nx = field.values.size();
  if (nx < 5 || nx != field.grid.nx) throw GridMismatch("sg_hamiltonian: field/grid size mismatch");
  const double dx = field.grid.dx;
  const double t = field.t;
  const auto xs = field.grid.xs();
  const std::vector<double> zero(nx, 0.0);
  std::vector<double> v(nx);
  coeffs.local_rate(t, xs, zero, v);

  const auto& mod = coeffs.modulation();
  const auto& prof = coeffs.profile();
  const double g = mod.gamma(t);
  const double d = mod.delta(t);
  const auto& psi = field.values;
  auto at = [&](std::ptrdiff_t j) {
    const auto n = static_cast<std::ptrdiff_t>(nx);
    return psi[static_cast<std::size_t>(((j % n) + n) % n)];
  };
  double sum = 0.0;
  for (std::size_t j = 0; j < nx; ++j) {
    const auto i = static_cast<std::ptrdiff_t>(j);
    const std::complex<double> dzz =
        (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * psi[j] + 16.0 * at(i + 1) - at(i + 2)) /
        (12.0 * dx * dx);
    const double kinetic = std::real(std::conj(psi[j]) * (-dzz + v[j] * psi[j]));
    const double xi = g * xs[j] + d;
    prof.require(xi);
    const double fp = prof.Fp(xi);
    const double s = sg.b * std::sqrt(fp / g) * std::abs(psi[j]);
    const double value = kinetic - 2.0 / (sg.b * sg.b * sg.b) * g * g * g * fp * std::cos(s);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "sg_hamiltonian: non-finite integrand at x = " << xs[j];
      throw DomainError(msg.str());
    }
    sum += value;
  }
  return sum * dx;
}

}  // namespace cqnls::generalized
