#include "cqnls/transform.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "cqnls/errors.hpp"
#include "cqnls/specfun.hpp"

namespace cqnls::transform {
namespace {

constexpr double kPanelLength = 0.125;

// int_0^t f(s) ds on panels of fixed length; smooth in t.
double integrate_from_zero(const RealFunction& f, double t) {
  if (t == 0.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(t) / kPanelLength)));
  const double h = t / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, i * h, (i + 1) * h);
  }
  return sum;
}

double fd_derivative(const RealFunction& f, double t, double h) {
  return (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h);
}

void check_derivative(const char* label, const RealFunction& f, const RealFunction& df, double t,
                      double h) {
  const double exact = df(t);
  const double fd = fd_derivative(f, t, h);
  if (!(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)))) {
    std::ostringstream msg;
    msg << label << " disagrees with finite differences at " << t << ": supplied " << exact
        << ", numerical " << fd;
    throw DomainError(msg.str());
  }
}

RealFunction constant_fn(double c) {
  return [c](double) { return c; };
}

double require_param(const NamedParams& params, std::string_view key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// sec^p integral on [0, u], cached on uniform nodes.
class ScarfIntegral {
 public:
  ScarfIntegral(double p) : p_(p), step_(0.5 * std::numbers::pi / kNodes), cumulative_(kNodes) {
    cumulative_[0] = 0.0;
    for (int j = 1; j < kNodes; ++j) {
      cumulative_[j] = cumulative_[j - 1] + segment((j - 1) * step_, j * step_);
    }
  }

  double operator()(double u) const {
    const double au = std::abs(u);
    const int j = std::min(kNodes - 1, static_cast<int>(au / step_));
    const double value = cumulative_[j] + segment(j * step_, au);
    return u < 0.0 ? -value : value;
  }

 private:
  static constexpr int kNodes = 512;

  // Subintervals never reach past half the remaining distance to pi/2.
  double segment(double a, double b) const {
    const double p = p_;
    auto integrand = [p](double s) { return std::pow(1.0 / std::cos(s), p); };
    const double pole = 0.5 * std::numbers::pi;
    double total = 0.0;
    for (int guard = 0; a < b && guard < 200; ++guard) {
      const double next = std::min(b, pole - 0.5 * (pole - a));
      total += boost::math::quadrature::gauss<double, 20>::integrate(integrand, a, next);
      a = next;
    }
    return total;
  }

  double p_;
  double step_;
  std::vector<double> cumulative_;
};

}  // namespace

void validate_modulation(const Modulation& mod, double t0, double t1, int samples) {
  const double h = 1e-3;
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? t0 : t0 + (t1 - t0) * i / (samples - 1);
    const double g = mod.gamma(t);
    if (!(g > 0.0) || !std::isfinite(g)) {
      std::ostringstream msg;
      msg << "modulation '" << mod.name << "': gamma(" << t << ") = " << g << " is not positive";
      throw DomainError(msg.str());
    }
    check_derivative("gamma_t", mod.gamma, mod.gamma_t, t, h);
    check_derivative("gamma_tt", mod.gamma_t, mod.gamma_tt, t, h);
    check_derivative("delta_t", mod.delta, mod.delta_t, t, h);
    check_derivative("delta_tt", mod.delta_t, mod.delta_tt, t, h);
    check_derivative("a_t", mod.a, mod.a_t, t, h);
  }
}

Modulation constant_modulation() {
  Modulation m;
  m.name = "constant";
  m.gamma = constant_fn(1.0);
  m.gamma_t = m.gamma_tt = constant_fn(0.0);
  m.delta = m.delta_t = m.delta_tt = constant_fn(0.0);
  m.a = m.a_t = constant_fn(0.0);
  m.tau = [](double t) { return t; };
  return m;
}

Modulation breathing_modulation() {
  Modulation m = constant_modulation();
  m.name = "breathing";
  m.tau = nullptr;
  m.gamma = [](double t) {
    const double c = std::cos(2.0 * t);
    return std::sqrt(2.0 / (1.0 + 3.0 * c * c));
  };
  m.gamma_t = [](double t) {
    const double c = std::cos(2.0 * t);
    const double s = std::sin(2.0 * t);
    const double d = 1.0 + 3.0 * c * c;
    return 6.0 * std::numbers::sqrt2 * c * s / (d * std::sqrt(d));
  };
  m.gamma_tt = [](double t) {
    const double c = std::cos(2.0 * t);
    const double s = std::sin(2.0 * t);
    const double d = 1.0 + 3.0 * c * c;
    const double d32 = d * std::sqrt(d);
    return 6.0 * std::numbers::sqrt2 *
           (2.0 * std::cos(4.0 * t) / d32 + 18.0 * c * c * s * s / (d32 * d));
  };
  return m;
}

Modulation quasiperiodic_modulation(double g1, double g2) {
  if (!std::isfinite(g1) || !std::isfinite(g2) || std::abs(g1) > 0.5 || std::abs(g2) > 0.5) {
    std::ostringstream msg;
    msg << "quasiperiodic modulation requires |gamma1|, |gamma2| <= 0.5, got " << g1 << ", "
        << g2;
    throw DomainError(msg.str());
  }
  const double r2 = std::numbers::sqrt2;
  auto q = [=](double t) { return 1.0 + g1 * std::sin(t) + g2 * std::sin(r2 * t); };
  auto qt = [=](double t) { return g1 * std::cos(t) + r2 * g2 * std::cos(r2 * t); };
  auto qtt = [=](double t) { return -g1 * std::sin(t) - 2.0 * g2 * std::sin(r2 * t); };
  Modulation m = constant_modulation();
  m.name = "quasiperiodic";
  m.tau = nullptr;
  m.gamma = [=](double t) {
    const double v = q(t);
    return 1.0 + v * v;
  };
  m.gamma_t = [=](double t) { return 2.0 * q(t) * qt(t); };
  m.gamma_tt = [=](double t) {
    const double d = qt(t);
    return 2.0 * d * d + 2.0 * q(t) * qtt(t);
  };
  return m;
}

Modulation builtin_modulation(std::string_view name, const NamedParams& params) {
  if (name == "constant") return constant_modulation();
  if (name == "breathing") return breathing_modulation();
  if (name == "quasiperiodic") {
    return quasiperiodic_modulation(require_param(params, "gamma1", 0.0),
                                    require_param(params, "gamma2", 0.1));
  }
  std::ostringstream msg;
  msg << "unknown modulation '" << name << "'";
  throw DomainError(msg.str());
}

Modulation with_gauge(Modulation mod, RealFunction a, RealFunction a_t) {
  mod.a = std::move(a);
  mod.a_t = std::move(a_t);
  return mod;
}

Modulation apply_gauge_preset(Modulation mod, std::string_view preset, const NamedParams& params,
                              double E) {
  if (preset == "zero") return with_gauge(std::move(mod), constant_fn(0.0), constant_fn(0.0));
  if (preset == "linear") {
    const double rate = require_param(params, "rate", 1.0);
    return with_gauge(std::move(mod), [rate](double t) { return rate * t; }, constant_fn(rate));
  }
  if (preset == "sinusoid") {
    const double amp = require_param(params, "amplitude", 1.0);
    const double om = require_param(params, "omega", 1.0);
    return with_gauge(
        std::move(mod), [=](double t) { return amp * std::sin(om * t); },
        [=](double t) { return amp * om * std::cos(om * t); });
  }
  if (preset == "cancel_f2") {
    auto gamma = mod.gamma;
    auto delta_t = mod.delta_t;
    RealFunction rate = [gamma, delta_t](double t) {
      const double w = delta_t(t) / (2.0 * gamma(t));
      return -w * w;
    };
    return with_gauge(std::move(mod), [rate](double t) { return integrate_from_zero(rate, t); },
                      rate);
  }
  if (preset == "erfi_bright") {
    const double b = require_param(params, "b", 10.0);
    if (!(b > 0.0)) throw DomainError("erfi_bright gauge requires b > 0");
    const double c = E - 1.0 / (3.0 * b * b);
    Modulation base;
    base.gamma = mod.gamma;
    base.tau = mod.tau;
    auto gamma = mod.gamma;
    return with_gauge(
        std::move(mod), [c, base](double t) { return c * tau_of_t(t, base); },
        [c, gamma](double t) {
          const double g = gamma(t);
          return c * g * g;
        });
  }
  std::ostringstream msg;
  msg << "unknown gauge preset '" << preset << "'";
  throw DomainError(msg.str());
}

void ProfileMap::require(double xi) const {
  if (!contains(xi)) {
    std::ostringstream msg;
    msg << "profile '" << name << "': xi = " << xi << " outside (" << lo << ", " << hi << ")";
    throw DomainError(msg.str());
  }
}

void validate_profile(const ProfileMap& prof, double xi0, double xi1, int samples) {
  const double h = 1e-3;
  for (int i = 0; i < samples; ++i) {
    const double xi = samples == 1 ? xi0 : xi0 + (xi1 - xi0) * i / (samples - 1);
    prof.require(xi - 2.0 * h);
    prof.require(xi + 2.0 * h);
    const double fp = prof.Fp(xi);
    if (!(fp > 0.0) || !std::isfinite(fp)) {
      std::ostringstream msg;
      msg << "profile '" << prof.name << "': F'(" << xi << ") = " << fp << " is not positive";
      throw DomainError(msg.str());
    }
    check_derivative("F'", prof.F, prof.Fp, xi, h);
    check_derivative("F''", prof.Fp, prof.Fpp, xi, h);
    check_derivative("F'''", prof.Fpp, prof.Fppp, xi, h);
  }
}

ProfileMap identity_profile() {
  ProfileMap p;
  p.name = "identity";
  p.F = [](double xi) { return xi; };
  p.Fp = constant_fn(1.0);
  p.Fpp = p.Fppp = constant_fn(0.0);
  return p;
}

ProfileMap erfi_profile(double b, double g3c) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("erfi profile requires b > 0");
  if (!(g3c > 0.0) || !std::isfinite(g3c)) throw DomainError("erfi profile requires G3 > 0");
  const double s = std::cbrt(g3c);
  const double width = std::sqrt(3.0) * b;
  const double pref = std::sqrt(3.0 * std::numbers::pi) * b / (2.0 * s);
  const double inv3b2 = 1.0 / (3.0 * b * b);
  ProfileMap p;
  p.name = "erfi";
  p.lo = -specfun::kErfiMaxArgument * width;
  p.hi = specfun::kErfiMaxArgument * width;
  p.F = [=](double xi) { return pref * specfun::erfi(xi / width); };
  p.Fp = [=](double xi) { return std::exp(xi * xi * inv3b2) / s; };
  p.Fpp = [=](double xi) { return std::exp(xi * xi * inv3b2) / s * 2.0 * xi * inv3b2; };
  p.Fppp = [=](double xi) {
    const double w = 2.0 * xi * inv3b2;
    return std::exp(xi * xi * inv3b2) / s * (w * w + 2.0 * inv3b2);
  };
  return p;
}

ProfileMap scarf_profile(double A, double alpha, double g3c) {
  if (!(A > 0.0) || !(alpha > 0.0)) throw DomainError("scarf profile requires A > 0, alpha > 0");
  if (!(g3c > 0.0) || !std::isfinite(g3c)) throw DomainError("scarf profile requires G3 > 0");
  const double p = 2.0 * A / alpha;
  const double pref = 1.0 / std::cbrt(g3c);
  ProfileMap prof;
  prof.name = "scarf";
  prof.hi = 0.5 * std::numbers::pi / alpha;
  prof.lo = -prof.hi;
  if (p == 2.0) {
    prof.F = [=](double xi) { return pref * std::tan(alpha * xi) / alpha; };
  } else {
    auto integral = std::make_shared<const ScarfIntegral>(p);
    prof.F = [=](double xi) { return pref * (*integral)(alpha * xi) / alpha; };
  }
  prof.Fp = [=](double xi) { return pref * std::pow(1.0 / std::cos(alpha * xi), p); };
  prof.Fpp = [=](double xi) {
    const double u = alpha * xi;
    return pref * std::pow(1.0 / std::cos(u), p) * p * alpha * std::tan(u);
  };
  prof.Fppp = [=](double xi) {
    const double u = alpha * xi;
    const double sec = 1.0 / std::cos(u);
    const double w = p * alpha * std::tan(u);
    return pref * std::pow(sec, p) * (w * w + p * alpha * alpha * sec * sec);
  };
  return prof;
}

ProfileMap periodic_extension(const ProfileMap& cell) {
  if (!std::isfinite(cell.lo) || !std::isfinite(cell.hi)) {
    throw DomainError("periodic_extension needs a bounded cell");
  }
  const double period = cell.hi - cell.lo;
  const double centre = 0.5 * (cell.lo + cell.hi);
  auto reduce = [=](double xi) { return xi - period * std::nearbyint((xi - centre) / period); };
  auto wrap = [=](RealFunction f, double edge_value) -> RealFunction {
    return [=](double xi) {
      const double r = reduce(xi);
      return cell.contains(r) ? f(r) : edge_value;
    };
  };
  const double inf = std::numeric_limits<double>::infinity();
  ProfileMap p;
  p.name = cell.name + "_periodic";
  p.F = wrap(cell.F, inf);
  p.Fp = wrap(cell.Fp, inf);
  p.Fpp = wrap(cell.Fpp, inf);
  p.Fppp = wrap(cell.Fppp, inf);
  return p;
}

ProfileMap builtin_profile(std::string_view name, const NamedParams& params) {
  if (name == "identity") return identity_profile();
  if (name == "erfi") {
    return erfi_profile(require_param(params, "b", 10.0), require_param(params, "G3", 1.0));
  }
  if (name == "scarf") {
    return scarf_profile(require_param(params, "A", 1.0), require_param(params, "alpha", 1.0),
                         require_param(params, "G3", 1.0));
  }
  std::ostringstream msg;
  msg << "unknown profile '" << name << "'";
  throw DomainError(msg.str());
}

OscillatorCoefficients oscillator_coeffs(double t, const Modulation& mod) {
  const double g = mod.gamma(t);
  const double gt = mod.gamma_t(t);
  const double dt = mod.delta_t(t);
  return {(mod.gamma_tt(t) * g - 2.0 * gt * gt) / (4.0 * g * g),
          (mod.delta_tt(t) * g - 2.0 * gt * dt) / (2.0 * g * g),
          -dt * dt / (4.0 * g * g) - mod.a_t(t)};
}

double trap_V(double xi, const ProfileMap& prof, double mu, double E) {
  prof.require(xi);
  const double fp = prof.Fp(xi);
  const double fpp = prof.Fpp(xi);
  const double fppp = prof.Fppp(xi);
  const double w = fpp / (2.0 * fp);
  const double dw = fppp / (2.0 * fp) - fpp * fpp / (2.0 * fp * fp);
  return w * w - dw - mu * fp * fp + E;
}

double tau_of_t(double t, const Modulation& mod) {
  if (mod.tau) return mod.tau(t);
  const auto& gamma = mod.gamma;
  return integrate_from_zero(
      [&gamma](double s) {
        const double g = gamma(s);
        return g * g;
      },
      t);
}

double phase_eta(double x, double t, const Modulation& mod, double E) {
  const double g = mod.gamma(t);
  return mod.gamma_t(t) / (4.0 * g) * x * x + mod.delta_t(t) / (2.0 * g) * x - mod.a(t) +
         E * tau_of_t(t, mod);
}

LabCoefficients::LabCoefficients(Modulation mod, ProfileMap prof, double mu, double E,
                                 std::vector<NonlinearTerm> terms)
    : mod_(std::move(mod)), prof_(std::move(prof)), mu_(mu), E_(E), terms_(std::move(terms)) {}

double LabCoefficients::xi(double x, double t) const {
  return mod_.gamma(t) * x + mod_.delta(t);
}

double LabCoefficients::v(double x, double t) const {
  const double g = mod_.gamma(t);
  const auto osc = oscillator_coeffs(t, mod_);
  return osc.omega * x * x + osc.f1 * x + osc.f2 + g * g * trap_V(xi(x, t), prof_, mu_, E_);
}

double LabCoefficients::nonlinear_coefficient(std::size_t term, double x, double t) const {
  const auto& nt = terms_.at(term);
  const double z = xi(x, t);
  prof_.require(z);
  return nt.coupling * std::pow(mod_.gamma(t), nt.gamma_exponent) *
         std::pow(prof_.Fp(z), nt.fprime_exponent);
}

double LabCoefficients::power_sum(int power, double x, double t) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].power == power) sum += nonlinear_coefficient(i, x, t);
  }
  return sum;
}

double LabCoefficients::g3(double x, double t) const { return power_sum(1, x, t); }

double LabCoefficients::g5(double x, double t) const { return power_sum(2, x, t); }

void LabCoefficients::local_rate(double t, std::span<const double> xs,
                                 std::span<const double> abs2, std::span<double> out) const {
  if (abs2.size() != xs.size() || out.size() != xs.size()) {
    throw GridMismatch("local_rate: span sizes differ");
  }
  const double g = mod_.gamma(t);
  const double d = mod_.delta(t);
  const auto osc = oscillator_coeffs(t, mod_);
  std::vector<double> gpow(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    gpow[i] = terms_[i].coupling * std::pow(g, terms_[i].gamma_exponent);
  }
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    const double z = g * x + d;
    double rate = osc.omega * x * x + osc.f1 * x + osc.f2 + g * g * trap_V(z, prof_, mu_, E_);
    const double rho = abs2[j];
    if (rho != 0.0 && !terms_.empty()) {
      const double fp = prof_.Fp(z);
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        rate += gpow[i] * std::pow(fp, terms_[i].fprime_exponent) * std::pow(rho, terms_[i].power);
      }
    }
    out[j] = rate;
  }
}

LabCoefficients lab_coefficients(const Modulation& mod, const ProfileMap& prof,
                                 const stationary::CQParameters& params, double E) {
  return LabCoefficients(mod, prof, params.mu, E,
                         {{1, params.g3c, 1.0, 3.0}, {2, params.g5c, 0.0, 4.0}});
}

std::complex<double> assemble_psi(double x, double t, const Modulation& mod,
                                  const ProfileMap& prof, double E, const RealFunction& phi) {
  const AnalyticSolution sol(mod, prof, E, phi);
  return sol(x, t);
}

AnalyticSolution::AnalyticSolution(Modulation mod, ProfileMap prof, double E, RealFunction phi,
                                   Mask mask)
    : mod_(std::move(mod)),
      prof_(std::move(prof)),
      E_(E),
      phi_(std::move(phi)),
      mask_(std::move(mask)) {}

std::complex<double> AnalyticSolution::operator()(double x, double t) const {
  std::complex<double> out;
  sample(t, std::span<const double>(&x, 1), std::span<std::complex<double>>(&out, 1));
  return out;
}

double AnalyticSolution::modulus_squared(double x, double t) const {
  double out = 0.0;
  sample_modulus_squared(t, std::span<const double>(&x, 1), std::span<double>(&out, 1));
  return out;
}

double AnalyticSolution::phase(double x, double t) const { return phase_eta(x, t, mod_, E_); }

namespace {

// sqrt(gamma/F') Phi(F(xi)); zero where F' is infinite.
double real_amplitude(const ProfileMap& prof, const RealFunction& phi, double g, double z) {
  prof.require(z);
  const double fp = prof.Fp(z);
  if (std::isinf(fp)) return 0.0;
  const double value = phi(prof.F(z));
  if (!std::isfinite(value) || !(fp > 0.0)) {
    std::ostringstream msg;
    msg << "non-finite field at xi = " << z << " (Phi = " << value << ", F' = " << fp << ")";
    throw DomainError(msg.str());
  }
  return std::sqrt(g / fp) * value;
}

}  // namespace

void AnalyticSolution::sample(double t, std::span<const double> xs,
                              std::span<std::complex<double>> out) const {
  if (out.size() != xs.size()) throw GridMismatch("sample: span sizes differ");
  const double g = mod_.gamma(t);
  const double d = mod_.delta(t);
  const double quad = mod_.gamma_t(t) / (4.0 * g);
  const double lin = mod_.delta_t(t) / (2.0 * g);
  const double offset = -mod_.a(t) + E_ * tau_of_t(t, mod_);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    if (masked_out(x, t)) {
      out[j] = 0.0;
      continue;
    }
    const double amp = real_amplitude(prof_, phi_, g, g * x + d);
    const double eta = quad * x * x + lin * x + offset;
    out[j] = {amp * std::cos(eta), -amp * std::sin(eta)};
  }
}

void AnalyticSolution::sample_modulus_squared(double t, std::span<const double> xs,
                                              std::span<double> out) const {
  if (out.size() != xs.size()) throw GridMismatch("sample: span sizes differ");
  const double g = mod_.gamma(t);
  const double d = mod_.delta(t);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    if (masked_out(x, t)) {
      out[j] = 0.0;
      continue;
    }
    const double z = g * x + d;
    prof_.require(z);
    const double fp = prof_.Fp(z);
    if (std::isinf(fp)) {
      out[j] = 0.0;
      continue;
    }
    const double value = phi_(prof_.F(z));
    out[j] = g * value * value / fp;
  }
}

}  // namespace cqnls::transform
