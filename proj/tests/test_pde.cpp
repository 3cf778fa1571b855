#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "cqnls/errors.hpp"
#include "cqnls/pde.hpp"
#include "oracles.hpp"

using namespace cqnls;
using namespace cqnls::pde;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// i Psi_t = -Psi_xx + (1 + E) Psi - |Psi|^2 Psi with Psi = e^{-iEt} sqrt(2) sech x.
struct Autonomous {
  double E = 0.4;
  stationary::NamedSolution sol = stationary::thin_bright();
  transform::LabCoefficients coeffs =
      transform::lab_coefficients(transform::constant_modulation(), transform::identity_profile(), sol.params, E);
  transform::AnalyticSolution exact{transform::constant_modulation(), transform::identity_profile(), E, sol.phi};
};

ComplexField gaussian_field(const Grid& g, double sigma, double t) {
  ComplexField f{g, t, std::vector<cd>(g.nx)};
  for (std::size_t j = 0; j < g.nx; ++j) f.values[j] = oracle::free_gaussian(g.x(j), t, sigma);
  return f;
}

}  // namespace

TEST_CASE("grid geometry and FFT wavenumber ordering") {
  const Grid g = make_grid(-4.0, 4.0, 16, 0.0, 1.0, 11);
  CHECK(g.dx == doctest::Approx(0.5));
  CHECK(g.dt == doctest::Approx(0.1));
  CHECK(g.length() == doctest::Approx(8.0));
  CHECK(g.xs().front() == -4.0);
  CHECK(g.xs().back() == doctest::Approx(3.5));
  const auto k = g.wavenumbers();
  const double k0 = 2.0 * kPi / 8.0;
  CHECK(k[0] == 0.0);
  CHECK(k[1] == doctest::Approx(k0));
  CHECK(k[7] == doctest::Approx(7 * k0));
  CHECK(k[8] == doctest::Approx(-8 * k0));
  CHECK(k[15] == doctest::Approx(-k0));

  Grid bad = g;
  bad.nx = 8;
  CHECK_THROWS_AS(bad.validate(), SetupError);
  bad = g;
  bad.dx = 0.0;
  CHECK_THROWS_AS(bad.validate(), SetupError);
}

TEST_CASE("residual of the zero field vanishes") {
  const Autonomous a;
  const Grid g = make_grid(-10.0, 10.0, 200, 0.0, 1.0, 21);
  const auto map = residual_map(pointwise_sampler([](double, double) { return cd{}; }), a.coeffs, g);
  CHECK(map.max() == 0.0);
  CHECK(map.median() == 0.0);
  CHECK(map.ts.size() == 21 - 8);
  CHECK(map.xs.size() == 200 - 8);
}

TEST_CASE("autonomous residual converges at 4th order under (dx, dt) refinement") {
  const Autonomous a;
  std::vector<double> hs;
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    const Grid g = make_grid(-12.0, 12.0, static_cast<std::size_t>(24.0 / 0.05), 0.0, 1.0, 11);
    ResidualOptions o;
    o.stencil_dx = h;
    o.stencil_dt = h;
    const auto map = residual_map(solution_sampler(a.exact), a.coeffs, g, o);
    hs.push_back(h);
    errs.push_back(map.max());
  }
  CHECK(errs.back() < errs.front());
  CHECK(fitted_order(hs, errs) >= 3.5);
}

TEST_CASE("residual grows linearly with a perturbation of the field") {
  const Autonomous a;
  const Grid g = make_grid(-1.0, 1.0, 40, 0.0, 0.2, 11);
  ResidualOptions o;
  o.stencil_dx = 1e-3;
  o.stencil_dt = 1e-3;
  auto perturbed = [&](double eps) {
    return residual_map(pointwise_sampler([&, eps](double x, double t) { return a.exact(x, t) * (1.0 + eps); }),
                        a.coeffs, g, o)
        .max();
  };
  const double r1 = perturbed(1e-3);
  const double r2 = perturbed(2e-3);
  CHECK(r1 > 1e-4);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("residual_map rejects non-finite samples") {
  const Autonomous a;
  const Grid g = make_grid(-1.0, 1.0, 40, 0.0, 0.2, 11);
  const auto bad = pointwise_sampler([](double x, double) {
    return x > 0.5 ? cd(std::numeric_limits<double>::quiet_NaN(), 0.0) : cd(1.0, 0.0);
  });
  CHECK_THROWS_AS(residual_map(bad, a.coeffs, g), DomainError);
}

TEST_CASE("free evolution of a Gaussian matches the spreading closed form") {
  const transform::LabCoefficients free(transform::constant_modulation(), transform::identity_profile(), 0.0, 0.0,
                                        {});
  const double sigma = 1.0;
  Grid g = make_grid(-40.0, 40.0, 1024, 0.0, 0.5, 2);
  g.dt = 1e-3;
  const auto init = gaussian_field(g, sigma, 0.0);
  const auto out = split_step_evolve(init, free, g, 500);
  CHECK(out.t == doctest::Approx(0.5));
  const auto exact = gaussian_field(g, sigma, 0.5);
  CHECK(l2_error(out, exact) / norm(exact) <= 1e-8);
}

TEST_CASE("the zero field stays zero") {
  const Autonomous a;
  Grid g = make_grid(-10.0, 10.0, 64, 0.0, 1.0, 2);
  g.dt = 0.01;
  const ComplexField zero{g, 0.0, std::vector<cd>(g.nx)};
  const auto out = split_step_evolve(zero, a.coeffs, g, 10);
  for (const cd& v : out.values) CHECK(v == cd{});
  CHECK(out.t == doctest::Approx(0.1));
}

TEST_CASE("autonomous sech: norm conservation over 10^4 steps and time reversal") {
  const Autonomous a;
  Grid g = make_grid(-30.0, 30.0, 256, 0.0, 1.0, 2);
  g.dt = 1e-3;
  const auto init = sample_field(solution_sampler(a.exact), g, 0.0);
  const auto fwd = split_step_evolve(init, a.coeffs, g, 10000);
  CHECK(std::abs(norm(fwd) - norm(init)) / norm(init) <= 1e-10);

  const auto there = split_step_evolve(init, a.coeffs, g, 2000);
  const auto back = split_step_evolve(there, a.coeffs, g, 2000, Direction::backward);
  CHECK(back.t == doctest::Approx(0.0).scale(1.0));
  CHECK(l2_error(back, init) <= 1e-8);
  CHECK(l2_error(there, sample_field(solution_sampler(a.exact), g, 2.0)) / norm(init) <= 1e-4);
}

TEST_CASE("Strang splitting is second order in dt") {
  const auto sol = stationary::thin_bright();
  const auto mod = transform::breathing_modulation();
  const auto prof = transform::erfi_profile(10.0, 1.0);
  const auto coeffs = transform::lab_coefficients(mod, prof, sol.params, 0.0);
  const transform::AnalyticSolution exact(mod, prof, 0.0, sol.phi);
  const double t_end = 0.2;
  std::vector<double> dts;
  std::vector<double> errs;
  for (double dt : {4e-4, 2e-4, 1e-4}) {
    Grid g = make_grid(-25.0, 25.0, 1024, 0.0, t_end, 2);
    g.dt = dt;
    const auto init = sample_field(solution_sampler(exact), g, 0.0);
    const auto out = split_step_evolve(init, coeffs, g, static_cast<std::size_t>(std::lround(t_end / dt)));
    const auto ref = sample_field(solution_sampler(exact), g, t_end);
    dts.push_back(dt);
    errs.push_back(l2_error(out, ref) / norm(ref));
  }
  CAPTURE(errs[0]);
  CAPTURE(errs[2]);
  CHECK(fitted_order(dts, errs) >= 1.8);
}

TEST_CASE("split_step_evolve preconditions") {
  const Autonomous a;
  Grid g = make_grid(-3.0, 3.0, 64, 0.0, 1.0, 2);
  g.dt = 1e-3;
  const auto wide = sample_field(solution_sampler(a.exact), g, 0.0);
  CHECK_THROWS_AS(split_step_evolve(wide, a.coeffs, g, 1), SetupError);

  Grid odd = make_grid(-30.0, 30.0, 100, 0.0, 1.0, 2);
  odd.dt = 1e-3;
  CHECK_THROWS_AS(split_step_evolve(sample_field(solution_sampler(a.exact), odd, 0.0), a.coeffs, odd, 1), SetupError);

  Grid other = make_grid(-30.0, 30.0, 128, 0.0, 1.0, 2);
  other.dt = 1e-3;
  Grid mine = make_grid(-30.0, 30.0, 256, 0.0, 1.0, 2);
  mine.dt = 1e-3;
  CHECK_THROWS_AS(split_step_evolve(sample_field(solution_sampler(a.exact), other, 0.0), a.coeffs, mine, 1),
                  GridMismatch);
}

TEST_CASE("a coefficient that turns non-finite raises a divergence error with the step") {
  auto mod = transform::constant_modulation();
  mod.gamma_tt = [](double t) { return t > 0.05 ? std::numeric_limits<double>::quiet_NaN() : 0.0; };
  const auto sol = stationary::thin_bright();
  const auto coeffs = transform::lab_coefficients(mod, transform::identity_profile(), sol.params, 0.0);
  const transform::AnalyticSolution exact(transform::constant_modulation(), transform::identity_profile(), 0.0, sol.phi);
  Grid g = make_grid(-30.0, 30.0, 256, 0.0, 1.0, 2);
  g.dt = 0.01;
  try {
    split_step_evolve(sample_field(solution_sampler(exact), g, 0.0), coeffs, g, 20);
    FAIL("expected a divergence error");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 5);
  }
}

TEST_CASE("l2 and modulus errors") {
  const Grid g = make_grid(0.0, 8.0, 16, 0.0, 1.0, 1);
  ComplexField a{g, 0.0, std::vector<cd>(16)};
  for (std::size_t j = 0; j < 16; ++j) a.values[j] = cd(std::sin(0.3 * j), std::cos(0.7 * j));
  CHECK(l2_error(a, a) == 0.0);

  ComplexField rotated = a;
  for (auto& v : rotated.values) v *= std::polar(1.0, 0.8);
  CHECK(l2_error(a, rotated) > 0.1);
  CHECK(modulus_error(a, rotated) == doctest::Approx(0.0).scale(1.0));

  // two nonzero samples, dx = 0.5: sqrt((1 + 4) * 0.5) and sqrt(((1 - 0)^2 + (2 - 1)^2) * 0.5)
  ComplexField p{g, 0.0, std::vector<cd>(16)};
  ComplexField q{g, 0.0, std::vector<cd>(16)};
  p.values[0] = cd(1.0, 0.0);
  p.values[1] = cd(0.0, 2.0);
  q.values[1] = cd(0.0, -1.0);
  CHECK(l2_error(p, q) == doctest::Approx(std::sqrt((1.0 + 9.0) * 0.5)));
  CHECK(modulus_error(p, q) == doctest::Approx(std::sqrt((1.0 + 1.0) * 0.5)));
  CHECK(norm(p) == doctest::Approx(std::sqrt(5.0 * 0.5)));

  ComplexField shorter{make_grid(0.0, 8.0, 32, 0.0, 1.0, 1), 0.0, std::vector<cd>(32)};
  CHECK_THROWS_AS(l2_error(a, shorter), GridMismatch);
  ComplexField later = a;
  later.t = 1.0;
  CHECK_THROWS_AS(modulus_error(a, later), GridMismatch);
}

TEST_CASE("fitted_order recovers an exact power law") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  std::vector<double> e;
  for (double v : h) e.push_back(3.0 * std::pow(v, 4.0));
  CHECK(fitted_order(h, e) == doctest::Approx(4.0).epsilon(1e-12));
}
