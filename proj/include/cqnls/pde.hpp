#pragma once

// Numerical checks of lab-frame solutions: the PDE residual of a sampled
// field and Strang split-step evolution under the lab coefficients.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cqnls/transform.hpp"

namespace cqnls::pde {

/// Uniform space-time grid.  x_j = x0 + j dx (j < nx), t_n = t0 + n dt (n < nt).
/// Spectral wavenumbers use the FFT ordering
///   k_j = 2 pi j / L for j < nx/2,  k_j = 2 pi (j - nx) / L otherwise,  L = nx dx.
struct Grid {
  double x0 = 0.0;
  double dx = 0.0;
  std::size_t nx = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t nt = 1;

  double x(std::size_t j) const noexcept { return x0 + static_cast<double>(j) * dx; }
  double t(std::size_t n) const noexcept { return t0 + static_cast<double>(n) * dt; }
  double length() const noexcept { return static_cast<double>(nx) * dx; }
  std::vector<double> xs() const;
  std::vector<double> wavenumbers() const;

  /// Throws SetupError unless dx > 0, dt > 0, nx >= 16 and nt >= 1.
  void validate() const;
};

/// Grid with nx points covering [x_lo, x_hi) and nt points covering [t_lo, t_hi].
Grid make_grid(double x_lo, double x_hi, std::size_t nx, double t_lo, double t_hi,
               std::size_t nt);

struct ComplexField {
  Grid grid;
  double t = 0.0;
  std::vector<std::complex<double>> values;
};

/// Fills out[j] with the field at (xs[j], t).
using FieldSampler = std::function<void(double t, std::span<const double> xs,
                                        std::span<std::complex<double>> out)>;

FieldSampler pointwise_sampler(std::function<std::complex<double>(double, double)> psi);
FieldSampler solution_sampler(const transform::AnalyticSolution& solution);

/// Samples a field on the spatial grid at time t.
ComplexField sample_field(const FieldSampler& sampler, const Grid& grid, double t);

struct ResidualOptions {
  double stencil_dx = 0.0;    ///< spatial stencil step; 0 means grid.dx
  double stencil_dt = 0.0;    ///< temporal stencil step; 0 means grid.dt
  std::size_t band = 4;       ///< grid points excluded at each edge, in x and in t
  std::size_t time_stride = 1;
  unsigned threads = 1;
};

/// Residual magnitudes on the interior rows and columns of the grid.
struct ResidualMap {
  std::vector<double> ts;
  std::vector<double> xs;
  std::vector<double> values;  ///< row-major, ts.size() x xs.size()

  double max() const;
  double median() const;
};

/// |i Psi_t + Psi_xx - (v + sum_n c_n |Psi|^(2n)) Psi| with 4th-order
/// central differences in x and t.  Throws DomainError on non-finite samples.
ResidualMap residual_map(const FieldSampler& psi, const transform::LabCoefficients& coeffs,
                         const Grid& grid, const ResidualOptions& options = {});

enum class Direction { forward, backward };

struct EvolveOptions {
  double edge_tolerance = 1e-8;  ///< max edge |Psi| relative to the peak
};

/// Strang splitting: half nonlinear/potential step at t + dt/4, kinetic step
/// e^{-i k^2 dt}, half nonlinear/potential step at t + 3dt/4.  Uses grid.dt
/// as the step length (negated for Direction::backward).
/// Throws SetupError when the initial field is not localised, GridMismatch
/// when the spatial grids differ, DivergenceError on non-finite values.
ComplexField split_step_evolve(const ComplexField& init, const transform::LabCoefficients& coeffs,
                               const Grid& grid, std::size_t n_steps,
                               Direction direction = Direction::forward,
                               const EvolveOptions& options = {});

/// sqrt(sum |Psi_j|^2 dx)
double norm(const ComplexField& a);
/// sqrt(sum |a_j - b_j|^2 dx)
double l2_error(const ComplexField& a, const ComplexField& b);
/// sqrt(sum (|a_j| - |b_j|)^2 dx)
double modulus_error(const ComplexField& a, const ComplexField& b);

/// Least-squares slope of log(err) against log(h).
double fitted_order(std::span<const double> h, std::span<const double> err);

}  // namespace cqnls::pde
