#include "cqnls/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "cqnls/errors.hpp"

namespace cqnls::pde {
namespace {

using cd = std::complex<double>;

// FFTW planning is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(std::vector<cd>& data, int sign) {
    std::lock_guard lock(planner_mutex());
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw SetupError("FFTW could not create a plan");
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

bool same_space(const Grid& a, const Grid& b) {
  return a.nx == b.nx && a.x0 == b.x0 && a.dx == b.dx;
}

void require_comparable(const ComplexField& a, const ComplexField& b) {
  if (!same_space(a.grid, b.grid) || a.values.size() != b.values.size()) {
    throw GridMismatch("fields live on different spatial grids");
  }
  if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, std::abs(a.t))) {
    std::ostringstream msg;
    msg << "fields are at different times (" << a.t << " vs " << b.t << ")";
    throw GridMismatch(msg.str());
  }
}

void require_finite(std::span<const cd> values, double t) {
  for (const cd& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "non-finite field sample at t = " << t;
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

std::vector<double> Grid::xs() const {
  std::vector<double> out(nx);
  for (std::size_t j = 0; j < nx; ++j) out[j] = x(j);
  return out;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(nx);
  const double base = 2.0 * std::numbers::pi / length();
  for (std::size_t j = 0; j < nx; ++j) {
    const auto shifted = j < nx / 2 ? static_cast<double>(j)
                                    : static_cast<double>(j) - static_cast<double>(nx);
    k[j] = base * shifted;
  }
  return k;
}

void Grid::validate() const {
  if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x0)) throw SetupError("grid: dx must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0)) throw SetupError("grid: dt must be positive");
  if (nx < 16) throw SetupError("grid: nx must be at least 16");
  if (nt < 1) throw SetupError("grid: nt must be at least 1");
}

Grid make_grid(double x_lo, double x_hi, std::size_t nx, double t_lo, double t_hi,
               std::size_t nt) {
  Grid g;
  g.x0 = x_lo;
  g.nx = nx;
  g.dx = nx > 0 ? (x_hi - x_lo) / static_cast<double>(nx) : 0.0;
  g.t0 = t_lo;
  g.nt = nt;
  g.dt = nt > 1 ? (t_hi - t_lo) / static_cast<double>(nt - 1) : 1.0;
  g.validate();
  return g;
}

FieldSampler pointwise_sampler(std::function<std::complex<double>(double, double)> psi) {
  return [psi = std::move(psi)](double t, std::span<const double> xs, std::span<cd> out) {
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = psi(xs[j], t);
  };
}

FieldSampler solution_sampler(const transform::AnalyticSolution& solution) {
  return [solution](double t, std::span<const double> xs, std::span<cd> out) {
    solution.sample(t, xs, out);
  };
}

ComplexField sample_field(const FieldSampler& sampler, const Grid& grid, double t) {
  ComplexField f{grid, t, std::vector<cd>(grid.nx)};
  const auto xs = grid.xs();
  sampler(t, xs, f.values);
  require_finite(f.values, t);
  return f;
}

double ResidualMap::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double ResidualMap::median() const {
  if (values.empty()) return 0.0;
  std::vector<double> copy = values;
  const auto mid = copy.begin() + static_cast<std::ptrdiff_t>(copy.size() / 2);
  std::nth_element(copy.begin(), mid, copy.end());
  return *mid;
}

ResidualMap residual_map(const FieldSampler& psi, const transform::LabCoefficients& coeffs,
                         const Grid& grid, const ResidualOptions& options) {
  grid.validate();
  const double hx = options.stencil_dx > 0.0 ? options.stencil_dx : grid.dx;
  const double ht = options.stencil_dt > 0.0 ? options.stencil_dt : grid.dt;
  const std::size_t band = options.band;
  const std::size_t stride = std::max<std::size_t>(1, options.time_stride);
  if (grid.nx <= 2 * band) throw SetupError("residual_map: nx too small for the boundary band");

  std::vector<std::size_t> rows;
  if (grid.nt > 2 * band) {
    for (std::size_t n = band; n < grid.nt - band; n += stride) rows.push_back(n);
  } else if (grid.nt == 1) {
    rows.push_back(0);
  } else {
    throw SetupError("residual_map: nt too small for the boundary band");
  }

  ResidualMap map;
  for (std::size_t j = band; j < grid.nx - band; ++j) map.xs.push_back(grid.x(j));
  for (std::size_t n : rows) map.ts.push_back(grid.t(n));
  const std::size_t ncol = map.xs.size();
  map.values.assign(rows.size() * ncol, 0.0);

  auto work = [&](std::size_t first, std::size_t step) {
    std::vector<double> shifted(ncol);
    std::vector<double> abs2(ncol);
    std::vector<double> rate(ncol);
    std::array<std::vector<cd>, 5> space;
    std::array<std::vector<cd>, 4> time;
    for (auto& s : space) s.resize(ncol);
    for (auto& s : time) s.resize(ncol);
    for (std::size_t r = first; r < rows.size(); r += step) {
      const double t = map.ts[r];
      for (int m = -2; m <= 2; ++m) {
        for (std::size_t j = 0; j < ncol; ++j) shifted[j] = map.xs[j] + m * hx;
        psi(t, shifted, space[m + 2]);
        require_finite(space[m + 2], t);
      }
      const std::array<int, 4> offsets{-2, -1, 1, 2};
      for (std::size_t i = 0; i < 4; ++i) {
        psi(t + offsets[i] * ht, map.xs, time[i]);
        require_finite(time[i], t + offsets[i] * ht);
      }
      const auto& c = space[2];
      for (std::size_t j = 0; j < ncol; ++j) abs2[j] = std::norm(c[j]);
      coeffs.local_rate(t, map.xs, abs2, rate);
      for (std::size_t j = 0; j < ncol; ++j) {
        const cd dxx = (-space[0][j] + 16.0 * space[1][j] - 30.0 * c[j] + 16.0 * space[3][j] -
                        space[4][j]) /
                       (12.0 * hx * hx);
        const cd dt = (time[0][j] - 8.0 * time[1][j] + 8.0 * time[2][j] - time[3][j]) / (12.0 * ht);
        map.values[r * ncol + j] = std::abs(cd(0.0, 1.0) * dt + dxx - rate[j] * c[j]);
      }
    }
  };

  const unsigned nthreads = std::max(1u, std::min<unsigned>(options.threads,
                                                            static_cast<unsigned>(rows.size())));
  if (nthreads == 1) {
    work(0, 1);
    return map;
  }
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < nthreads; ++i) {
    pool.emplace_back([&, i] {
      try {
        work(i, nthreads);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return map;
}

ComplexField split_step_evolve(const ComplexField& init, const transform::LabCoefficients& coeffs,
                               const Grid& grid, std::size_t n_steps, Direction direction,
                               const EvolveOptions& options) {
  grid.validate();
  if (!same_space(init.grid, grid) || init.values.size() != grid.nx) {
    throw GridMismatch("split_step_evolve: initial field is not on the evolution grid");
  }
  if ((grid.nx & (grid.nx - 1)) != 0) throw SetupError("split_step_evolve: nx must be a power of two");
  require_finite(init.values, init.t);

  double peak = 0.0;
  for (const cd& v : init.values) peak = std::max(peak, std::abs(v));
  ComplexField field = init;
  field.grid = grid;
  const double h = direction == Direction::forward ? grid.dt : -grid.dt;
  if (peak == 0.0) {
    field.t = init.t + static_cast<double>(n_steps) * h;
    return field;
  }
  const double edge = std::max({std::abs(init.values.front()), std::abs(init.values[1]),
                                std::abs(init.values[grid.nx - 2]), std::abs(init.values.back())});
  if (edge > options.edge_tolerance * peak) {
    std::ostringstream msg;
    msg << "split_step_evolve: field not localised, edge/peak = " << edge / peak << " > "
        << options.edge_tolerance;
    throw SetupError(msg.str());
  }

  const std::size_t nx = grid.nx;
  const auto xs = grid.xs();
  const auto k = grid.wavenumbers();
  std::vector<cd> kinetic(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    kinetic[j] = std::polar(1.0 / static_cast<double>(nx), -k[j] * k[j] * h);
  }
  std::vector<cd>& psi = field.values;
  const FftPlan forward(psi, FFTW_FORWARD);
  const FftPlan backward(psi, FFTW_BACKWARD);
  std::vector<double> abs2(nx);
  std::vector<double> rate(nx);

  auto potential_step = [&](double tm, double hh) {
    for (std::size_t j = 0; j < nx; ++j) abs2[j] = std::norm(psi[j]);
    coeffs.local_rate(tm, xs, abs2, rate);
    for (std::size_t j = 0; j < nx; ++j) psi[j] *= std::polar(1.0, -rate[j] * hh);
  };

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = init.t + static_cast<double>(step) * h;
    potential_step(t + 0.25 * h, 0.5 * h);
    forward.execute();
    for (std::size_t j = 0; j < nx; ++j) psi[j] *= kinetic[j];
    backward.execute();
    potential_step(t + 0.75 * h, 0.5 * h);
    for (const cd& v : psi) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream msg;
        msg << "split_step_evolve diverged at step " << step;
        throw DivergenceError(msg.str(), step);
      }
    }
  }
  field.t = init.t + static_cast<double>(n_steps) * h;
  return field;
}

double norm(const ComplexField& a) {
  double sum = 0.0;
  for (const cd& v : a.values) sum += std::norm(v);
  return std::sqrt(sum * a.grid.dx);
}

double l2_error(const ComplexField& a, const ComplexField& b) {
  require_comparable(a, b);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) sum += std::norm(a.values[j] - b.values[j]);
  return std::sqrt(sum * a.grid.dx);
}

double modulus_error(const ComplexField& a, const ComplexField& b) {
  require_comparable(a, b);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    const double d = std::abs(a.values[j]) - std::abs(b.values[j]);
    sum += d * d;
  }
  return std::sqrt(sum * a.grid.dx);
}

double fitted_order(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw DomainError("fitted_order: need at least two (h, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) throw DomainError("fitted_order: values must be positive");
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cqnls::pde
