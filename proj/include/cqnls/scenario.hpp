#pragma once

// Declarative scenarios: which solution, which modulation/profile/gauge,
// which grid and which checks.  Scenarios are read from JSON (schema 1),
// built into an analytic lab-frame solution plus its coefficients, and run
// to produce a report and data files.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cqnls/generalized.hpp"
#include "cqnls/pde.hpp"
#include "cqnls/transform.hpp"

namespace cqnls::scenario {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

/// Malformed scenario or command line; maps to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Component {
  std::string name;
  transform::NamedParams params;
};

struct Thresholds {
  double residual_max = 1e-5;
  double spatial_order = 3.5;
  double temporal_order = 1.8;
  double first_integral = 1e-8;
  double static_ode = 1e-7;
  double evolve_l2 = 1e-4;
  double evolve_modulus = 1e-3;
  double norm_drift = 1e-10;
};

struct ResidualConfig {
  double stencil_dx = 0.0;  ///< 0: grid dx
  double stencil_dt = 0.0;  ///< 0: grid dt
  std::size_t band = 4;
  std::vector<double> order_dx;      ///< spatial refinement study (empty: skipped)
  double order_dx_stencil_dt = 1e-3;
  std::vector<double> order_dt;      ///< temporal refinement study (empty: skipped)
  double order_dt_stencil_dx = 0.005;
  std::size_t order_time_stride = 5;
};

struct EvolveConfig {
  double x_lo = -25.0;
  double x_hi = 25.0;
  std::size_t nx = 1024;
  double dt = 1e-4;
  double t_end = 1.0;
  std::string compare = "complex";  ///< complex | modulus
};

struct Scenario {
  std::string name;
  std::string solution;
  transform::NamedParams parameters;
  Component modulation;
  Component profile;
  bool periodic_profile = false;
  Component gauge{"zero", {}};
  pde::Grid grid;
  std::vector<std::string> checks;
  Thresholds thresholds;
  ResidualConfig residual;
  EvolveConfig evolve;
  std::string figure;       ///< "", fig1, fig2 or fig3
  bool write_profile = true;
};

/// Strict parse: unknown keys, wrong types or a wrong schema version throw UsageError.
Scenario from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
Scenario load(const std::filesystem::path& path);

/// The nine solution ids followed by fig1, fig2, fig3.
std::vector<std::string> preset_names();
Scenario preset(std::string_view name);
/// One-line summary used by `list`.
std::string summary(std::string_view name);
/// Parameter schema, defaults and constraints of a preset.
std::string describe(std::string_view name);

/// Applies "dotted.key=value" to the JSON form and re-validates.
Scenario apply_override(const Scenario& s, std::string_view assignment);

/// The constructed objects of a scenario.
struct Built {
  stationary::NamedSolution stationary;   ///< for the CQ solutions
  std::optional<generalized::SineGordonParams> sine_gordon;
  transform::Modulation modulation;
  transform::ProfileMap profile;
  transform::ProfileMap cell;             ///< unextended profile (same as profile when not periodic)
  double E = 0.0;
  transform::LabCoefficients coeffs;
  transform::AnalyticSolution solution;   ///< unmasked
  transform::AnalyticSolution masked;     ///< zero outside the central cell when periodic
  std::function<double(double)> phi;
};

/// Throws UsageError for inconsistent or out-of-domain parameters.
Built build(const Scenario& s);

struct CheckResult {
  std::string name;
  bool pass = false;
  nlohmann::json metrics = nlohmann::json::object();
};

struct Report {
  std::string scenario;
  std::vector<CheckResult> checks;
  nlohmann::json figure = nlohmann::json::object();

  bool pass() const;
  nlohmann::json to_json() const;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  bool write_files = true;
};

/// Runs the requested checks and, when asked, writes
/// <name>_profile.csv, <name>_report.json and figure files into out_dir.
Report run(const Scenario& s, const RunOptions& options);

/// |Psi|^2 on the scenario grid, row-major in t.
std::vector<double> modulus_grid(const Scenario& s);

/// Writes rows "x,t,re,im,abs2" with 17 significant digits.
void write_profile_csv(const std::filesystem::path& path, const Built& b, const pde::Grid& grid);

}  // namespace cqnls::scenario
