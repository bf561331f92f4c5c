#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nullwave/initial.hpp"
#include "nullwave/solver.hpp"

namespace nullwave {

enum class ScenarioKind {
  LinearRadial,
  NullRadial,
  NonnullRadial,
  ChaplyginRadial,
  Linear3d,
  OracleCompare,
  ConvergenceStudy,
  EpsilonSweep,
};

struct ObstacleConfig {
  enum class Kind { Ball, Star } kind = Kind::Ball;
  double b = 0.875;  // Ball radius / Star base
  std::vector<Harmonic> harmonics;

  ObstacleShape build() const;
};

struct NonlinearityConfig {
  enum class Preset { Zero, Chaplygin, NullQ0, NonnullDt2, Explicit };
  Preset preset = Preset::Zero;
  bool specified = false;  // present in the config file
  Mat4 s{};
  QTensor q{};

  NullFormSpec build() const;
};

struct GridConfig {
  double dr = 0.005;
  double cfl = 0.5;
  double r_max = -1.0;  // < 0: "auto" (domain-of-dependence sizing)
  OuterBoundary outer = OuterBoundary::DomainOfDependence;
};

struct ForcingConfig {
  bool enabled = false;
  double center = 3.0;
  double width = 1.0;
  double t_on = 0.0;
  double t_off = 2.0;
  double amplitude = 1.0;

  SpaceTimeFn build() const;
};

struct DiagnosticsConfig {
  int order_cap = 2;
  double sample_every = 0.1;
};

struct GasConfig {
  double rho_bar = 1.0;
  double p0 = 2.0;
};

struct OutputConfig {
  std::string dir = "out";
  bool csv = true;
  bool json = true;
};

/// Complete run description; round-trips with the scenario JSON format.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::LinearRadial;
  ObstacleConfig obstacle;
  NonlinearityConfig nonlinearity;
  BumpDataSpec data{3.0, 1.0, 1.0, 0.0, 0.01};
  GridConfig grid;
  double t_final = 10.0;
  ForcingConfig forcing;
  DiagnosticsConfig diagnostics;
  GasConfig gas;
  OutputConfig output;
  std::uint64_t seed = 0;
  std::vector<double> epsilons{0.02, 0.01, 0.005};  // epsilon_sweep
  std::vector<double> drs{0.02, 0.01, 0.005};       // convergence_study

  /// Inner radius of the radial computational domain.
  double r_inner() const;
  /// Domain-of-dependence outer radius for the configured horizon.
  double auto_r_max() const;
  RadialGrid build_grid() const;
};

/// Parse + validate a scenario file. Throws ConfigError with the offending
/// field path; malformed JSON also maps to ConfigError.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& json_text);

/// Cross-field validation; fills scenario-dependent defaults.
void validate_config(ScenarioConfig& cfg);

std::string scenario_name(ScenarioKind k);

}  // namespace nullwave
