#include "nullwave/scenario.hpp"

#include <fstream>

#include <json.hpp>

#include "nullwave/chaplygin.hpp"
#include "nullwave/errors.hpp"

namespace nullwave {

using nlohmann::json;

ObstacleShape ObstacleConfig::build() const {
  if (kind == Kind::Ball) return ObstacleShape::ball(b);
  return ObstacleShape::star_shaped(b, harmonics);
}

NullFormSpec NonlinearityConfig::build() const {
  switch (preset) {
    case Preset::Zero:
      return NullFormSpec::zero();
    case Preset::Chaplygin:
      return chaplygin_spec();
    case Preset::NullQ0:
      return null_q0_spec();
    case Preset::NonnullDt2:
      return nonnull_dt2_spec();
    case Preset::Explicit:
      return NullFormSpec(s, q);
  }
  throw ConfigError("nonlinearity", "unknown preset");
}

SpaceTimeFn ForcingConfig::build() const {
  if (!enabled) return {};
  const Bump br{center, width, amplitude};
  const Bump bt{0.5 * (t_on + t_off), 0.5 * (t_off - t_on), 1.0};
  return [br, bt](double t, double r) { return bt.value(t) * br.value(r); };
}

double ScenarioConfig::r_inner() const {
  return scenario == ScenarioKind::OracleCompare ? 1.0 : obstacle.b;
}

double ScenarioConfig::auto_r_max() const {
  double support = data.center + data.width;
  if (forcing.enabled) support = std::max(support, forcing.center + forcing.width);
  if (scenario == ScenarioKind::Linear3d) {
    // y-space sizing: the flattening stretches lengths by at most 1/b < 4/3
    // inside |x| <= 3, which the 1.2 speed factor already covers; the grid
    // cap of 64 radial nodes argues for a tight margin.
    const double support_y = support <= 3.0 ? support / 0.75 : support;
    return support_y + 1.2 * t_final + 0.5;
  }
  return r_inner() + support + 1.2 * t_final + 2.0;
}

RadialGrid ScenarioConfig::build_grid() const {
  const double rmax = grid.r_max > 0 ? grid.r_max : auto_r_max();
  return RadialGrid::make(r_inner(), rmax, grid.dr);
}

std::string scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::LinearRadial: return "linear_radial";
    case ScenarioKind::NullRadial: return "null_radial";
    case ScenarioKind::NonnullRadial: return "nonnull_radial";
    case ScenarioKind::ChaplyginRadial: return "chaplygin_radial";
    case ScenarioKind::Linear3d: return "linear_3d";
    case ScenarioKind::OracleCompare: return "oracle_compare";
    case ScenarioKind::ConvergenceStudy: return "convergence_study";
    case ScenarioKind::EpsilonSweep: return "epsilon_sweep";
  }
  return "unknown";
}

namespace {

ScenarioKind parse_kind(const std::string& s) {
  if (s == "linear_radial") return ScenarioKind::LinearRadial;
  if (s == "null_radial") return ScenarioKind::NullRadial;
  if (s == "nonnull_radial") return ScenarioKind::NonnullRadial;
  if (s == "chaplygin_radial") return ScenarioKind::ChaplyginRadial;
  if (s == "linear_3d") return ScenarioKind::Linear3d;
  if (s == "oracle_compare") return ScenarioKind::OracleCompare;
  if (s == "convergence_study") return ScenarioKind::ConvergenceStudy;
  if (s == "epsilon_sweep") return ScenarioKind::EpsilonSweep;
  throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

ScenarioConfig from_json(const json& j) {
  ScenarioConfig cfg;
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  if (j.contains("scenario"))
    cfg.scenario = parse_kind(j.at("scenario").get<std::string>());

  if (j.contains("obstacle")) {
    const auto& o = j.at("obstacle");
    const std::string kind = o.value("kind", "ball");
    if (kind == "ball") {
      cfg.obstacle.kind = ObstacleConfig::Kind::Ball;
      if (o.contains("b")) cfg.obstacle.b = number_at(o.at("b"), "obstacle.b");
    } else if (kind == "star") {
      cfg.obstacle.kind = ObstacleConfig::Kind::Star;
      if (o.contains("base"))
        cfg.obstacle.b = number_at(o.at("base"), "obstacle.base");
      for (const auto& h : o.value("harmonics", json::array())) {
        if (!h.is_array() || h.size() != 3)
          throw ConfigError("obstacle.harmonics",
                            "entries must be [degree, order, coeff]");
        cfg.obstacle.harmonics.push_back(
            {h[0].get<int>(), h[1].get<int>(), h[2].get<double>()});
      }
    } else {
      throw ConfigError("obstacle.kind", "must be 'ball' or 'star'");
    }
  }

  if (j.contains("nonlinearity")) {
    const auto& nl = j.at("nonlinearity");
    cfg.nonlinearity.specified = true;
    if (nl.contains("preset")) {
      const std::string p = nl.at("preset").get<std::string>();
      if (p == "chaplygin")
        cfg.nonlinearity.preset = NonlinearityConfig::Preset::Chaplygin;
      else if (p == "null_q0")
        cfg.nonlinearity.preset = NonlinearityConfig::Preset::NullQ0;
      else if (p == "nonnull_dt2")
        cfg.nonlinearity.preset = NonlinearityConfig::Preset::NonnullDt2;
      else if (p == "zero")
        cfg.nonlinearity.preset = NonlinearityConfig::Preset::Zero;
      else
        throw ConfigError("nonlinearity.preset", "unknown preset '" + p + "'");
    } else {
      cfg.nonlinearity.preset = NonlinearityConfig::Preset::Explicit;
      const auto& s = nl.at("S");
      const auto& q = nl.at("Q");
      if (s.size() != 4 || q.size() != 4)
        throw ConfigError("nonlinearity", "S must be 4x4 and Q must be 4x4x4");
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          cfg.nonlinearity.s[a][b] = s[a][b].get<double>();
          for (int m = 0; m < 4; ++m)
            cfg.nonlinearity.q[a][b][m] = q[a][b][m].get<double>();
        }
    }
  }

  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.value("type", "bump") != std::string("bump"))
      throw ConfigError("data.type", "only 'bump' data is supported");
    cfg.data.center = d.value("center", cfg.data.center);
    cfg.data.width = d.value("width", cfg.data.width);
    cfg.data.u0_amp = d.value("u0_amp", cfg.data.u0_amp);
    cfg.data.u1_amp = d.value("u1_amp", cfg.data.u1_amp);
    cfg.data.epsilon = d.value("epsilon", cfg.data.epsilon);
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid.dr = g.value("dr", cfg.grid.dr);
    cfg.grid.cfl = g.value("cfl", cfg.grid.cfl);
    if (g.contains("r_max")) {
      if (g.at("r_max").is_string()) {
        if (g.at("r_max").get<std::string>() != "auto")
          throw ConfigError("grid.r_max", "must be 'auto' or a number");
        cfg.grid.r_max = -1.0;
      } else {
        cfg.grid.r_max = number_at(g.at("r_max"), "grid.r_max");
      }
    }
    const std::string outer = g.value("outer", "dod");
    if (outer == "dod")
      cfg.grid.outer = OuterBoundary::DomainOfDependence;
    else if (outer == "sommerfeld")
      cfg.grid.outer = OuterBoundary::Sommerfeld;
    else
      throw ConfigError("grid.outer", "must be 'dod' or 'sommerfeld'");
  }

  if (j.contains("t_final"))
    cfg.t_final = number_at(j.at("t_final"), "t_final");

  if (j.contains("forcing")) {
    const auto& f = j.at("forcing");
    cfg.forcing.enabled = true;
    cfg.forcing.center = f.value("center", cfg.forcing.center);
    cfg.forcing.width = f.value("width", cfg.forcing.width);
    cfg.forcing.t_on = f.value("t_on", cfg.forcing.t_on);
    cfg.forcing.t_off = f.value("t_off", cfg.forcing.t_off);
    cfg.forcing.amplitude = f.value("amplitude", cfg.forcing.amplitude);
  }

  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    cfg.diagnostics.order_cap = d.value("order_cap", 2);
    cfg.diagnostics.sample_every = d.value("sample_every", 0.1);
  }

  if (j.contains("gas")) {
    cfg.gas.rho_bar = j.at("gas").value("rho_bar", 1.0);
    cfg.gas.p0 = j.at("gas").value("P0", 2.0);
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.output.dir = o.value("dir", cfg.output.dir);
    if (o.contains("formats")) {
      cfg.output.csv = false;
      cfg.output.json = false;
      for (const auto& f : o.at("formats")) {
        if (f == "csv") cfg.output.csv = true;
        else if (f == "json") cfg.output.json = true;
        else throw ConfigError("output.formats", "must be 'csv' or 'json'");
      }
    }
  }

  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("epsilons"))
    cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("drs")) cfg.drs = j.at("drs").get<std::vector<double>>();

  return cfg;
}

}  // namespace

void validate_config(ScenarioConfig& cfg) {
  // Scenario-dependent nonlinearity defaults.
  using P = NonlinearityConfig::Preset;
  if (!cfg.nonlinearity.specified) {
    switch (cfg.scenario) {
      case ScenarioKind::NullRadial:
        cfg.nonlinearity.preset = P::NullQ0;
        break;
      case ScenarioKind::NonnullRadial:
        cfg.nonlinearity.preset = P::NonnullDt2;
        break;
      case ScenarioKind::ChaplyginRadial:
      case ScenarioKind::EpsilonSweep:
        cfg.nonlinearity.preset = P::Chaplygin;
        break;
      default:
        break;
    }
  }

  if (!(cfg.grid.cfl > 0.0)) throw ConfigError("grid.cfl", "must be positive");
  if (cfg.grid.cfl > 0.5) throw ConfigError("grid.cfl", "exceeds 0.5");
  if (!(cfg.grid.dr > 0.0)) throw ConfigError("grid.dr", "must be positive");
  if (cfg.t_final < 0.0) throw ConfigError("t_final", "must be nonnegative");
  if (cfg.data.epsilon < 0.0)
    throw ConfigError("data.epsilon", "must be nonnegative");

  if (cfg.scenario == ScenarioKind::Linear3d ||
      cfg.scenario == ScenarioKind::OracleCompare ||
      cfg.scenario == ScenarioKind::ConvergenceStudy) {
    if (cfg.nonlinearity.preset != P::Zero)
      throw ConfigError("nonlinearity",
                        scenario_name(cfg.scenario) +
                            " requires the linear (zero) nonlinearity");
  }

  // Bump support must clear the inner boundary.
  const ObstacleShape shape = cfg.obstacle.build();
  const double clearance = cfg.scenario == ScenarioKind::OracleCompare
                               ? 1.0
                               : shape.max_b();
  if (!(cfg.data.center - cfg.data.width > clearance))
    throw ConfigError(
        "data", "bump support overlaps the boundary: center - width = " +
                    std::to_string(cfg.data.center - cfg.data.width) +
                    " must exceed " + std::to_string(clearance));

  if (cfg.grid.outer == OuterBoundary::Sommerfeld && cfg.grid.r_max <= 0)
    throw ConfigError("grid.r_max",
                      "sommerfeld outer boundary requires an explicit r_max");
  if (cfg.grid.outer == OuterBoundary::DomainOfDependence &&
      cfg.grid.r_max > 0 && cfg.grid.r_max < cfg.auto_r_max())
    throw ConfigError("grid.r_max",
                      "too small for domain-of-dependence sizing; need >= " +
                          std::to_string(cfg.auto_r_max()));

  if (cfg.scenario != ScenarioKind::Linear3d &&
      cfg.scenario != ScenarioKind::OracleCompare &&
      cfg.obstacle.kind == ObstacleConfig::Kind::Star)
    throw ConfigError("obstacle",
                      "radial scenarios require a ball obstacle; star shapes "
                      "run through linear_3d");

  if (cfg.scenario == ScenarioKind::ChaplyginRadial ||
      cfg.scenario == ScenarioKind::EpsilonSweep) {
    GasParameters::make(cfg.gas.rho_bar, cfg.gas.p0);  // validates
  }
  if (cfg.scenario == ScenarioKind::EpsilonSweep && cfg.epsilons.empty())
    throw ConfigError("epsilons", "sweep needs at least one epsilon");
  if (cfg.scenario == ScenarioKind::ConvergenceStudy && cfg.drs.size() < 2)
    throw ConfigError("drs", "convergence study needs at least two spacings");
}

ScenarioConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("<json>", e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError("<json>", e.what());
  }
  validate_config(cfg);
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace nullwave
