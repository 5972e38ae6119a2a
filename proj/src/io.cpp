#include "slcp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "slcp/errors.hpp"
#include "slcp/operator_core.hpp"

namespace slcp {

namespace {

constexpr const char* kVersion = "1.0.0";

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError("config: missing numeric field \"" + key + "\"");
  }
  return j[key].get<double>();
}

int require_int(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ConfigError("config: missing integer field \"" + key + "\"");
  }
  return j[key].get<int>();
}

bool require_bool(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_boolean()) {
    throw ConfigError("config: missing boolean field \"" + key + "\"");
  }
  return j[key].get<bool>();
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ConfigError("config: missing string field \"" + key + "\"");
  }
  return j[key].get<std::string>();
}

const nlohmann::json& require_object(const nlohmann::json& j,
                                     const std::string& key) {
  if (!j.contains(key) || !j[key].is_object()) {
    throw ConfigError("config: missing object field \"" + key + "\"");
  }
  return j[key];
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SolveConfig RunConfig::solve_config() const {
  SolveConfig sc;
  sc.newton_tol = newton_tol;
  sc.max_newton_iters = newton_max_iter;
  sc.homotopy_steps = homotopy_steps;
  sc.adaptive = adaptive;
  sc.min_dt = min_step;
  return sc;
}

RunConfig parse_run_config(const nlohmann::json& j, bool require_resolutions) {
  if (!j.is_object()) {
    throw ConfigError("config: document is not a JSON object");
  }
  RunConfig cfg;
  cfg.source_domain = require_object(j, "source_domain");
  cfg.target_domain = require_object(j, "target_domain");
  // Construct eagerly so descriptor errors surface as config errors.
  domain_from_json(cfg.source_domain);
  domain_from_json(cfg.target_domain);

  const auto& grid = require_object(j, "grid");
  if (!require_resolutions) {
    cfg.n_r = require_int(grid, "n_r");
    cfg.n_phi = require_int(grid, "n_phi");
  } else {
    if (!grid.contains("resolutions") || !grid["resolutions"].is_array() ||
        grid["resolutions"].empty()) {
      throw ConfigError("config: sweep requires a non-empty grid.resolutions");
    }
    for (const auto& entry : grid["resolutions"]) {
      if (!entry.is_array() || entry.size() != 2) {
        throw ConfigError("config: resolutions entries must be [n_r, n_phi]");
      }
      cfg.resolutions.emplace_back(entry.at(0).get<int>(),
                                   entry.at(1).get<int>());
    }
    cfg.n_r = cfg.resolutions.front().first;
    cfg.n_phi = cfg.resolutions.front().second;
  }
  const auto check_resolution = [](int n_r, int n_phi) {
    if (n_r < 8) throw ConfigError("config: grid.n_r must be >= 8");
    if (n_phi < 16 || n_phi % 2 != 0) {
      throw ConfigError("config: grid.n_phi must be even and >= 16");
    }
  };
  check_resolution(cfg.n_r, cfg.n_phi);
  for (const auto& [n_r, n_phi] : cfg.resolutions) {
    check_resolution(n_r, n_phi);
  }

  const auto& homotopy = require_object(j, "homotopy");
  const std::string mode = require_string(homotopy, "mode");
  if (mode == "adaptive") {
    cfg.adaptive = true;
  } else if (mode != "uniform") {
    throw ConfigError("config: homotopy.mode must be uniform or adaptive");
  }
  cfg.homotopy_steps = require_int(homotopy, "steps");
  if (cfg.homotopy_steps < 1) {
    throw ConfigError("config: homotopy.steps must be >= 1");
  }
  cfg.min_step = homotopy.value("min_step", 1.0 / 256.0);
  if (cfg.min_step <= 0.0) {
    throw ConfigError("config: homotopy.min_step must be positive");
  }

  const auto& newton = require_object(j, "newton");
  cfg.newton_tol = require_number(newton, "tol");
  if (cfg.newton_tol <= 0.0) {
    throw ConfigError("config: newton.tol must be positive");
  }
  cfg.newton_max_iter = require_int(newton, "max_iter");
  if (cfg.newton_max_iter < 1) {
    throw ConfigError("config: newton.max_iter must be >= 1");
  }

  const auto& output = require_object(j, "output");
  cfg.output_dir = require_string(output, "dir");
  if (cfg.output_dir.empty()) {
    throw ConfigError("config: output.dir must be non-empty");
  }
  cfg.emit_csv = require_bool(output, "emit_csv");
  cfg.emit_svg = require_bool(output, "emit_svg");
  cfg.emit_dual = require_bool(output, "emit_dual");

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) {
      throw ConfigError("config: seed must be an integer");
    }
    cfg.seed = j["seed"].get<long>();
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          bool require_resolutions) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_run_config(j, require_resolutions);
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot write " + tmp.string());
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string fields_csv(const Grid& grid, const Domain& target,
                       const Eigen::VectorXd& u, double c, double t,
                       bool dual_flag, bool is_dual) {
  std::string csv =
      "i_r,i_phi,x,y,u,ux,uy,uxx,uxy,uyy,kappa1,kappa2,residual,is_boundary";
  if (dual_flag) csv += ",is_dual";
  csv += "\n";

  Vector du(2);
  for (int k = 0; k < grid.node_count(); ++k) {
    const Grid::Derivs d = grid.eval_derivatives(u, k);
    du << d.du[0], d.du[1];
    const GraphGeometry geo = graph_geometry(du, d.d2u);
    const double residual = grid.is_boundary(k)
                                ? target.h(d.du)
                                : homotopy_value(t, du, d.d2u) - c;
    const Vec2 x = grid.node_position(k);
    csv += std::to_string(grid.node_ring(k)) + "," +
           std::to_string(grid.node_angle(k)) + "," + format_double(x[0]) +
           "," + format_double(x[1]) + "," + format_double(d.u) + "," +
           format_double(d.du[0]) + "," + format_double(d.du[1]) + "," +
           format_double(d.d2u(0, 0)) + "," + format_double(d.d2u(0, 1)) +
           "," + format_double(d.d2u(1, 1)) + "," +
           format_double(geo.kappa[0]) + "," + format_double(geo.kappa[1]) +
           "," + format_double(residual) + "," +
           (grid.is_boundary(k) ? "1" : "0");
    if (dual_flag) csv += is_dual ? ",1" : ",0";
    csv += "\n";
  }
  return csv;
}

nlohmann::json summary_json(const RunConfig& config, const Grid& grid,
                            const SolveState& state, double wall_time_s) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& stage : state.t_trace) {
    trace.push_back({{"t", stage.t},
                     {"c", stage.c},
                     {"newton_iters", stage.newton_iters},
                     {"residual", stage.residual}});
  }
  nlohmann::json j;
  j["c"] = state.c;
  j["t_trace"] = trace;
  j["converged"] = state.converged;
  j["grid"] = {{"n_r", grid.n_r()}, {"n_phi", grid.n_phi()}};
  j["domains"] = {{"source", grid.domain().descriptor()},
                  {"target", config.target_domain}};
  j["wall_time_s"] = wall_time_s;
  j["version"] = kVersion;
  j["seed"] = config.seed;
  j["failure"] = to_string(state.failure);
  j["condition_estimate"] = state.condition_estimate;
  j["residual_norm"] = state.residual_norm;
  return j;
}

nlohmann::json state_json(const RunConfig& config, const Grid& grid,
                          const SolveState& state) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["source_domain"] = grid.domain().descriptor();
  j["target_domain"] = config.target_domain;
  j["grid"] = {{"n_r", grid.n_r()}, {"n_phi", grid.n_phi()}};
  j["t"] = state.t;
  j["c"] = state.c;
  j["converged"] = state.converged;
  j["u"] = std::vector<double>(state.u.begin(), state.u.end());
  return j;
}

LoadedState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("state: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("state: parse error: ") + e.what());
  }
  LoadedState loaded;
  try {
    loaded.source = domain_from_json(j.at("source_domain"));
    loaded.target = domain_from_json(j.at("target_domain"));
    const int n_r = j.at("grid").at("n_r").get<int>();
    const int n_phi = j.at("grid").at("n_phi").get<int>();
    loaded.grid = std::make_shared<Grid>(loaded.source, n_r, n_phi);
    loaded.state.t = j.at("t").get<double>();
    loaded.state.c = j.at("c").get<double>();
    loaded.state.converged = j.at("converged").get<bool>();
    const auto& u = j.at("u");
    if (!u.is_array() ||
        static_cast<int>(u.size()) != loaded.grid->node_count()) {
      throw ConfigError("state: field length does not match grid");
    }
    loaded.state.u.resize(loaded.grid->node_count());
    for (int k = 0; k < loaded.grid->node_count(); ++k) {
      loaded.state.u[k] = u.at(k).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("state: malformed document: ") + e.what());
  }
  return loaded;
}

namespace {

// Compact five-stop colormap (dark blue .. yellow).
void colormap(double s, int& r, int& g, int& b) {
  static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                     {0.229, 0.322, 0.546},
                                     {0.127, 0.566, 0.551},
                                     {0.369, 0.789, 0.383},
                                     {0.993, 0.906, 0.144}};
  s = std::min(1.0, std::max(0.0, s));
  const double pos = s * 4.0;
  const int lo = std::min(3, static_cast<int>(pos));
  const double f = pos - lo;
  r = static_cast<int>(255.0 * (stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])));
  g = static_cast<int>(255.0 * (stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])));
  b = static_cast<int>(255.0 * (stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])));
}

}  // namespace

std::string svg_heatmap(const Grid& grid, const Eigen::VectorXd& values,
                        const std::string& title) {
  double vmin = values.minCoeff();
  double vmax = values.maxCoeff();
  if (vmax - vmin < 1e-300) vmax = vmin + 1.0;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int k = 0; k < grid.node_count(); ++k) {
    const Vec2 p = grid.node_position(k);
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double scale = 760.0 / span;
  const auto sx = [&](double x) { return 20.0 + (x - xmin) * scale; };
  const auto sy = [&](double y) { return 780.0 - (y - ymin) * scale; };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
      "height=\"820\" viewBox=\"0 0 800 820\">\n";
  svg += "<text x=\"20\" y=\"16\" font-family=\"monospace\" font-size=\"14\">" +
         title + "  [" + format_double(vmin) + ", " + format_double(vmax) +
         "]</text>\n";

  char buf[256];
  const auto emit_poly = [&](const std::vector<Vec2>& pts, double value) {
    int r, g, b;
    colormap((value - vmin) / (vmax - vmin), r, g, b);
    svg += "<polygon points=\"";
    for (const Vec2& p : pts) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p[0]), sy(p[1]));
      svg += buf;
    }
    std::snprintf(buf, sizeof(buf), "\" fill=\"rgb(%d,%d,%d)\"/>\n", r, g, b);
    svg += buf;
  };

  for (int j = 0; j < grid.n_phi(); ++j) {
    const int j1 = (j + 1) % grid.n_phi();
    // pole fan
    emit_poly({grid.node_position(0), grid.node_position(grid.node_index(1, j)),
               grid.node_position(grid.node_index(1, j1))},
              (values[0] + values[grid.node_index(1, j)] +
               values[grid.node_index(1, j1)]) /
                  3.0);
    for (int i = 1; i < grid.n_r(); ++i) {
      const int a = grid.node_index(i, j);
      const int b2 = grid.node_index(i + 1, j);
      const int c = grid.node_index(i + 1, j1);
      const int d = grid.node_index(i, j1);
      emit_poly({grid.node_position(a), grid.node_position(b2),
                 grid.node_position(c), grid.node_position(d)},
                0.25 * (values[a] + values[b2] + values[c] + values[d]));
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string json_to_string(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace slcp
