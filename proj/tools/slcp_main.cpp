#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slcp/diagnostics.hpp"
#include "slcp/errors.hpp"
#include "slcp/io.hpp"
#include "slcp/legendre.hpp"
#include "slcp/operator_core.hpp"
#include "slcp/radial_oracle.hpp"
#include "slcp/solver.hpp"

namespace fs = std::filesystem;
using namespace slcp;

namespace {

// Exit codes: 0 ok, 2 convergence failure, 3 convexity lost,
// 4 config/input error, 5 diagnostic failure.
constexpr int kExitOk = 0;
constexpr int kExitConvergence = 2;
constexpr int kExitConvexity = 3;
constexpr int kExitConfig = 4;
constexpr int kExitDiagnostics = 5;

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

int exit_code_for(const SolveState& state) {
  if (state.converged) return kExitOk;
  return state.failure == SolveFailure::kConvexityLost ? kExitConvexity
                                                       : kExitConvergence;
}

struct NodeFields {
  Eigen::VectorXd u, kappa_min, kappa_max, residual;
};

NodeFields node_fields(const Grid& grid, const Domain& target,
                       const Eigen::VectorXd& u, double c, double t) {
  NodeFields f;
  const int n = grid.node_count();
  f.u = u;
  f.kappa_min.resize(n);
  f.kappa_max.resize(n);
  f.residual.resize(n);
  Vector du(2);
  for (int k = 0; k < n; ++k) {
    const Grid::Derivs d = grid.eval_derivatives(u, k);
    du << d.du[0], d.du[1];
    const GraphGeometry geo = graph_geometry(du, d.d2u);
    f.kappa_min[k] = geo.kappa[0];
    f.kappa_max[k] = geo.kappa[1];
    f.residual[k] = grid.is_boundary(k) ? target.h(d.du)
                                        : homotopy_value(t, du, d.d2u) - c;
  }
  return f;
}

int run_single_solve(const RunConfig& cfg, const fs::path& out_dir,
                     SolveState* state_out = nullptr,
                     double* runtime_out = nullptr) {
  const DomainPtr source = domain_from_json(cfg.source_domain);
  const DomainPtr target = domain_from_json(cfg.target_domain);
  const auto grid = std::make_shared<Grid>(source, cfg.n_r, cfg.n_phi);

  const auto t0 = std::chrono::steady_clock::now();
  SolveState state = continuation_solve(*grid, *target, cfg.solve_config());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  fs::create_directories(out_dir);
  nlohmann::json summary = summary_json(cfg, *grid, state, wall);
  summary["timestamp"] = timestamp_utc();
  atomic_write_text(out_dir / "summary.json", json_to_string(summary));
  atomic_write_text(out_dir / "state.json",
                    json_to_string(state_json(cfg, *grid, state)));
  if (cfg.emit_csv) {
    atomic_write_text(out_dir / "fields.csv",
                      fields_csv(*grid, *target, state.u, state.c, state.t));
  }
  if (cfg.emit_svg) {
    const NodeFields f =
        node_fields(*grid, *target, state.u, state.c, state.t);
    atomic_write_text(out_dir / "u.svg", svg_heatmap(*grid, f.u, "u"));
    atomic_write_text(out_dir / "kappa_min.svg",
                      svg_heatmap(*grid, f.kappa_min, "kappa_min"));
    atomic_write_text(out_dir / "kappa_max.svg",
                      svg_heatmap(*grid, f.kappa_max, "kappa_max"));
    atomic_write_text(out_dir / "residual.svg",
                      svg_heatmap(*grid, f.residual, "residual"));
  }
  if (cfg.emit_dual && state.converged) {
    const auto grid_dual = std::make_shared<Grid>(target, cfg.n_r, cfg.n_phi);
    const DualField dual = legendre_transform(*grid, state.u, grid_dual,
                                              state.c, state.t);
    atomic_write_text(
        out_dir / "dual_fields.csv",
        fields_csv(*grid_dual, *source, dual.u_star, dual.c_dual, dual.t,
                   /*dual_flag=*/true, /*is_dual=*/true));
  }
  if (state_out) *state_out = state;
  if (runtime_out) *runtime_out = wall;
  return exit_code_for(state);
}

int cmd_solve(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path);
  const int code = run_single_solve(cfg, cfg.output_dir);
  if (code != kExitOk) {
    std::cerr << "solve: did not converge (partial trace persisted)\n";
  }
  return code;
}

int cmd_diagnose(const std::string& state_path, const std::string& out_arg) {
  LoadedState loaded = load_state(state_path);
  DiagnosticsReport report;
  try {
    report = run_diagnostics(*loaded.grid, *loaded.target, loaded.state);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path out_dir =
      out_arg.empty() ? fs::path(state_path).parent_path() : fs::path(out_arg);
  if (!out_dir.empty()) fs::create_directories(out_dir);
  atomic_write_text(out_dir / "diagnostics.json",
                    json_to_string(report.to_json()));
  return report.all_pass() ? kExitOk : kExitDiagnostics;
}

int cmd_oracle(double rho_src, double rho_tgt, int n, double t, double tol,
               int steps, const std::string& out_path) {
  const RadialProfile profile =
      radial_solve(rho_src, rho_tgt, n, t, tol, steps);
  std::printf("c = %.17g\n", profile.c);
  if (!out_path.empty()) {
    std::string csv = "r,phi,kappa_rad,kappa_tan\n";
    char buf[160];
    for (size_t i = 0; i < profile.r.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                    profile.r[i], profile.phi[i], profile.kappa_rad[i],
                    profile.kappa_tan[i]);
      csv += buf;
    }
    atomic_write_text(out_path, csv);
  }
  return kExitOk;
}

bool concentric_disc_pair(const RunConfig& cfg, double& rho_src,
                          double& rho_tgt) {
  const auto is_origin_disc = [](const nlohmann::json& d, double& radius) {
    if (d.value("type", "") != "disc") return false;
    if (d.contains("center")) {
      if (std::abs(d["center"].at(0).get<double>()) > 1e-14 ||
          std::abs(d["center"].at(1).get<double>()) > 1e-14) {
        return false;
      }
    }
    radius = d.at("radius").get<double>();
    return true;
  };
  return is_origin_disc(cfg.source_domain, rho_src) &&
         is_origin_disc(cfg.target_domain, rho_tgt);
}

int cmd_sweep(const std::string& config_path) {
  RunConfig cfg = load_run_config(config_path, /*require_resolutions=*/true);

  double c_oracle = 0.0;
  bool have_oracle = false;
  double rho_src = 0.0, rho_tgt = 0.0;
  if (concentric_disc_pair(cfg, rho_src, rho_tgt)) {
    c_oracle = radial_solve(rho_src, rho_tgt, 2, 1.0, 1e-10).c;
    have_oracle = true;
  }

  std::string csv = "resolution,c,error_vs_oracle,runtime_s\n";
  int worst = kExitOk;
  char buf[160];
  for (const auto& [n_r, n_phi] : cfg.resolutions) {
    RunConfig run_cfg = cfg;
    run_cfg.n_r = n_r;
    run_cfg.n_phi = n_phi;
    const fs::path sub = fs::path(cfg.output_dir) /
                         ("res_" + std::to_string(n_r) + "x" +
                          std::to_string(n_phi));
    SolveState state;
    double runtime = 0.0;
    int code = kExitConvergence;
    try {
      code = run_single_solve(run_cfg, sub, &state, &runtime);
    } catch (const std::exception& e) {
      std::cerr << "sweep " << n_r << "x" << n_phi << ": " << e.what()
                << "\n";
      code = kExitConfig;
    }
    worst = std::max(worst, code);
    std::string error_field;
    if (have_oracle && code == kExitOk) {
      std::snprintf(buf, sizeof(buf), "%.17g", std::abs(state.c - c_oracle));
      error_field = buf;
    }
    std::snprintf(buf, sizeof(buf), "%dx%d,%.17g,%s,%.3f\n", n_r, n_phi,
                  state.c, error_field.c_str(), runtime);
    csv += buf;
  }
  fs::create_directories(cfg.output_dir);
  atomic_write_text(fs::path(cfg.output_dir) / "sweep.csv", csv);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Homotopy continuation solver for the prescribed-gradient-image "
      "problem of the graph curvature potential equation"};
  app.require_subcommand(1);

  std::string solve_config;
  auto* solve =
      app.add_subcommand("solve", "run the continuation solver on a config");
  solve->add_option("config", solve_config, "JSON config path")->required();

  std::string diag_state, diag_out;
  auto* diagnose = app.add_subcommand(
      "diagnose", "certify a-priori estimates on a solved state");
  diagnose->add_option("state", diag_state, "state.json from solve")
      ->required();
  diagnose->add_option("--out", diag_out, "output directory");

  double rho_src = 1.0, rho_tgt = 1.0, oracle_t = 1.0, oracle_tol = 1e-10;
  int oracle_n = 2, oracle_steps = 1024;
  std::string oracle_out;
  auto* oracle = app.add_subcommand(
      "oracle", "radial shooting reference for concentric discs");
  oracle->add_option("--rho-src", rho_src, "source disc radius");
  oracle->add_option("--rho-tgt", rho_tgt, "target disc radius");
  oracle->add_option("--n", oracle_n, "dimension");
  oracle->add_option("--t", oracle_t, "homotopy parameter");
  oracle->add_option("--tol", oracle_tol, "shooting tolerance");
  oracle->add_option("--steps", oracle_steps, "RK4 step count");
  oracle->add_option("--out", oracle_out, "profile CSV path");

  std::string sweep_config;
  auto* sweep =
      app.add_subcommand("sweep", "solve across a resolution list");
  sweep->add_option("config", sweep_config, "JSON config path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_config);
    if (*diagnose) return cmd_diagnose(diag_state, diag_out);
    if (*oracle) {
      return cmd_oracle(rho_src, rho_tgt, oracle_n, oracle_t, oracle_tol,
                        oracle_steps, oracle_out);
    }
    if (*sweep) return cmd_sweep(sweep_config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConvexityLostError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvexity;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  }
  return kExitConfig;
}
