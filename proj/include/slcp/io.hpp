#ifndef SLCP_IO_HPP
#define SLCP_IO_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "slcp/diagnostics.hpp"
#include "slcp/grid.hpp"
#include "slcp/solver.hpp"

// Batch front-end plumbing: config schema validation, machine-readable
// outputs (JSON summaries, CSV fields, serialized states) and static SVG
// heatmaps.  Every file is written atomically via temp-and-rename.

namespace slcp {

struct RunConfig {
  nlohmann::json source_domain;
  nlohmann::json target_domain;
  int n_r = 0;
  int n_phi = 0;
  bool adaptive = false;
  int homotopy_steps = 0;
  double min_step = 0.0;
  double newton_tol = 0.0;
  int newton_max_iter = 0;
  std::string output_dir;
  bool emit_csv = false;
  bool emit_svg = false;
  bool emit_dual = false;
  long seed = 0;
  std::vector<std::pair<int, int>> resolutions;  // sweep runs only

  SolveConfig solve_config() const;
};

/// Validates the config document field by field; throws ConfigError with a
/// precise message on the first violation.
RunConfig parse_run_config(const nlohmann::json& j,
                           bool require_resolutions = false);
RunConfig load_run_config(const std::filesystem::path& path,
                          bool require_resolutions = false);

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

/// fields.csv body with the exact header
/// i_r,i_phi,x,y,u,ux,uy,uxx,uxy,uyy,kappa1,kappa2,residual,is_boundary.
/// The dual flag appends an is_dual column instead.
std::string fields_csv(const Grid& grid, const Domain& target,
                       const Eigen::VectorXd& u, double c, double t,
                       bool dual_flag = false, bool is_dual = false);

nlohmann::json summary_json(const RunConfig& config, const Grid& grid,
                            const SolveState& state, double wall_time_s);

nlohmann::json state_json(const RunConfig& config, const Grid& grid,
                          const SolveState& state);

struct LoadedState {
  DomainPtr source;
  DomainPtr target;
  std::shared_ptr<Grid> grid;
  SolveState state;
};
/// Rebuilds grid and domains from a serialized state; throws ConfigError on
/// malformed or inconsistent input.
LoadedState load_state(const std::filesystem::path& path);

/// Per-cell colored quads over the chart; values are nodal.
std::string svg_heatmap(const Grid& grid, const Eigen::VectorXd& values,
                        const std::string& title);

std::string json_to_string(const nlohmann::json& j);

}  // namespace slcp

#endif  // SLCP_IO_HPP
