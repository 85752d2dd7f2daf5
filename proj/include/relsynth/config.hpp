#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsynth/abstraction.hpp"
#include "relsynth/games.hpp"
#include "relsynth/systems.hpp"

namespace relsynth {

inline constexpr std::string_view kVersion = "0.1.0";

struct PlanConfig {
  std::string kind = "exhaustive";  // exhaustive | random_rects | shifted_grids
  std::size_t samples = 0;
  double max_width_fraction = 1.0;
  std::vector<GridPass> passes{{2, 0}, {2, 1}};
  bool parallel = true;
};

struct ObjectiveConfig {
  Objective kind = Objective::kReach;
  /// Per state dimension name; absent dimensions are unconstrained. Empty
  /// means the system's default objective box.
  std::map<std::string, Interval> box;
  std::optional<EncodeMode> mode;
};

struct SolverConfig {
  std::size_t max_iters = 1000;
  std::size_t coarsen_threshold = 0;
  std::vector<std::vector<int>> downsample;  // coarse to fine; empty = plain solve
  double gc_growth = 2.0;
};

struct ExperimentConfig {
  std::vector<std::size_t> sample_counts{500, 1000, 2000, 4000, 8000, 16000, 32000};
  std::size_t threshold = 3000;
  int repeats = 1;
};

/// One run: system, abstraction plan, objective, solver options.
struct RunConfig {
  std::string system = "dubins";  // dubins | toy1d | custom
  std::vector<int> bits;          // empty = system default
  DubinsParams dubins;
  Toy1dParams toy;
  PlanConfig plan;
  ObjectiveConfig objective;
  SolverConfig solver;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;
  std::size_t node_limit = 0;
  /// false writes zero in every seconds column (byte-reproducible output).
  bool timing = true;
};

/// Parses and validates JSON text; throws ConfigError with the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved configuration as pretty-printed JSON.
std::string dump_config(const RunConfig& cfg);

System build_system(const RunConfig& cfg);
TraversalPlan make_plan(const RunConfig& cfg);
SolveOptions make_solve_options(const RunConfig& cfg, const System& sys);

}  // namespace relsynth
