#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relsynth/config.hpp"

namespace relsynth {

/// Basin size against the number of random rectangles, with one final
/// exhaustive row for reference.
struct BasinRow {
  std::string plan;
  std::size_t samples = 0;
  std::uint64_t basin_states = 0;
  std::uint64_t target_states = 0;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  double abstract_seconds = 0.0;
  double solve_seconds = 0.0;
};
std::vector<BasinRow> run_basin_vs_samples(const RunConfig& cfg);
void write_basin_csv(std::ostream& out, const std::vector<BasinRow>& rows, bool timing);

/// One composition variant of the predecessor: the components grouped and
/// composed up front, then solved.
struct VariantRow {
  std::string variant;
  std::uint64_t basin_states = 0;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  double compose_seconds = 0.0;
  double solve_seconds = 0.0;  // summed iteration time, best of cfg.experiment.repeats
  bool matches_decomposed = false;
};
/// Rows: monolithic, three partial groupings, fully decomposed (needs a
/// three-component system).
std::vector<VariantRow> run_decomp_vs_mono(const RunConfig& cfg);
void write_variant_csv(std::ostream& out, const std::vector<VariantRow>& rows, bool timing);

/// Reach solve with greedy coarsening at cfg.experiment.threshold next to
/// the uncoarsened solve.
struct GreedyReport {
  GameTrace capped;
  GameTrace full;
  std::uint64_t capped_basin = 0;
  std::uint64_t full_basin = 0;
  bool capped_within_full = false;
  std::size_t max_nodes_after_coarsen = 0;
  std::size_t events = 0;
};
GreedyReport run_greedy_cap(const RunConfig& cfg);
void write_greedy_csv(std::ostream& out, const GreedyReport& report, bool timing);

}  // namespace relsynth
