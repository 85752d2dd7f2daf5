#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "relsynth/spaces.hpp"

namespace relsynth {

/// Runs of consecutive linear state indices satisfying a predicate over
/// the current-state bits. The linear index concatenates the per-dimension
/// codes, first dimension most significant.
std::vector<std::pair<std::uint64_t, std::uint64_t>> state_runs(const SymbolicSpace& space, const Predicate& p);

/// Text dump: a `dims` line (name and code count per state dimension), a
/// `runs` count, then one `start length` line per run.
void write_cell_dump(std::ostream& out, const SymbolicSpace& space, const Predicate& p);

/// Grayscale ASCII PGM images of a state set: the first two state
/// dimensions as x (columns) and y (rows, increasing upward), one image per
/// cell of the third (any further dimensions are projected). Returns the
/// files written.
std::vector<std::filesystem::path> write_slices(const std::filesystem::path& dir, const SymbolicSpace& space,
                                                const Predicate& p);

}  // namespace relsynth
