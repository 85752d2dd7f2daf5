#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relsynth/interface.hpp"
#include "relsynth/spaces.hpp"

namespace relsynth {

enum class Objective { kReach, kSafe };

/// Dynamics as components F_k(i_k, x+_k) whose outputs partition x+, plus
/// the variable bookkeeping a solver needs.
struct GameSpec {
  std::vector<Interface> components;
  /// Elimination order for the decomposed predecessor, innermost first.
  /// Empty means listing order.
  std::vector<std::size_t> order;
  VarSet states;
  VarSet controls;
  VarSet nexts;
  std::vector<std::pair<VarId, VarId>> to_next;  // x -> x+
  Predicate control_domain;
  Objective objective = Objective::kReach;
  Interface target;  // T or S, a sink over (a subset of) x

  /// Variables and control domain taken from a symbolic space.
  static GameSpec from_space(const SymbolicSpace& space, std::vector<Interface> components,
                             Objective objective, Interface target);
};

/// Checks that component outputs partition x+ and the order is a
/// permutation; throws SignatureError otherwise.
void validate(const GameSpec& spec);

struct CpreResult {
  Interface winning;     // sink over x
  Interface controller;  // sink over x | u, restricted to valid controls
};

/// Monolithic: ihide(u, ohide(x+, comp(F, Z))) with u ranging over the
/// control domain. Z is a sink over x+.
CpreResult cpre_full(const Interface& f, const Interface& z_next, const VarSet& controls,
                     const Predicate& control_domain);
Interface cpre(const Interface& f, const Interface& z_next, const VarSet& controls,
               const Predicate& control_domain);

/// exists u (dom & exists x+ F & forall x+ (F => Z)), built from quantifiers.
Predicate cpre_direct(const Interface& f, const Interface& z_next, const VarSet& controls,
                      const Predicate& control_domain);

/// Folds ohide_comp over the components in `order` (innermost first).
CpreResult cpre_decomposed_full(std::span<const Interface> components, const std::vector<std::size_t>& order,
                                const Interface& z_next, const VarSet& controls,
                                const Predicate& control_domain);
Interface cpre_decomposed(std::span<const Interface> components, const std::vector<std::size_t>& order,
                          const Interface& z_next, const VarSet& controls, const Predicate& control_domain);

/// One predecessor step of a spec on a sink over x.
CpreResult spec_cpre(const GameSpec& spec, const Interface& z);

/// refine(cpre(F, Z'), T) and comp(cpre(F, Z'), S).
Interface reach_step(const GameSpec& spec, const Interface& z, const Interface& target);
Interface safe_step(const GameSpec& spec, const Interface& z, const Interface& safe);

/// Components grouped and composed: groups {{0,1,2}} is the monolithic F,
/// {{0,1},{2}} is (F01, F2). Groups must partition the indices.
std::vector<Interface> group_components(std::span<const Interface> components,
                                        const std::vector<std::vector<std::size_t>>& groups);

struct CoarsenPolicy {
  const SymbolicSpace* space = nullptr;
  std::size_t node_threshold = 0;  // 0 disables greedy coarsening
};

struct SolveOptions {
  std::size_t max_iters = 1000;
  CoarsenPolicy coarsen;
  bool keep_iterates = false;
  /// Sweep unreachable nodes after an iteration once the store has grown by
  /// this factor since the last sweep (0 disables).
  double gc_growth = 2.0;
};

struct TraceRow {
  std::size_t iter = 0;
  std::size_t nodes = 0;
  std::uint64_t states = 0;
  double seconds = 0.0;  // cpre step and coarsening, excluding trace counts
  std::size_t coarsen_events = 0;
  std::size_t max_nodes_after_coarsen = 0;
  int level = 0;
};

struct GameTrace {
  std::vector<TraceRow> rows;
  std::vector<Interface> iterates;  // filled when keep_iterates

  double step_seconds() const;
};

/// kCycle: with greedy coarsening on, an iterate repeated an earlier one.
enum class StopReason { kFixedPoint, kBudget, kCycle };
std::string to_string(StopReason r);

struct SolveResult {
  Interface winning;
  Interface controller;
  GameTrace trace;
  StopReason reason = StopReason::kBudget;
  double seconds = 0.0;  // wall time including trace bookkeeping
};

/// Z0 = bottom (reach) or S (safe), iterate to a fixed point or max_iters.
/// Each row records one computed iteration.
SolveResult solve(const GameSpec& spec, const SolveOptions& opts = {});

/// Starts from `z0` instead of the objective's initial set.
SolveResult solve_from(const GameSpec& spec, const Interface& z0, const SolveOptions& opts);

/// Input-coarsens a sink over x along state dimension d to `keep` bits,
/// going through the bit quantizer on the scratch copy of d.
Interface coarsen_sink_dim(const SymbolicSpace& space, const Interface& z, std::size_t d, int keep);

/// Coarsens a dynamics component to per-state-dimension precisions: x
/// inputs with icoarsen, x+ outputs with ocoarsen. Controls are untouched.
Interface coarsen_component(const SymbolicSpace& space, const Interface& f, const std::vector<int>& keep);

struct GreedyResult {
  Interface z;
  std::size_t events = 0;  // one-bit coarsenings applied
  std::vector<int> bits;   // remaining bits per state dimension
};

/// While node_count(Z) > threshold and some dimension has bits left,
/// coarsen by one bit the dimension whose trial keeps the most states
/// (ties: lowest index). Starts from full precision on every call.
GreedyResult greedy_coarsen(const SymbolicSpace& space, const Interface& z, std::size_t node_threshold);

/// Solves on a coarse-to-fine schedule of per-state-dimension precisions.
/// Dynamics and the running Z are coarsened to the current level; a stall
/// promotes to the next level seeded with the current Z.
SolveResult solve_downsampled(const GameSpec& spec, const SymbolicSpace& space,
                              const std::vector<std::vector<int>>& levels, const SolveOptions& opts = {});

/// `timing` false writes zero seconds so reruns are byte-identical.
void write_trace_csv(std::ostream& out, const GameTrace& trace, bool timing = true);

}  // namespace relsynth
