#include "relsynth/games.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <ostream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Interface rename_sink(const Interface& z, const std::vector<std::pair<VarId, VarId>>& map) {
  std::vector<VarId> ins;
  for (VarId v : z.inputs()) {
    auto it = std::find_if(map.begin(), map.end(), [v](const auto& p) { return p.first == v; });
    if (it == map.end()) throw SignatureError("rename_sink: variable outside the rename map");
    ins.push_back(it->second);
  }
  return Interface::sink(VarSet(std::move(ins)), z.manager().rename(z.pred(), map));
}

CpreResult finish_cpre(const Interface& hidden, const VarSet& controls, const Predicate& control_domain) {
  // hidden is the (x, u) sink ohide(x+, comp(F, Z)); u ranges over valid codes only.
  Interface controller = Interface::sink(hidden.inputs() | controls, hidden.pred() & control_domain);
  Interface winning = ihide(controls, controller);
  return {std::move(winning), std::move(controller)};
}

std::vector<std::size_t> effective_order(const GameSpec& spec) {
  if (!spec.order.empty()) return spec.order;
  std::vector<std::size_t> order(spec.components.size());
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace

GameSpec GameSpec::from_space(const SymbolicSpace& space, std::vector<Interface> components, Objective objective,
                              Interface target) {
  return GameSpec{std::move(components), {},
                  space.state_vars(),   space.control_vars(),
                  space.next_vars(),    space.to_next(),
                  space.control_domain(), objective,
                  std::move(target)};
}

void validate(const GameSpec& spec) {
  if (spec.components.empty()) throw SignatureError("game: no dynamics components");
  VarSet seen;
  for (const Interface& f : spec.components) {
    if (!seen.disjoint(f.outputs())) throw SignatureError("game: components share outputs");
    seen = seen | f.outputs();
    if (!f.inputs().subset_of(spec.states | spec.controls)) {
      throw SignatureError("game: component inputs must be state or control variables");
    }
  }
  if (!(seen == spec.nexts)) throw SignatureError("game: component outputs must partition x+");
  if (!spec.order.empty()) {
    std::vector<std::size_t> sorted = spec.order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (sorted[k] != k || sorted.size() != spec.components.size()) {
        throw SignatureError("game: elimination order is not a permutation of the components");
      }
    }
  }
  if (!spec.target.is_sink() || !spec.target.inputs().subset_of(spec.states)) {
    throw SignatureError("game: objective set must be a sink over state variables");
  }
}

CpreResult cpre_full(const Interface& f, const Interface& z_next, const VarSet& controls,
                     const Predicate& control_domain) {
  if (!z_next.is_sink()) throw SignatureError("cpre: Z must be a sink");
  if (!z_next.inputs().subset_of(f.outputs())) throw SignatureError("cpre: Z must range over F's outputs");
  Interface hidden = ohide_comp(f.outputs(), f, z_next);
  return finish_cpre(hidden, controls, control_domain);
}

Interface cpre(const Interface& f, const Interface& z_next, const VarSet& controls,
               const Predicate& control_domain) {
  return cpre_full(f, z_next, controls, control_domain).winning;
}

Predicate cpre_direct(const Interface& f, const Interface& z_next, const VarSet& controls,
                      const Predicate& control_domain) {
  Manager& mgr = f.manager();
  const VarSet& xp = f.outputs();
  Predicate some = mgr.exists(xp, f.pred());
  Predicate all = mgr.forall(xp, f.pred().implies(z_next.pred()));
  return mgr.exists(controls, control_domain & some & all);
}

CpreResult cpre_decomposed_full(std::span<const Interface> components, const std::vector<std::size_t>& order,
                                const Interface& z_next, const VarSet& controls,
                                const Predicate& control_domain) {
  if (!z_next.is_sink()) throw SignatureError("cpre: Z must be a sink");
  if (order.size() != components.size()) throw SignatureError("cpre: order is not a permutation");
  std::vector<bool> used(components.size(), false);
  Interface acc = z_next;
  for (std::size_t k : order) {
    if (k >= components.size() || used[k]) throw SignatureError("cpre: order is not a permutation");
    used[k] = true;
    acc = ohide_comp(components[k].outputs(), components[k], acc);
  }
  if (!(acc.inputs() & z_next.inputs()).empty()) throw SignatureError("cpre: Z depends on unproduced outputs");
  return finish_cpre(acc, controls, control_domain);
}

Interface cpre_decomposed(std::span<const Interface> components, const std::vector<std::size_t>& order,
                          const Interface& z_next, const VarSet& controls, const Predicate& control_domain) {
  return cpre_decomposed_full(components, order, z_next, controls, control_domain).winning;
}

CpreResult spec_cpre(const GameSpec& spec, const Interface& z) {
  Interface z_next = rename_sink(z, spec.to_next);
  CpreResult r = spec.components.size() == 1
                     ? cpre_full(spec.components.front(), z_next, spec.controls, spec.control_domain)
                     : cpre_decomposed_full(spec.components, effective_order(spec), z_next, spec.controls,
                                            spec.control_domain);
  return {widen_sink(r.winning, spec.states), widen_sink(r.controller, spec.states | spec.controls)};
}

Interface reach_step(const GameSpec& spec, const Interface& z, const Interface& target) {
  Interface c = spec_cpre(spec, z).winning;
  return refine(c, widen_sink(target, spec.states));
}

Interface safe_step(const GameSpec& spec, const Interface& z, const Interface& safe) {
  Interface c = spec_cpre(spec, z).winning;
  return comp(c, widen_sink(safe, spec.states));
}

std::vector<Interface> group_components(std::span<const Interface> components,
                                        const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<bool> used(components.size(), false);
  std::vector<Interface> out;
  for (const auto& g : groups) {
    if (g.empty()) throw SignatureError("group_components: empty group");
    std::vector<Interface> parts;
    for (std::size_t k : g) {
      if (k >= components.size() || used[k]) throw SignatureError("group_components: groups must partition");
      used[k] = true;
      parts.push_back(components[k]);
    }
    out.push_back(comp(std::span<const Interface>(parts)));
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw SignatureError("group_components: groups must partition");
  }
  return out;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kFixedPoint:
      return "fixed_point";
    case StopReason::kCycle:
      return "cycle";
    default:
      return "budget";
  }
}

// ------------------------------------------------------------- coarsening

Interface coarsen_sink_dim(const SymbolicSpace& space, const Interface& z, std::size_t d, int keep) {
  const BitVector& fine = space.cur(d);
  const BitVector& coarse = space.scratch(d);
  if (keep >= static_cast<int>(fine.size())) return z;
  Manager& mgr = space.manager();
  Interface wide = widen_sink(z, z.inputs() | to_set(fine));
  Interface q = quantizer(mgr, fine, coarse, keep, QuantizerSide::kInput);
  Interface c = icoarsen(wide, q);
  std::vector<std::pair<VarId, VarId>> back;
  for (std::size_t k = 0; k < fine.size(); ++k) back.emplace_back(coarse[k], fine[k]);
  return Interface::sink(wide.inputs(), mgr.rename(c.pred(), back));
}

Interface coarsen_component(const SymbolicSpace& space, const Interface& f, const std::vector<int>& keep) {
  Manager& mgr = space.manager();
  Interface out = f;
  for (std::size_t d = 0; d < space.num_states() && d < keep.size(); ++d) {
    const BitVector& cur = space.cur(d);
    const BitVector& nxt = space.next(d);
    const BitVector& scr = space.scratch(d);
    // A component may read a prefix view of a dimension.
    int in_bits = 0;
    while (in_bits < static_cast<int>(cur.size()) && out.inputs().contains(cur[in_bits])) ++in_bits;
    if (in_bits > keep[d]) {
      BitVector fine = prefix(cur, in_bits), coarse = prefix(scr, in_bits);
      Interface c = icoarsen(out, quantizer(mgr, fine, coarse, keep[d], QuantizerSide::kInput));
      std::vector<std::pair<VarId, VarId>> back;
      for (int k = 0; k < in_bits; ++k) back.emplace_back(coarse[k], fine[k]);
      out = Interface(out.inputs(), out.outputs(), mgr.rename(c.pred(), back));
    }
    int out_bits = 0;
    while (out_bits < static_cast<int>(nxt.size()) && out.outputs().contains(nxt[out_bits])) ++out_bits;
    if (out_bits > keep[d]) {
      BitVector fine = prefix(nxt, out_bits), coarse = prefix(scr, out_bits);
      Interface c = ocoarsen(out, quantizer(mgr, fine, coarse, keep[d], QuantizerSide::kOutput));
      std::vector<std::pair<VarId, VarId>> back;
      for (int k = 0; k < out_bits; ++k) back.emplace_back(coarse[k], fine[k]);
      out = Interface(out.inputs(), out.outputs(), mgr.rename(c.pred(), back));
    }
  }
  return out;
}

GreedyResult greedy_coarsen(const SymbolicSpace& space, const Interface& z, std::size_t node_threshold) {
  Manager& mgr = space.manager();
  GreedyResult res{z, 0, {}};
  for (std::size_t d = 0; d < space.num_states(); ++d) res.bits.push_back(space.dim(d).bits());
  const VarSet all = space.state_vars();
  while (mgr.node_count(res.z.pred()) > node_threshold) {
    std::optional<Interface> best;
    std::size_t best_dim = 0;
    std::uint64_t best_states = 0;
    for (std::size_t d = 0; d < space.num_states(); ++d) {
      if (res.bits[d] == 0) continue;
      Interface trial = coarsen_sink_dim(space, res.z, d, res.bits[d] - 1);
      std::uint64_t states = mgr.sat_count(trial.pred(), all);
      if (!best || states > best_states) {
        best = std::move(trial);
        best_dim = d;
        best_states = states;
      }
    }
    if (!best) break;
    res.z = widen_sink(*best, all);
    --res.bits[best_dim];
    ++res.events;
  }
  return res;
}

// ----------------------------------------------------------------- solver

namespace {

struct Iteration {
  const GameSpec& spec;
  const SolveOptions& opts;
  Interface target;

  Iteration(const GameSpec& s, const SolveOptions& o)
      : spec(s), opts(o), target(widen_sink(s.target, s.states)) {}

  // One step; returns (Z_next, controller).
  CpreResult step(const Interface& z) const {
    CpreResult c = spec_cpre(spec, z);
    Interface next = spec.objective == Objective::kReach ? refine(c.winning, target) : comp(c.winning, target);
    return {std::move(next), std::move(c.controller)};
  }
};

void maybe_collect(Manager& mgr, const SolveOptions& opts, std::size_t& baseline) {
  if (opts.gc_growth <= 0.0) return;
  if (static_cast<double>(mgr.live_nodes()) > opts.gc_growth * static_cast<double>(std::max<std::size_t>(baseline, 1 << 16))) {
    mgr.collect_garbage();
    baseline = mgr.live_nodes();
  }
}

}  // namespace

SolveResult solve_from(const GameSpec& spec, const Interface& z0, const SolveOptions& opts) {
  validate(spec);
  const auto t0 = Clock::now();
  Manager& mgr = spec.target.manager();
  Iteration it(spec, opts);
  Interface z = widen_sink(z0, spec.states);
  SolveResult res{z, Interface::sink(spec.states | spec.controls, mgr.bot()), {}, StopReason::kBudget, 0.0};
  std::size_t gc_baseline = mgr.live_nodes();
  // Coarsened iterates need not grow monotonically and can cycle.
  std::vector<Interface> seen;
  for (std::size_t i = 1; i <= opts.max_iters; ++i) {
    const auto ts = Clock::now();
    CpreResult step = it.step(z);
    Interface next = std::move(step.winning);
    TraceRow row;
    row.iter = i;
    if (opts.coarsen.node_threshold > 0) {
      if (!opts.coarsen.space) throw ConfigError("solve: greedy coarsening needs a symbolic space");
      if (mgr.node_count(next.pred()) > opts.coarsen.node_threshold) {
        GreedyResult g = greedy_coarsen(*opts.coarsen.space, next, opts.coarsen.node_threshold);
        next = std::move(g.z);
        row.coarsen_events = g.events;
        row.max_nodes_after_coarsen = mgr.node_count(next.pred());
      }
    }
    row.seconds = seconds_since(ts);  // trace bookkeeping below is not timed
    row.nodes = mgr.node_count(next.pred());
    row.states = mgr.sat_count(next.pred(), spec.states);
    res.trace.rows.push_back(row);
    if (opts.keep_iterates) res.trace.iterates.push_back(next);
    res.controller = std::move(step.controller);
    bool fixed = next == z;
    bool cycled = !fixed && std::find(seen.begin(), seen.end(), next) != seen.end();
    if (opts.coarsen.node_threshold > 0) seen.push_back(z);
    z = std::move(next);
    if (fixed || cycled) {
      res.reason = fixed ? StopReason::kFixedPoint : StopReason::kCycle;
      break;
    }
    maybe_collect(mgr, opts, gc_baseline);
  }
  res.winning = z;
  res.seconds = seconds_since(t0);
  return res;
}

SolveResult solve(const GameSpec& spec, const SolveOptions& opts) {
  Manager& mgr = spec.target.manager();
  Interface z0 = spec.objective == Objective::kReach ? Interface::sink(spec.states, mgr.bot())
                                                     : widen_sink(spec.target, spec.states);
  return solve_from(spec, z0, opts);
}

SolveResult solve_downsampled(const GameSpec& spec, const SymbolicSpace& space,
                              const std::vector<std::vector<int>>& levels, const SolveOptions& opts) {
  if (levels.empty()) throw ConfigError("downsample: empty schedule");
  validate(spec);
  const auto t0 = Clock::now();
  Manager& mgr = space.manager();
  Interface z = spec.objective == Objective::kReach ? Interface::sink(spec.states, mgr.bot())
                                                    : widen_sink(spec.target, spec.states);
  SolveResult res{z, Interface::sink(spec.states | spec.controls, mgr.bot()), {}, StopReason::kBudget, 0.0};
  std::size_t iter = 0;
  std::size_t gc_baseline = mgr.live_nodes();
  for (std::size_t level = 0; level < levels.size(); ++level) {
    const std::vector<int>& keep = levels[level];
    if (keep.size() != space.num_states()) throw ConfigError("downsample: level width mismatch");
    GameSpec coarse = spec;
    for (Interface& f : coarse.components) f = coarsen_component(space, f, keep);
    Iteration it(coarse, opts);
    const bool finest = level + 1 == levels.size();
    bool stalled = false;
    while (iter < opts.max_iters) {
      const auto ts = Clock::now();
      CpreResult step = it.step(z);
      Interface next = std::move(step.winning);
      for (std::size_t d = 0; d < space.num_states(); ++d) next = coarsen_sink_dim(space, next, d, keep[d]);
      // Keep whatever was already won at a finer level.
      if (spec.objective == Objective::kReach) next = refine(next, z);
      TraceRow row;
      row.iter = ++iter;
      row.level = static_cast<int>(level);
      row.seconds = seconds_since(ts);
      row.nodes = mgr.node_count(next.pred());
      row.states = mgr.sat_count(next.pred(), spec.states);
      res.trace.rows.push_back(row);
      if (opts.keep_iterates) res.trace.iterates.push_back(next);
      res.controller = std::move(step.controller);
      stalled = next == z;
      z = std::move(next);
      if (stalled) break;
      maybe_collect(mgr, opts, gc_baseline);
    }
    if (!stalled) break;  // budget
    if (finest) res.reason = StopReason::kFixedPoint;
  }
  res.winning = z;
  res.seconds = seconds_since(t0);
  return res;
}

double GameTrace::step_seconds() const {
  double s = 0.0;
  for (const TraceRow& r : rows) s += r.seconds;
  return s;
}

void write_trace_csv(std::ostream& out, const GameTrace& trace, bool timing) {
  out << "iter,nodes,states,seconds,coarsen_events\n";
  for (const TraceRow& r : trace.rows) {
    out << r.iter << ',' << r.nodes << ',' << r.states << ',' << (timing ? r.seconds : 0.0) << ',' << r.coarsen_events
        << '\n';
  }
}

}  // namespace relsynth
