#include "relsynth/experiments.hpp"

#include <chrono>
#include <limits>
#include <optional>
#include <ostream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double shown(double s, bool timing) { return timing ? s : 0.0; }

SolveResult run_solve(const RunConfig& cfg, const System& sys, const GameSpec& spec) {
  SolveOptions opts = make_solve_options(cfg, sys);
  if (!cfg.solver.downsample.empty()) return solve_downsampled(spec, *sys.space, cfg.solver.downsample, opts);
  return solve(spec, opts);
}

std::string suffix(const std::string& name) { return name.rfind("F_", 0) == 0 ? name.substr(2) : name; }

}  // namespace

std::vector<BasinRow> run_basin_vs_samples(const RunConfig& cfg) {
  System sys = build_system(cfg);
  Manager& mgr = sys.space->manager();
  const std::uint64_t target = sys.space->state_count(objective_sink(sys).pred());
  std::vector<BasinRow> rows;
  auto leg = [&](const std::string& name, std::size_t samples, const TraversalPlan& plan) {
    BasinRow row{name, samples, 0, target};
    auto t0 = Clock::now();
    std::vector<Interface> comps = abstract_components(sys, plan);
    row.abstract_seconds = seconds_since(t0);
    SolveResult res = run_solve(cfg, sys, make_game(sys, std::move(comps)));
    row.solve_seconds = res.seconds;
    row.basin_states = sys.space->state_count(res.winning.pred());
    row.nodes = mgr.node_count(res.winning.pred());
    row.iterations = res.trace.rows.size();
    rows.push_back(row);
  };
  for (std::size_t n : cfg.experiment.sample_counts) {
    TraversalPlan plan = TraversalPlan::random_rects(n, cfg.seed, cfg.plan.max_width_fraction);
    plan.parallel = cfg.plan.parallel;
    leg("random_rects", n, plan);
    mgr.collect_garbage();
  }
  TraversalPlan ex = TraversalPlan::exhaustive();
  ex.parallel = cfg.plan.parallel;
  std::size_t cells = 0;
  for (const DynamicsComponent& c : sys.components) cells += plan_samples(layout(*sys.space, c), ex).size();
  leg("exhaustive", cells, ex);
  return rows;
}

void write_basin_csv(std::ostream& out, const std::vector<BasinRow>& rows, bool timing) {
  out << "plan,samples,basin_states,target_states,nodes,iterations,abstract_seconds,solve_seconds\n";
  for (const BasinRow& r : rows) {
    out << r.plan << ',' << r.samples << ',' << r.basin_states << ',' << r.target_states << ',' << r.nodes << ','
        << r.iterations << ',' << shown(r.abstract_seconds, timing) << ',' << shown(r.solve_seconds, timing) << '\n';
  }
}

std::vector<VariantRow> run_decomp_vs_mono(const RunConfig& cfg) {
  System sys = build_system(cfg);
  if (sys.components.size() != 3) throw ConfigError("decomp_vs_mono: needs a system with three components");
  Manager& mgr = sys.space->manager();
  std::vector<Interface> comps = abstract_components(sys, make_plan(cfg));
  std::vector<std::string> sfx;
  for (const DynamicsComponent& c : sys.components) sfx.push_back(suffix(c.name));

  struct Variant {
    std::string name;
    std::vector<std::vector<std::size_t>> groups;  // empty: no grouping
  };
  // Groups containing the innermost component come first.
  const std::vector<Variant> variants{
      {"F", {{0, 1, 2}}},
      {"F_" + sfx[1] + sfx[2] + ";F_" + sfx[0], {{1, 2}, {0}}},
      {"F_" + sfx[0] + sfx[2] + ";F_" + sfx[1], {{0, 2}, {1}}},
      {"F_" + sfx[0] + sfx[1] + ";F_" + sfx[2], {{2}, {0, 1}}},
      {"F_" + sfx[0] + ";F_" + sfx[1] + ";F_" + sfx[2], {}},
  };
  std::vector<VariantRow> rows;
  std::vector<Interface> winners;
  for (const Variant& v : variants) {
    VariantRow row;
    row.variant = v.name;
    mgr.collect_garbage();
    auto t0 = Clock::now();
    GameSpec spec = v.groups.empty() ? make_game(sys, comps) : make_game(sys, group_components(comps, v.groups));
    row.compose_seconds = v.groups.empty() ? 0.0 : seconds_since(t0);
    row.solve_seconds = std::numeric_limits<double>::infinity();
    std::optional<SolveResult> kept;
    for (int r = 0; r < cfg.experiment.repeats; ++r) {
      kept.reset();
      mgr.collect_garbage();  // cold computed cache for every run
      SolveResult res = run_solve(cfg, sys, spec);
      row.solve_seconds = std::min(row.solve_seconds, res.trace.step_seconds());
      kept = std::move(res);
    }
    row.basin_states = sys.space->state_count(kept->winning.pred());
    row.nodes = mgr.node_count(kept->winning.pred());
    row.iterations = kept->trace.rows.size();
    winners.push_back(kept->winning);
    rows.push_back(row);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].matches_decomposed = winners[i] == winners.back();
  return rows;
}

void write_variant_csv(std::ostream& out, const std::vector<VariantRow>& rows, bool timing) {
  out << "variant,basin_states,nodes,iterations,compose_seconds,solve_seconds,matches_decomposed\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const VariantRow& r = rows[i];
    out << r.variant << ',' << r.basin_states << ',' << r.nodes << ',' << r.iterations << ',';
    if (i + 1 == rows.size()) {
      out << "n/a";
    } else {
      out << shown(r.compose_seconds, timing);
    }
    out << ',' << shown(r.solve_seconds, timing) << ',' << (r.matches_decomposed ? 1 : 0) << '\n';
  }
}

GreedyReport run_greedy_cap(const RunConfig& cfg) {
  System sys = build_system(cfg);
  GameSpec spec = make_game(sys, abstract_components(sys, make_plan(cfg)));
  GreedyReport rep;

  SolveOptions opts = make_solve_options(cfg, sys);
  opts.coarsen.node_threshold = 0;
  SolveResult full = solve(spec, opts);
  rep.full = std::move(full.trace);
  rep.full_basin = sys.space->state_count(full.winning.pred());

  opts.coarsen.node_threshold = cfg.experiment.threshold;
  if (opts.coarsen.node_threshold == 0) throw ConfigError("greedy_cap: experiment.threshold must be positive");
  SolveResult capped = solve(spec, opts);
  rep.capped = std::move(capped.trace);
  rep.capped_basin = sys.space->state_count(capped.winning.pred());
  rep.capped_within_full = capped.winning.pred().entails(full.winning.pred());
  for (const TraceRow& r : rep.capped.rows) {
    rep.events += r.coarsen_events;
    if (r.coarsen_events > 0) rep.max_nodes_after_coarsen = std::max(rep.max_nodes_after_coarsen, r.max_nodes_after_coarsen);
  }
  return rep;
}

void write_greedy_csv(std::ostream& out, const GreedyReport& rep, bool timing) {
  out << "run,iter,nodes,states,seconds,coarsen_events,max_nodes_after_coarsen\n";
  auto rows = [&](const char* run, const GameTrace& t) {
    for (const TraceRow& r : t.rows) {
      out << run << ',' << r.iter << ',' << r.nodes << ',' << r.states << ',' << shown(r.seconds, timing) << ','
          << r.coarsen_events << ',' << r.max_nodes_after_coarsen << '\n';
    }
  };
  rows("capped", rep.capped);
  rows("full", rep.full);
}

}  // namespace relsynth
