// relsynth: build abstractions, solve reach/safe games, run experiments.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "relsynth/config.hpp"
#include "relsynth/errors.hpp"
#include "relsynth/experiments.hpp"
#include "relsynth/io.hpp"
#include "relsynth/report.hpp"

namespace fs = std::filesystem;
using namespace relsynth;

namespace {

constexpr int kConfigExit = 2;
constexpr int kResourceExit = 3;

struct Options {
  std::string config;
  std::string out = "out";
  std::string abstractions;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iters;
  std::optional<std::size_t> coarsen_threshold;
  bool no_timing = false;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.max_iters) cfg.solver.max_iters = *o.max_iters;
  if (o.coarsen_threshold) cfg.solver.coarsen_threshold = *o.coarsen_threshold;
  if (o.no_timing) cfg.timing = false;
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_resolved(const fs::path& dir, const RunConfig& cfg) {
  fs::create_directories(dir);
  open_out(dir / "config.json") << dump_config(cfg);
}

std::string fmt_seconds(double s, bool timing) {
  std::ostringstream o;
  o << (timing ? s : 0.0);
  return o.str();
}

int cmd_abstract(const Options& o) {
  RunConfig cfg = resolve(o);
  System sys = build_system(cfg);
  TraversalPlan plan = make_plan(cfg);
  const fs::path dir = o.out;
  write_resolved(dir, cfg);
  if (plan.kind == TraversalPlan::Kind::kRandomRects && plan.random.count == 0) {
    std::cerr << "warning: the plan visits no samples; every abstraction is bottom\n";
  }
  std::vector<TraverseStats> stats;
  std::vector<Interface> comps = abstract_components(sys, plan, &stats);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    std::map<std::string, std::string> meta{
        {"system", cfg.system},
        {"component", sys.components[k].name},
        {"plan", plan.describe()},
        {"seed", std::to_string(plan.kind == TraversalPlan::Kind::kRandomRects ? plan.random.seed : cfg.seed)},
        {"samples", std::to_string(stats[k].samples)},
        {"blocked", std::to_string(stats[k].blocked)},
        {"build_seconds", fmt_seconds(stats[k].kernel_seconds + stats[k].fold_seconds, cfg.timing)},
        {"version", std::string(kVersion)},
    };
    std::string bits;
    for (const Dimension& d : sys.space->dimensions()) {
      if (!bits.empty()) bits += ',';
      bits += d.name() + ':' + std::to_string(d.bits());
    }
    meta["bits"] = bits;
    const fs::path file = dir / (sys.components[k].name + ".rif");
    save_interface_file(file.string(), comps[k], sys.space->dimensions(), meta);
    std::cout << file.string() << ": " << stats[k].samples << " samples, " << stats[k].blocked << " blocked, "
              << sys.space->manager().node_count(comps[k].pred()) << " nodes\n";
  }
  return 0;
}

int cmd_solve(const Options& o) {
  RunConfig cfg = resolve(o);
  System sys = build_system(cfg);
  Manager& mgr = sys.space->manager();
  const fs::path dir = o.out;
  const fs::path from = o.abstractions.empty() ? dir : fs::path(o.abstractions);
  std::vector<Interface> comps;
  for (const DynamicsComponent& c : sys.components) {
    const fs::path file = from / (c.name + ".rif");
    if (!fs::exists(file)) throw ConfigError("missing abstraction file " + file.string());
    InterfaceFile header;
    comps.push_back(load_interface_file(file.string(), mgr, &header));
    check_dimensions(header, sys.space->dimensions());
  }
  write_resolved(dir, cfg);
  GameSpec spec = make_game(sys, std::move(comps));
  SolveOptions opts = make_solve_options(cfg, sys);
  SolveResult res = cfg.solver.downsample.empty() ? solve(spec, opts)
                                                  : solve_downsampled(spec, *sys.space, cfg.solver.downsample, opts);
  {
    std::ofstream trace = open_out(dir / "trace.csv");
    write_trace_csv(trace, res.trace, cfg.timing);
  }
  std::map<std::string, std::string> meta{{"stop", to_string(res.reason)}, {"version", std::string(kVersion)}};
  save_interface_file((dir / "winning.rif").string(), res.winning, sys.space->dimensions(), meta);
  save_interface_file((dir / "controller.rif").string(), res.controller, sys.space->dimensions(), meta);
  {
    std::ofstream dump = open_out(dir / "winning_cells.txt");
    write_cell_dump(dump, *sys.space, res.winning.pred());
  }
  write_slices(dir / "slices", *sys.space, res.winning.pred());
  const std::uint64_t basin = sys.space->state_count(res.winning.pred());
  const std::uint64_t target = sys.space->state_count(objective_sink(sys).pred());
  nlohmann::ordered_json summary{
      {"version", kVersion},
      {"stop", to_string(res.reason)},
      {"iterations", res.trace.rows.size()},
      {"basin_states", basin},
      {"target_states", target},
      {"nodes", mgr.node_count(res.winning.pred())},
      {"seconds", cfg.timing ? res.seconds : 0.0},
  };
  open_out(dir / "summary.json") << summary.dump(2) << '\n';
  std::cout << "stop=" << to_string(res.reason) << " iterations=" << res.trace.rows.size() << " basin=" << basin
            << " target=" << target << " seconds=" << fmt_seconds(res.seconds, cfg.timing) << '\n';
  return 0;
}

int cmd_experiment(const Options& o) {
  RunConfig cfg = resolve(o);
  const fs::path dir = o.out;
  write_resolved(dir, cfg);
  std::ofstream out = open_out(dir / (o.experiment + ".csv"));
  if (o.experiment == "basin_vs_samples") {
    write_basin_csv(out, run_basin_vs_samples(cfg), cfg.timing);
  } else if (o.experiment == "decomp_vs_mono") {
    write_variant_csv(out, run_decomp_vs_mono(cfg), cfg.timing);
  } else if (o.experiment == "greedy_cap") {
    GreedyReport rep = run_greedy_cap(cfg);
    write_greedy_csv(out, rep, cfg.timing);
    std::cout << "events=" << rep.events << " max_nodes_after_coarsen=" << rep.max_nodes_after_coarsen
              << " capped_basin=" << rep.capped_basin << " full_basin=" << rep.full_basin
              << " capped_within_full=" << (rep.capped_within_full ? "yes" : "no") << '\n';
  } else {
    throw ConfigError("unknown experiment '" + o.experiment + "'");
  }
  std::cout << (dir / (o.experiment + ".csv")).string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational-interface abstraction and controller synthesis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed (overrides the config)");
    sub->add_option("--max-iters", o.max_iters, "solver iteration budget (overrides the config)");
    sub->add_option("--coarsen-threshold", o.coarsen_threshold, "greedy coarsening node threshold, 0 = off");
    sub->add_flag("--no-timing", o.no_timing, "write zero for every measured time");
  };
  CLI::App* abs = app.add_subcommand("abstract", "build one abstraction file per dynamics component");
  common(abs);
  CLI::App* sol = app.add_subcommand("solve", "solve the game on saved abstractions");
  common(sol);
  sol->add_option("--abstractions", o.abstractions, "directory holding the abstraction files (default: --out)");
  CLI::App* exp = app.add_subcommand("experiment", "run basin_vs_samples, decomp_vs_mono or greedy_cap");
  exp->add_option("name", o.experiment, "experiment name")->required();
  common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }
  try {
    if (*abs) return cmd_abstract(o);
    if (*sol) return cmd_solve(o);
    return cmd_experiment(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const SignatureError& e) {
    std::cerr << "signature error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResourceExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
