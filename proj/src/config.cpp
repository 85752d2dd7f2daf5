#include "relsynth/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Interval read_interval(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(where + ": expected [lo, hi]");
  }
  Interval iv{j[0].get<double>(), j[1].get<double>()};
  if (!(iv.lo <= iv.hi)) throw ConfigError(where + ": lo must not exceed hi");
  return iv;
}

EncodeMode read_mode(const std::string& s) {
  if (s == "inner") return EncodeMode::kInner;
  if (s == "outer") return EncodeMode::kOuter;
  throw ConfigError("objective.mode: expected 'inner' or 'outer', got '" + s + "'");
}

void parse_plan(const json& j, PlanConfig& p) {
  only_keys(j, "plan", {"kind", "samples", "max_width_fraction", "passes", "parallel"});
  read(j, "kind", p.kind, "plan");
  read(j, "samples", p.samples, "plan");
  read(j, "max_width_fraction", p.max_width_fraction, "plan");
  read(j, "parallel", p.parallel, "plan");
  if (j.contains("passes")) {
    p.passes.clear();
    for (const json& pass : j.at("passes")) {
      if (!pass.is_array() || pass.size() != 2) throw ConfigError("plan.passes: expected [cell_width, offset] pairs");
      p.passes.push_back({pass[0].get<std::uint64_t>(), pass[1].get<std::uint64_t>()});
    }
  }
  if (p.kind != "exhaustive" && p.kind != "random_rects" && p.kind != "shifted_grids") {
    throw ConfigError("plan.kind: unknown traversal '" + p.kind + "'");
  }
  if (p.max_width_fraction < 0.0 || p.max_width_fraction > 1.0) {
    throw ConfigError("plan.max_width_fraction: must lie in [0, 1]");
  }
  for (const GridPass& g : p.passes)
    if (g.cell_width == 0) throw ConfigError("plan.passes: zero cell width");
}

void parse_objective(const json& j, ObjectiveConfig& o) {
  only_keys(j, "objective", {"kind", "box", "mode"});
  if (j.contains("kind")) {
    std::string k = j.at("kind").get<std::string>();
    if (k == "reach") {
      o.kind = Objective::kReach;
    } else if (k == "safe") {
      o.kind = Objective::kSafe;
    } else {
      throw ConfigError("objective.kind: expected 'reach' or 'safe', got '" + k + "'");
    }
  }
  if (j.contains("mode")) o.mode = read_mode(j.at("mode").get<std::string>());
  if (j.contains("box")) {
    const json& b = j.at("box");
    if (!b.is_object()) throw ConfigError("objective.box: expected an object of [lo, hi] per dimension");
    for (const auto& [name, iv] : b.items()) o.box[name] = read_interval(iv, "objective.box." + name);
  }
}

void parse_solver(const json& j, SolverConfig& s) {
  only_keys(j, "solver", {"max_iters", "coarsen_threshold", "downsample", "gc_growth"});
  read(j, "max_iters", s.max_iters, "solver");
  read(j, "coarsen_threshold", s.coarsen_threshold, "solver");
  read(j, "downsample", s.downsample, "solver");
  read(j, "gc_growth", s.gc_growth, "solver");
}

void parse_experiment(const json& j, ExperimentConfig& e) {
  only_keys(j, "experiment", {"sample_counts", "threshold", "repeats"});
  read(j, "sample_counts", e.sample_counts, "experiment");
  read(j, "threshold", e.threshold, "experiment");
  read(j, "repeats", e.repeats, "experiment");
  if (e.repeats < 1) throw ConfigError("experiment.repeats: must be at least 1");
}

void parse_params(const json& j, RunConfig& cfg) {
  if (cfg.system == "toy1d") {
    only_keys(j, "params", {"lo", "hi", "controls"});
    read(j, "lo", cfg.toy.lo, "params");
    read(j, "hi", cfg.toy.hi, "params");
    read(j, "controls", cfg.toy.controls, "params");
    return;
  }
  only_keys(j, "params", {"length", "extent", "speeds", "turn_rates"});
  if (cfg.system == "custom") {
    for (const char* key : {"length", "extent", "speeds", "turn_rates"}) {
      if (!j.contains(key)) throw ConfigError(std::string("params.") + key + ": required for a custom system");
    }
  }
  read(j, "length", cfg.dubins.length, "params");
  read(j, "extent", cfg.dubins.extent, "params");
  read(j, "speeds", cfg.dubins.speeds, "params");
  read(j, "turn_rates", cfg.dubins.turn_rates, "params");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  only_keys(j, "config", {"version", "system", "bits", "params", "plan", "objective", "solver", "experiment", "seed",
                          "node_limit", "timing"});
  read(j, "system", cfg.system, "config");
  if (cfg.system != "dubins" && cfg.system != "toy1d" && cfg.system != "custom") {
    throw ConfigError("system: unknown system '" + cfg.system + "'");
  }
  if (cfg.system == "custom" && !j.contains("params")) throw ConfigError("params: required for a custom system");
  read(j, "bits", cfg.bits, "config");
  read(j, "seed", cfg.seed, "config");
  read(j, "node_limit", cfg.node_limit, "config");
  read(j, "timing", cfg.timing, "config");
  if (j.contains("params")) parse_params(j.at("params"), cfg);
  if (j.contains("plan")) parse_plan(j.at("plan"), cfg.plan);
  if (j.contains("objective")) parse_objective(j.at("objective"), cfg.objective);
  if (j.contains("solver")) parse_solver(j.at("solver"), cfg.solver);
  if (j.contains("experiment")) parse_experiment(j.at("experiment"), cfg.experiment);
  for (int b : cfg.bits)
    if (b < 1 || b > 20) throw ConfigError("bits: each entry must lie in [1, 20]");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& cfg) {
  json j;
  j["version"] = std::string(kVersion);
  j["system"] = cfg.system;
  j["bits"] = cfg.bits;
  if (cfg.system == "toy1d") {
    j["params"] = {{"lo", cfg.toy.lo}, {"hi", cfg.toy.hi}, {"controls", cfg.toy.controls}};
  } else {
    j["params"] = {{"length", cfg.dubins.length},
                   {"extent", cfg.dubins.extent},
                   {"speeds", cfg.dubins.speeds},
                   {"turn_rates", cfg.dubins.turn_rates}};
  }
  json passes = json::array();
  for (const GridPass& g : cfg.plan.passes) passes.push_back({g.cell_width, g.offset});
  j["plan"] = {{"kind", cfg.plan.kind},
               {"samples", cfg.plan.samples},
               {"max_width_fraction", cfg.plan.max_width_fraction},
               {"passes", passes},
               {"parallel", cfg.plan.parallel}};
  json box = json::object();
  for (const auto& [name, iv] : cfg.objective.box) box[name] = {iv.lo, iv.hi};
  j["objective"] = {{"kind", cfg.objective.kind == Objective::kReach ? "reach" : "safe"}, {"box", box}};
  if (cfg.objective.mode) j["objective"]["mode"] = *cfg.objective.mode == EncodeMode::kInner ? "inner" : "outer";
  j["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"coarsen_threshold", cfg.solver.coarsen_threshold},
                 {"downsample", cfg.solver.downsample},
                 {"gc_growth", cfg.solver.gc_growth}};
  j["experiment"] = {{"sample_counts", cfg.experiment.sample_counts},
                     {"threshold", cfg.experiment.threshold},
                     {"repeats", cfg.experiment.repeats}};
  j["seed"] = cfg.seed;
  j["node_limit"] = cfg.node_limit;
  j["timing"] = cfg.timing;
  return j.dump(2) + "\n";
}

System build_system(const RunConfig& cfg) {
  System sys;
  if (cfg.system == "toy1d") {
    Toy1dParams p = cfg.toy;
    if (!cfg.bits.empty()) {
      if (cfg.bits.size() != 1) throw ConfigError("bits: toy1d has one state dimension");
      p.bits = cfg.bits[0];
    }
    p.node_limit = cfg.node_limit;
    p.objective = cfg.objective.kind;
    sys = make_toy1d(p);
  } else {
    DubinsParams p = cfg.dubins;
    if (!cfg.bits.empty()) p.bits = cfg.bits;
    p.node_limit = cfg.node_limit;
    sys = make_dubins(p);
    sys.objective = cfg.objective.kind;
  }
  if (!cfg.objective.box.empty()) {
    sys.target.assign(sys.space->num_states(), std::nullopt);
    for (const auto& [name, iv] : cfg.objective.box) {
      auto d = sys.space->find_dim(name);
      if (!d || !sys.space->is_state(*d)) throw ConfigError("objective.box: unknown state dimension '" + name + "'");
      sys.target[*d] = iv;
    }
  }
  if (cfg.objective.mode) sys.target_mode = *cfg.objective.mode;
  return sys;
}

TraversalPlan make_plan(const RunConfig& cfg) {
  TraversalPlan plan;
  if (cfg.plan.kind == "random_rects") {
    plan = TraversalPlan::random_rects(cfg.plan.samples, cfg.seed, cfg.plan.max_width_fraction);
  } else if (cfg.plan.kind == "shifted_grids") {
    plan = TraversalPlan::shifted_grids(cfg.plan.passes);
  }
  plan.parallel = cfg.plan.parallel;
  return plan;
}

SolveOptions make_solve_options(const RunConfig& cfg, const System& sys) {
  SolveOptions opts;
  opts.max_iters = cfg.solver.max_iters;
  opts.gc_growth = cfg.solver.gc_growth;
  opts.coarsen = {sys.space.get(), cfg.solver.coarsen_threshold};
  for (const auto& level : cfg.solver.downsample) {
    if (level.size() != sys.space->num_states()) {
      throw ConfigError("solver.downsample: each level needs one entry per state dimension");
    }
  }
  return opts;
}

}  // namespace relsynth
