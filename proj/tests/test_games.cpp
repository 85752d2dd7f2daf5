#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "relsynth/errors.hpp"
#include "relsynth/games.hpp"
#include "relsynth/systems.hpp"
#include "support.hpp"

using namespace relsynth;
using namespace relsynth::testing;

namespace {

// x0..x3 (0..3), u0 u1 (4, 5), n0..n3 (6..9) with xi -> ni.
struct Small {
  Manager mgr{std::vector<std::string>{"x0", "x1", "x2", "x3", "u0", "u1", "n0", "n1", "n2", "n3"}};
  VarSet x{0, 1, 2, 3}, u{4, 5}, n{6, 7, 8, 9};
  std::vector<std::pair<VarId, VarId>> to_next{{0, 6}, {1, 7}, {2, 8}, {3, 9}};

  Predicate random_domain(std::mt19937_64& rng) {
    Predicate d = random_predicate(mgr, {4, 5}, rng, 0.6);
    return d.is_false() ? mgr.var(4) : d;
  }
  // Components with outputs {n0}, {n1, n2}, {n3}, each reading a random
  // subset of x and u.
  std::vector<Interface> random_components(std::mt19937_64& rng, double density = 0.6) {
    std::vector<VarSet> outs{VarSet{6}, VarSet{7, 8}, VarSet{9}};
    std::vector<Interface> out;
    for (const VarSet& o : outs) {
      std::vector<VarId> in;
      const VarSet candidates = x | u;
      for (VarId v : candidates.ids())
        if (rng() % 3 != 0) in.push_back(v);
      out.push_back(random_interface(mgr, VarSet(in), o, rng, density));
    }
    return out;
  }
  GameSpec spec(std::vector<Interface> comps, Objective obj, Interface target, Predicate dom) {
    return GameSpec{std::move(comps), {}, x, u, n, to_next, std::move(dom), obj, std::move(target)};
  }
};

std::set<std::uint64_t> cells_of(const SymbolicSpace& space, const Predicate& p) {
  // One-dimensional spaces only.
  std::set<std::uint64_t> out;
  Manager& mgr = space.manager();
  const Dimension& d = space.dim(0);
  for (std::uint64_t k = 0; k < d.num_cells(); ++k) {
    Predicate cell = encode_cell(mgr, d, k, space.cur(0));
    if ((cell & p) == cell) out.insert(k);
  }
  return out;
}

}  // namespace

TEST_CASE("controlled predecessor on a one-bit system") {
  Manager mgr({"x", "u", "xp"});
  Predicate x = mgr.var("x"), u = mgr.var("u"), xp = mgr.var("xp");
  Interface f({0, 1}, {2}, xp.iff(x & u));
  Interface z = Interface::sink({2}, xp);
  CHECK(cpre(f, z, {1}, mgr.top()).pred() == x);
  CHECK(cpre_direct(f, z, {1}, mgr.top()) == x);
  CHECK(cpre(f, Interface::sink({2}, mgr.bot()), {1}, mgr.top()).pred().is_false());
  // Z = top: any nonblocking u suffices.
  Interface partial({0, 1}, {2}, xp.iff(x) & u);
  CHECK(cpre(partial, Interface::sink({2}, mgr.top()), {1}, mgr.top()).pred().is_true());
  CHECK(cpre(partial, Interface::sink({2}, mgr.top()), {1}, !u).pred().is_false());
  CHECK_THROWS_AS(cpre(f, Interface({0}, {2}, x), {1}, mgr.top()), SignatureError);
}

TEST_CASE("composite predecessor equals the quantifier formula") {
  Small s;
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    Interface f(s.x | s.u, s.n, random_predicate(s.mgr, ids(s.x | s.u, s.n), rng, 0.3 + 0.4 * (t % 3) / 2.0));
    Interface z = Interface::sink(s.n, random_predicate(s.mgr, s.n.ids(), rng, 0.7));
    Predicate dom = s.random_domain(rng);
    CHECK(cpre(f, z, s.u, dom).pred() == cpre_direct(f, z, s.u, dom));
  }
}

TEST_CASE("predecessor is monotone in the target") {
  Small s;
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    Interface f(s.x | s.u, s.n, random_predicate(s.mgr, ids(s.x | s.u, s.n), rng, 0.4));
    Predicate zp = random_predicate(s.mgr, s.n.ids(), rng, 0.5);
    Predicate zbig = zp | random_predicate(s.mgr, s.n.ids(), rng, 0.3);
    Predicate dom = s.random_domain(rng);
    Predicate a = cpre(f, Interface::sink(s.n, zp), s.u, dom).pred();
    Predicate b = cpre(f, Interface::sink(s.n, zbig), s.u, dom).pred();
    CHECK(a.implies(b).is_true());
  }
}

TEST_CASE("decomposed predecessor equals monolithic for every order") {
  Small s;
  std::mt19937_64 rng(43);
  for (int t = 0; t < 50; ++t) {
    std::vector<Interface> comps = s.random_components(rng);
    Interface mono = group_components(comps, {{0, 1, 2}}).front();
    Interface z = Interface::sink(s.n, random_predicate(s.mgr, s.n.ids(), rng, 0.7));
    Predicate dom = s.random_domain(rng);
    Predicate expect = widen_sink(cpre(mono, z, s.u, dom), s.x).pred();
    std::vector<std::size_t> order{0, 1, 2};
    do {
      CpreResult r = cpre_decomposed_full(comps, order, z, s.u, dom);
      CHECK(r.winning.pred() == expect);
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(cpre_decomposed(std::span<const Interface>(comps.data(), 1), {0},
                          Interface::sink({6}, s.mgr.var(6)), s.u, dom) ==
          cpre(comps[0], Interface::sink({6}, s.mgr.var(6)), s.u, dom));
  }
  std::vector<Interface> comps = s.random_components(rng);
  Interface z = Interface::sink(s.n, s.mgr.top());
  CHECK_THROWS_AS(cpre_decomposed(comps, {0, 0, 1}, z, s.u, s.mgr.top()), SignatureError);
  CHECK_THROWS_AS(cpre_decomposed(comps, {0, 1}, z, s.u, s.mgr.top()), SignatureError);
}

TEST_CASE("independent subsystems give the product predecessor") {
  Manager mgr({"a", "b", "u", "w", "ap", "bp"});
  Predicate a = mgr.var("a"), b = mgr.var("b"), u = mgr.var("u"), w = mgr.var("w");
  Predicate ap = mgr.var("ap"), bp = mgr.var("bp");
  Interface fa({0, 2}, {4}, ap.iff(a ^ u));
  Interface fb({1, 3}, {5}, bp.iff(b & w));
  Interface za = Interface::sink({4}, ap), zb = Interface::sink({5}, bp);
  Predicate whole = cpre_decomposed(std::vector<Interface>{fa, fb}, {1, 0}, Interface::sink({4, 5}, ap & bp), {2, 3}, mgr.top()).pred();
  Predicate pa = cpre(fa, za, {2}, mgr.top()).pred(), pb = cpre(fb, zb, {3}, mgr.top()).pred();
  CHECK(pa.is_true());
  CHECK(pb == b);
  CHECK(whole == (pa & pb));
}

TEST_CASE("decomposed equals monolithic on the 4-bit vehicle") {
  System sys = make_dubins({.bits = {4, 4, 4}});
  std::vector<Interface> comps = abstract_components(sys, TraversalPlan::exhaustive());
  GameSpec decomposed = make_game(sys, comps);
  SolveResult ref = solve(decomposed);
  CHECK(ref.reason == StopReason::kFixedPoint);
  CHECK(sys.space->state_count(ref.winning.pred()) > 0);
  std::vector<std::vector<std::vector<std::size_t>>> variants{
      {{0, 1, 2}}, {{0, 1}, {2}}, {{0, 2}, {1}}, {{1, 2}, {0}}};
  for (const auto& g : variants) {
    GameSpec spec = make_game(sys, group_components(comps, g));
    spec.order.clear();
    CHECK(solve(spec).winning == ref.winning);
  }
  std::vector<std::size_t> order{0, 1, 2};
  do {
    decomposed.order = order;
    CHECK(spec_cpre(decomposed, ref.winning).winning ==
          spec_cpre(make_game(sys, group_components(comps, {{0, 1, 2}})), ref.winning).winning);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("identity dynamics: reach and safe fixed points") {
  System sys = make_toy1d({.bits = 3});
  GameSpec reach = make_game(sys, abstract_components(sys, TraversalPlan::exhaustive()));
  Interface t = objective_sink(sys);
  CHECK(sys.space->state_count(t.pred()) == 4);
  SolveResult r = solve(reach);
  CHECK(r.reason == StopReason::kFixedPoint);
  CHECK(r.trace.rows.size() == 2);
  CHECK(r.winning == t);
  CHECK(r.trace.rows[0].states == 4);

  GameSpec safe = reach;
  safe.objective = Objective::kSafe;
  SolveResult s = solve(safe);
  CHECK(s.reason == StopReason::kFixedPoint);
  CHECK(s.winning == t);
  CHECK(s.trace.rows.size() == 1);

  safe.target = sys.space->state_sink(sys.space->manager().bot());
  CHECK(solve(safe).winning.pred().is_false());

  SolveResult none = solve(reach, {.max_iters = 0});
  CHECK(none.reason == StopReason::kBudget);
  CHECK(none.trace.rows.empty());
  CHECK(none.winning.pred().is_false());
  SolveResult one = solve(reach, {.max_iters = 1});
  CHECK(one.reason == StopReason::kBudget);
  CHECK(one.winning == t);
}

TEST_CASE("drifting toy matches explicit enumeration") {
  for (Objective obj : {Objective::kSafe, Objective::kReach}) {
    Toy1dParams p{.bits = 3, .controls = {0.125, 0.25}, .objective = obj};
    p.target = obj == Objective::kSafe ? Interval{0.0, 1.0} : Interval{0.5, 1.0};
    System sys = make_toy1d(p);
    const Dimension& d = sys.space->dim(0);
    GameSpec spec = make_game(sys, abstract_components(sys, TraversalPlan::exhaustive()));
    SolveResult res = solve(spec, {.keep_iterates = true});
    REQUIRE(res.reason == StopReason::kFixedPoint);

    // Explicit oracle on cell indices: successor of cell k under u is the
    // cell of its left edge shifted by u, or none if it leaves [0, 1).
    std::set<std::uint64_t> target;
    for (std::uint64_t k = 0; k < 8; ++k)
      if (d.cell_lo(k) >= p.target.lo && d.cell_lo(k + 1) <= p.target.hi) target.insert(k);
    std::set<std::uint64_t> z = obj == Objective::kSafe ? target : std::set<std::uint64_t>{};
    for (std::size_t i = 0; i < res.trace.iterates.size(); ++i) {
      std::set<std::uint64_t> pre;
      for (std::uint64_t k = 0; k < 8; ++k) {
        for (double u : p.controls) {
          double lo = d.cell_lo(k) + u;
          if (lo + d.cell_width() > 1.0) continue;
          if (z.count(cell_of(d, lo))) pre.insert(k);
        }
      }
      std::set<std::uint64_t> next;
      if (obj == Objective::kSafe) {
        std::set_intersection(pre.begin(), pre.end(), target.begin(), target.end(), std::inserter(next, next.end()));
      } else {
        std::set_union(pre.begin(), pre.end(), target.begin(), target.end(), std::inserter(next, next.end()));
      }
      z = next;
      CHECK(cells_of(*sys.space, res.trace.iterates[i].pred()) == z);
      CHECK(res.trace.rows[i].states == z.size());
    }
    if (obj == Objective::kSafe) {
      CHECK(res.winning.pred().is_false());
      for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
        CHECK(res.trace.rows[i].states <= res.trace.rows[i - 1].states);
    } else {
      CHECK(sys.space->state_count(res.winning.pred()) == 8);
    }
  }
}

TEST_CASE("controller relation is consistent with the winning set") {
  System sys = make_dubins({.bits = {4, 4, 4}});
  GameSpec spec = make_game(sys, abstract_components(sys, TraversalPlan::exhaustive()));
  SolveResult res = solve(spec);
  CpreResult last = spec_cpre(spec, res.winning);
  CHECK(res.controller == last.controller);
  CHECK(widen_sink(ihide(spec.controls, res.controller), spec.states).pred() == last.winning.pred());
  CHECK(res.controller.pred().implies(spec.control_domain).is_true());
  // Reach traces grow.
  for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
    CHECK(res.trace.rows[i].states >= res.trace.rows[i - 1].states);
  std::ostringstream csv;
  write_trace_csv(csv, res.trace);
  const std::string text = csv.str();
  CHECK(text.rfind("iter,nodes,states,seconds,coarsen_events\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(res.trace.rows.size() + 1));
}

TEST_CASE("abstract dynamics win no more than concrete dynamics") {
  Small s;
  std::mt19937_64 rng(44);
  for (int t = 0; t < 60; ++t) {
    std::vector<Interface> comps = s.random_components(rng, 0.7);
    std::vector<Interface> abstract;
    for (const Interface& f : comps) abstract.push_back(random_abstraction(f, rng, 0.2, 0.1));
    Predicate dom = s.random_domain(rng);
    Objective obj = t % 2 ? Objective::kReach : Objective::kSafe;
    Interface target = Interface::sink(s.x, random_predicate(s.mgr, s.x.ids(), rng, obj == Objective::kSafe ? 0.8 : 0.3));
    SolveResult concrete = solve(s.spec(comps, obj, target, dom));
    SolveResult coarse = solve(s.spec(abstract, obj, target, dom));
    CHECK(coarse.winning.pred().implies(concrete.winning.pred()).is_true());
  }
}

TEST_CASE("greedy coarsening") {
  SymbolicSpace space({Dimension::continuous("a", 0, 1, 3), Dimension::continuous("b", 0, 1, 3)}, {});
  Manager& mgr = space.manager();
  Predicate odd = mgr.var(space.cur(0)[2]);
  Interface z = space.state_sink(odd);

  GreedyResult same = greedy_coarsen(space, z, 10);
  CHECK(same.events == 0);
  CHECK(same.z == z);

  // The unconstrained dimension goes first, then a collapses the set.
  GreedyResult g = greedy_coarsen(space, z, 0);
  CHECK(g.bits == std::vector<int>{2, 0});
  CHECK(g.events == 4);
  CHECK(g.z.pred().is_false());

  GreedyResult top = greedy_coarsen(space, space.state_sink(mgr.top()), 0);
  CHECK(top.z.pred().is_true());
  CHECK(top.bits == std::vector<int>{3, 3});  // already within the threshold

  std::mt19937_64 rng(45);
  for (int t = 0; t < 50; ++t) {
    Predicate p = random_predicate(mgr, space.state_vars().ids(), rng, 0.7);
    std::size_t threshold = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
    GreedyResult r = greedy_coarsen(space, space.state_sink(p), threshold);
    CHECK(r.z.pred().implies(p).is_true());
    bool exhausted = std::all_of(r.bits.begin(), r.bits.end(), [](int b) { return b == 0; });
    CHECK((mgr.node_count(r.z.pred()) <= threshold || exhausted));
  }
}

TEST_CASE("coarsening a sink dimension keeps fully covered coarse cells") {
  SymbolicSpace space({Dimension::continuous("a", 0, 1, 3), Dimension::continuous("b", 0, 1, 2)}, {});
  Manager& mgr = space.manager();
  std::mt19937_64 rng(46);
  for (int t = 0; t < 50; ++t) {
    Predicate p = random_predicate(mgr, space.state_vars().ids(), rng, 0.8);
    Interface z = space.state_sink(p);
    for (int keep = 0; keep <= 3; ++keep) {
      VarSet lsb(BitVector(space.cur(0).begin() + keep, space.cur(0).end()));
      CHECK(coarsen_sink_dim(space, z, 0, keep).pred() == mgr.forall(lsb, p));
    }
  }
}

TEST_CASE("solver with greedy coarsening stays under the cap") {
  System sys = make_dubins({.bits = {5, 5, 5}});
  GameSpec spec = make_game(sys, abstract_components(sys, TraversalPlan::exhaustive()));
  SolveResult full = solve(spec);
  SolveOptions opts;
  opts.coarsen = {sys.space.get(), 300};
  SolveResult capped = solve(spec, opts);
  std::size_t events = 0;
  for (const TraceRow& row : capped.trace.rows) {
    events += row.coarsen_events;
    if (row.coarsen_events > 0) CHECK(row.max_nodes_after_coarsen <= 300);
  }
  CHECK(events > 0);
  CHECK(capped.winning.pred().implies(full.winning.pred()).is_true());
  // Stops on a repeat long before the budget.
  CHECK(capped.reason != StopReason::kBudget);
  CHECK(capped.trace.rows.size() < 100);
  if (capped.reason == StopReason::kCycle) {
    std::vector<Interface> iters = solve(spec, {.max_iters = capped.trace.rows.size(), .coarsen = opts.coarsen,
                                                .keep_iterates = true})
                                       .trace.iterates;
    CHECK(std::count(iters.begin(), iters.end(), iters.back()) == 2);
  }
  SolveOptions bad;
  bad.coarsen.node_threshold = 10;
  CHECK_THROWS_AS(solve(spec, bad), ConfigError);
}

TEST_CASE("downsampled solve under-approximates the finest basin") {
  System sys = make_dubins({.bits = {4, 4, 4}});
  GameSpec spec = make_game(sys, abstract_components(sys, TraversalPlan::exhaustive()));
  SolveResult fine = solve(spec);
  SolveResult one = solve_downsampled(spec, *sys.space, {{4, 4, 4}});
  CHECK(one.winning == fine.winning);
  CHECK(one.reason == StopReason::kFixedPoint);

  SolveResult coarse_only = solve_downsampled(spec, *sys.space, {{3, 3, 3}});
  SolveResult two = solve_downsampled(spec, *sys.space, {{3, 3, 3}, {4, 4, 4}});
  CHECK(two.reason == StopReason::kFixedPoint);
  CHECK(two.winning.pred().implies(fine.winning.pred()).is_true());
  CHECK(coarse_only.winning.pred().implies(two.winning.pred()).is_true());
  CHECK(sys.space->state_count(two.winning.pred()) >= sys.space->state_count(coarse_only.winning.pred()));
  CHECK(two.trace.rows.back().level == 1);

  SolveResult three = solve_downsampled(spec, *sys.space, {{2, 2, 2}, {3, 3, 4}, {4, 4, 4}});
  CHECK(three.winning.pred().implies(fine.winning.pred()).is_true());
  CHECK_THROWS_AS(solve_downsampled(spec, *sys.space, {}), ConfigError);
  CHECK_THROWS_AS(solve_downsampled(spec, *sys.space, {{4, 4}}), ConfigError);
}

TEST_CASE("game validation") {
  Small s;
  std::mt19937_64 rng(47);
  std::vector<Interface> comps = s.random_components(rng);
  Interface target = Interface::sink(s.x, s.mgr.var(0));
  CHECK_NOTHROW(validate(s.spec(comps, Objective::kReach, target, s.mgr.top())));
  std::vector<Interface> missing(comps.begin(), comps.begin() + 2);
  CHECK_THROWS_AS(validate(s.spec(missing, Objective::kReach, target, s.mgr.top())), SignatureError);
  GameSpec bad_order = s.spec(comps, Objective::kReach, target, s.mgr.top());
  bad_order.order = {0, 2, 2};
  CHECK_THROWS_AS(validate(bad_order), SignatureError);
  CHECK_THROWS_AS(validate(s.spec(comps, Objective::kReach, Interface::sink({6}, s.mgr.var(6)), s.mgr.top())),
                  SignatureError);
}
