#include <doctest.h>

#include <random>
#include <sstream>

#include "relsynth/errors.hpp"
#include "relsynth/interface.hpp"
#include "relsynth/io.hpp"
#include "relsynth/spaces.hpp"
#include "support.hpp"

using namespace relsynth;
using namespace relsynth::testing;

namespace {

// Random split of `pool` into (inputs, outputs, unused).
struct Split {
  VarSet in, out;
};
Split random_split(const std::vector<VarId>& pool, std::mt19937_64& rng, int max_in = 4, int max_out = 3) {
  std::vector<VarId> p = pool;
  std::shuffle(p.begin(), p.end(), rng);
  int ni = std::uniform_int_distribution<int>(0, max_in)(rng);
  int no = std::uniform_int_distribution<int>(1, max_out)(rng);
  std::vector<VarId> in(p.begin(), p.begin() + ni), out(p.begin() + ni, p.begin() + ni + no);
  return {VarSet(in), VarSet(out)};
}

std::vector<VarId> range_ids(VarId from, VarId to) {
  std::vector<VarId> out;
  for (VarId v = from; v < to; ++v) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("interface construction checks the signature") {
  Manager mgr({"i", "o", "z"});
  Predicate i = mgr.var("i"), o = mgr.var("o"), z = mgr.var("z");
  CHECK_NOTHROW(Interface({0}, {1}, i & o));
  CHECK_THROWS_AS(Interface({0}, {0}, i), SignatureError);
  CHECK_THROWS_AS(Interface({0}, {1}, i & z), SignatureError);
  CHECK(Interface::sink({0}, i).is_sink());
  CHECK(Interface::source({1}, o).is_source());
}

TEST_CASE("ohide, nb and ihide examples") {
  Manager mgr({"i", "o", "o1", "o2", "a", "b"});
  Predicate i = mgr.var("i"), o = mgr.var("o"), o1 = mgr.var("o1"), o2 = mgr.var("o2");
  Interface f({0}, {1}, o.iff(i));
  Interface hidden = ohide({1}, f);
  CHECK(hidden.is_sink());
  CHECK(hidden.pred().is_true());
  CHECK(ohide({}, f) == f);
  Interface g({0}, {2, 3}, o1.iff(i) & o2.iff(!i));
  Interface h = ohide({2}, g);
  CHECK(h.outputs() == VarSet{3});
  CHECK(h.pred() == o2.iff(!i));
  CHECK_THROWS_AS(ohide({0}, g), SignatureError);

  CHECK(nb(Interface({0}, {1}, i & o)).pred() == i);
  CHECK(nb(Interface::source({1}, mgr.bot())).pred().is_false());
  CHECK(nb(Interface::source({1}, o)).pred().is_true());
  Interface sink = Interface::sink({0}, i);
  CHECK(nb(sink) == sink);

  Predicate a = mgr.var("a"), b = mgr.var("b");
  Interface ab = Interface::sink({4, 5}, a & b);
  CHECK(ihide({5}, ab) == Interface::sink({4}, a));
  CHECK(ihide({4}, Interface::sink({4, 5}, mgr.bot())).pred().is_false());
  CHECK_THROWS_AS(ihide({0}, f), SignatureError);
}

TEST_CASE("comp examples") {
  Manager mgr({"a", "b", "o1", "o2", "i", "o", "t"});
  Predicate a = mgr.var("a"), b = mgr.var("b"), o1 = mgr.var("o1"), o2 = mgr.var("o2");
  Predicate i = mgr.var("i"), o = mgr.var("o"), t = mgr.var("t");
  Interface f1({0}, {2}, a.iff(o1)), f2({1}, {3}, b.iff(o2));
  Interface par = comp(f1, f2);
  CHECK(par.pred() == (f1.pred() & f2.pred()));
  CHECK(par.inputs() == VarSet{0, 1});
  CHECK(par.outputs() == VarSet{2, 3});

  // Adversarial blocking: every i may produce the o that F2 rejects.
  Interface top({4}, {5}, mgr.top()), rej = Interface::sink({5}, !o);
  Interface blocked = comp(top, rej);
  CHECK(blocked.pred().is_false());
  CHECK(blocked.inputs() == VarSet{4});
  CHECK(blocked.outputs() == VarSet{5});

  Interface g1({4}, {5}, o.iff(i)), g2({5}, {6}, t.iff(!o));
  Interface series = comp(g1, g2);
  CHECK(series.pred() == (o.iff(i) & t.iff(!o)));
  CHECK(series.inputs() == VarSet{4});
  CHECK(series.outputs() == VarSet{5, 6});
  // Argument order does not matter.
  CHECK(comp(g2, g1) == series);

  CHECK_THROWS_AS(comp(Interface({4}, {5}, mgr.top()), Interface({5}, {4}, mgr.top())), SignatureError);
  CHECK_THROWS_AS(comp(Interface({0}, {5}, mgr.top()), Interface({1}, {5}, mgr.top())), SignatureError);
}

TEST_CASE("refinement examples") {
  Manager mgr({"i", "o"});
  Predicate i = mgr.var("i"), o = mgr.var("o");
  Interface b({0}, {1}, i & o);
  CHECK(is_refinement(Interface({0}, {1}, mgr.bot()), b));
  CHECK(is_refinement(Interface::sink({0, 1}, i & o), Interface::sink({0, 1}, i)));
  CHECK_FALSE(is_refinement(Interface::sink({0, 1}, i), Interface::sink({0, 1}, i & o)));
  Interface t({0}, {1}, mgr.top());
  CHECK_FALSE(is_refinement(t, b));
  CHECK_FALSE(is_refinement(b, t));
  RefinementReport r = refinement_report(Interface::sink({0}, i), b);
  CHECK_FALSE(r.holds);
  CHECK(r.signature_mismatch);
}

TEST_CASE("shared refinability and refine examples") {
  Manager mgr({"i", "o", "a", "b"});
  Predicate i = mgr.var("i"), o = mgr.var("o"), a = mgr.var("a"), b = mgr.var("b");
  CHECK(is_shared_refinable(Interface({0}, {1}, i & o), Interface({0}, {1}, !i & !o)));
  Interface x({0}, {1}, o.iff(i)), y({0}, {1}, o.iff(!i));
  CHECK_FALSE(is_shared_refinable(x, y));
  CHECK_FALSE(refine_is_valid(x, y, refine(x, y)));
  CHECK(is_shared_refinable(x, x));
  CHECK(refine(Interface::sink({2, 3}, a), Interface::sink({2, 3}, b)).pred() == (a | b));
  CHECK(refine(Interface::source({2, 3}, a), Interface::source({2, 3}, b)).pred() == (a & b));
  CHECK_THROWS_AS(refine(Interface::sink({2}, a), Interface::sink({3}, b)), SignatureError);
  CHECK_THROWS_AS(is_shared_refinable(Interface::sink({2}, a), Interface::sink({3}, b)), SignatureError);
}

TEST_CASE("signature law on random interfaces") {
  std::mt19937_64 rng(21);
  Manager mgr(numbered("v", 12));
  std::vector<VarId> pool = range_ids(0, 12);
  for (int t = 0; t < 100; ++t) {
    Split s1 = random_split(pool, rng);
    Interface f1 = random_interface(mgr, s1.in, s1.out, rng);
    // f2 reads some of f1's outputs plus fresh variables.
    std::vector<VarId> rest;
    for (VarId v : pool)
      if (!s1.in.contains(v) && !s1.out.contains(v)) rest.push_back(v);
    Split s2 = random_split(rest, rng, 2, 2);
    VarSet in2 = s2.in | (s1.out & VarSet{pool[rng() % 12]});
    Interface f2 = random_interface(mgr, in2, s2.out, rng);
    Interface c = comp(f1, f2);
    VarSet io12 = f1.outputs() & f2.inputs();
    CHECK(c.inputs() == ((f1.inputs() | f2.inputs()) - io12));
    CHECK(c.outputs() == (f1.outputs() | f2.outputs()));
    CHECK(nb(c).inputs() == c.inputs());
    CHECK(nb(c).outputs().empty());
    VarSet w = c.outputs() & VarSet(std::vector<VarId>(pool.begin(), pool.begin() + 6));
    Interface h = ohide(w, c);
    CHECK(h.inputs() == c.inputs());
    CHECK(h.outputs() == (c.outputs() - w));
    CHECK(ohide_comp(w, f1, f2) == h);
    Interface sink = nb(c);
    VarSet wi = sink.inputs() & VarSet(std::vector<VarId>(pool.begin(), pool.begin() + 6));
    CHECK(ihide(wi, sink).inputs() == (sink.inputs() - wi));
  }
}

TEST_CASE("composition follows its defining formula by brute force") {
  std::mt19937_64 rng(22);
  Manager mgr(numbered("v", 8));
  // f1: (v0, v1) -> (v2, v3); f2: (v2, v4) -> (v5)
  for (int t = 0; t < 50; ++t) {
    Interface f1 = random_interface(mgr, {0, 1}, {2, 3}, rng, 0.4);
    Interface f2 = random_interface(mgr, {2, 4}, {5}, rng, 0.4);
    Interface c = comp(f1, f2);
    for (std::uint64_t row = 0; row < 64; ++row) {
      std::uint64_t bits = row;  // v0..v5
      bool f1v = mgr.eval_bits(f1.pred(), bits), f2v = mgr.eval_bits(f2.pred(), bits);
      bool robust = true;
      for (std::uint64_t o = 0; o < 4; ++o) {
        std::uint64_t b2 = (bits & ~std::uint64_t{0b1100}) | (o << 2);
        if (!mgr.eval_bits(f1.pred(), b2)) continue;
        bool nb2 = mgr.eval_bits(f2.pred(), b2) || mgr.eval_bits(f2.pred(), b2 ^ (1u << 5));
        if (!nb2) robust = false;
      }
      CHECK(mgr.eval_bits(c.pred(), bits) == (f1v && f2v && robust));
    }
  }
}

TEST_CASE("parallel composition is conjunction, commutative and associative") {
  std::mt19937_64 rng(23);
  Manager mgr(numbered("v", 12));
  for (int t = 0; t < 100; ++t) {
    // Disjoint outputs, inputs may be shared, no connections.
    Interface a = random_interface(mgr, {0, 1}, {6, 7}, rng);
    Interface b = random_interface(mgr, {1, 2}, {8, 9}, rng);
    Interface c = random_interface(mgr, {0, 3}, {10, 11}, rng);
    CHECK(comp(a, b).pred() == (a.pred() & b.pred()));
    CHECK(comp(a, b) == comp(b, a));
    CHECK(comp(comp(a, b), c) == comp(a, comp(b, c)));
  }
}

TEST_CASE("series composition is associative") {
  std::mt19937_64 rng(24);
  Manager mgr(numbered("v", 12));
  for (int t = 0; t < 100; ++t) {
    // a: {0,1} -> {2,3}; b: {2,4} -> {5,6}; c: {3,5,7} -> {8}
    Interface a = random_interface(mgr, {0, 1}, {2, 3}, rng, 0.6);
    Interface b = random_interface(mgr, {2, 4}, {5, 6}, rng, 0.6);
    Interface c = random_interface(mgr, {3, 5, 7}, {8}, rng, 0.6);
    CHECK(comp(comp(a, b), c) == comp(a, comp(b, c)));
  }
}

TEST_CASE("refinement is a partial order") {
  std::mt19937_64 rng(25);
  Manager mgr(numbered("v", 10));
  for (int t = 0; t < 100; ++t) {
    Interface c = random_interface(mgr, {0, 1, 2}, {3, 4}, rng, 0.5);
    Interface b = random_abstraction(c, rng);
    Interface a = random_abstraction(b, rng);
    CHECK(is_refinement(c, c));
    CHECK(is_refinement(b, c));
    CHECK(is_refinement(a, b));
    CHECK(is_refinement(a, c));
    if (is_refinement(c, b)) CHECK(b == c);
    Interface other = random_interface(mgr, {0, 1, 2}, {3, 4}, rng, 0.5);
    if (is_refinement(other, c) && is_refinement(c, other)) CHECK(other == c);
  }
}

TEST_CASE("composition preserves refinement") {
  std::mt19937_64 rng(26);
  Manager mgr(numbered("v", 10));
  for (int t = 0; t < 100; ++t) {
    Interface a = random_interface(mgr, {0, 1}, {2, 3}, rng, 0.6);
    Interface b = random_interface(mgr, {2, 4}, {5, 6}, rng, 0.6);
    Interface ah = random_abstraction(a, rng), bh = random_abstraction(b, rng);
    CHECK(is_refinement(comp(ah, bh), comp(a, b)));
    // Parallel pair as well.
    Interface p = random_interface(mgr, {0, 7}, {8, 9}, rng, 0.6);
    Interface ph = random_abstraction(p, rng);
    CHECK(is_refinement(comp(ah, ph), comp(a, p)));
  }
}

TEST_CASE("output hiding preserves refinement") {
  std::mt19937_64 rng(27);
  Manager mgr(numbered("v", 10));
  for (int t = 0; t < 100; ++t) {
    Interface b = random_interface(mgr, {0, 1, 2}, {3, 4, 5}, rng, 0.5);
    Interface a = random_abstraction(b, rng);
    for (VarSet w : {VarSet{3}, VarSet{4, 5}, VarSet{3, 4, 5}}) CHECK(is_refinement(ohide(w, a), ohide(w, b)));
  }
}

TEST_CASE("input hiding preserves refinement on sinks") {
  std::mt19937_64 rng(28);
  Manager mgr(numbered("v", 10));
  for (int t = 0; t < 100; ++t) {
    Interface b = Interface::sink({0, 1, 2, 3, 4}, random_predicate(mgr, {0, 1, 2, 3, 4}, rng));
    Interface a = random_abstraction(b, rng);
    CHECK(is_refinement(a, b));
    for (VarSet w : {VarSet{0}, VarSet{1, 3}, VarSet{0, 1, 2, 3, 4}}) CHECK(is_refinement(ihide(w, a), ihide(w, b)));
  }
}

TEST_CASE("shared refinement is the least upper bound") {
  std::mt19937_64 rng(29);
  Manager mgr(numbered("v", 10));
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    Interface g = random_interface(mgr, {0, 1, 2}, {3, 4}, rng, 0.5);
    Interface f1 = random_abstraction(g, rng, 0.3, 0.4);
    Interface f2 = random_abstraction(g, rng, 0.3, 0.4);
    REQUIRE(is_shared_refinable(f1, f2));
    Interface r = refine(f1, f2);
    CHECK(refine_is_valid(f1, f2, r));
    CHECK(is_refinement(f1, r));
    CHECK(is_refinement(f2, r));
    CHECK(is_refinement(r, g));
    for (int k = 0; k < 5; ++k) {
      Interface h = random_concretization(g, rng);
      REQUIRE(is_refinement(g, h));
      CHECK(is_refinement(r, h));
      ++checked;
    }
    CHECK(refine(f1, f2) == refine(f2, f1));
  }
  CHECK(checked == 500);
}

TEST_CASE("refine of samples: overlapping and disjoint forms") {
  std::mt19937_64 rng(30);
  Manager mgr(numbered("v", 8));
  std::vector<VarId> in{0, 1, 2, 3}, out{4, 5, 6};
  for (int t = 0; t < 200; ++t) {
    Predicate i1 = random_predicate(mgr, in, rng, 0.3), i2 = random_predicate(mgr, in, rng, 0.3);
    Predicate o1 = random_predicate(mgr, out, rng, 0.4) | (mgr.var(4) & mgr.nvar(5) & mgr.var(6));
    Predicate o2 = random_predicate(mgr, out, rng, 0.4) | (mgr.nvar(4) & mgr.var(5) & mgr.var(6));
    Interface s1(VarSet(in), VarSet(out), i1 & o1), s2(VarSet(in), VarSet(out), i2 & o2);
    Interface r = refine(s1, s2);
    Predicate disjshared = (i1 & i2 & o1 & o2) | (i1 & !i2 & o1) | (!i1 & i2 & o2);
    CHECK(r.pred() == disjshared);
    Predicate j2 = i2 & !i1;
    Interface s3(VarSet(in), VarSet(out), j2 & o2);
    CHECK(refine(s1, s3).pred() == ((i1 & o1) | (j2 & o2)));
  }
}

TEST_CASE("fused hide-compose equals the literal form") {
  std::mt19937_64 rng(31);
  Manager mgr(numbered("v", 12));
  for (int t = 0; t < 100; ++t) {
    Interface a = random_interface(mgr, {0, 1}, {2, 3, 4}, rng, 0.6);
    Interface b = random_interface(mgr, {2, 3, 5}, {6, 7}, rng, 0.6);
    for (VarSet w : {VarSet{2}, VarSet{2, 3}, VarSet{2, 3, 4, 6}, VarSet{6, 7}, VarSet{}}) {
      CHECK(ohide_comp(w, a, b) == ohide(w, comp(a, b)));
      CHECK(ohide_comp(w, b, a) == ohide(w, comp(a, b)));
    }
  }
}

TEST_CASE("input and output coarsening closed forms") {
  std::mt19937_64 rng(32);
  // fine x: 0,1,2 ; coarse x: 3,4,5 ; other input 6 ; outputs 7,8 ; coarse outputs 9,10
  Manager mgr(numbered("v", 11));
  BitVector fx{0, 1, 2}, cx{3, 4, 5};
  BitVector fo{7, 8}, co{9, 10};
  auto back = [](const BitVector& from, const BitVector& to) {
    std::vector<std::pair<VarId, VarId>> m;
    for (std::size_t k = 0; k < from.size(); ++k) m.emplace_back(from[k], to[k]);
    return m;
  };
  for (int t = 0; t < 100; ++t) {
    Interface f = random_interface(mgr, {0, 1, 2, 6}, {7, 8}, rng, 0.4);
    for (int keep = 0; keep <= 3; ++keep) {
      Interface c = icoarsen(f, quantizer(mgr, fx, cx, keep, QuantizerSide::kInput));
      CHECK(c.inputs() == VarSet{3, 4, 5, 6});
      CHECK(c.outputs() == f.outputs());
      Interface renamed(f.inputs(), f.outputs(), mgr.rename(c.pred(), back(cx, fx)));
      CHECK(is_refinement(renamed, f));
      VarSet lsb(std::vector<VarId>(fx.begin() + keep, fx.end()));
      Predicate closed = mgr.exists(lsb, f.pred()) & mgr.forall(lsb, nb(f).pred());
      CHECK(renamed.pred() == closed);
      if (keep == 3) CHECK(renamed == f);
    }
    for (int keep = 0; keep <= 2; ++keep) {
      Interface c = ocoarsen(f, quantizer(mgr, fo, co, keep, QuantizerSide::kOutput));
      CHECK(c.outputs() == VarSet{9, 10});
      Interface renamed(f.inputs(), f.outputs(), mgr.rename(c.pred(), back(co, fo)));
      CHECK(is_refinement(renamed, f));
      VarSet lsb(std::vector<VarId>(fo.begin() + keep, fo.end()));
      CHECK(renamed.pred() == mgr.exists(lsb, f.pred()));
      if (keep == 2) CHECK(renamed == f);
    }
  }
  Interface bot({0, 1, 2, 6}, {7, 8}, mgr.bot());
  CHECK(icoarsen(bot, quantizer(mgr, fx, cx, 1, QuantizerSide::kInput)).pred().is_false());
  CHECK(ocoarsen(bot, quantizer(mgr, fo, co, 1, QuantizerSide::kOutput)).pred().is_false());
  CHECK_THROWS_AS(icoarsen(bot, quantizer(mgr, fo, co, 1, QuantizerSide::kInput)), SignatureError);
}

TEST_CASE("input coarsening a sink keeps fully covered coarse cells") {
  Manager mgr({"x0", "x1", "c0", "c1"});
  Predicate x0 = mgr.var("x0"), x1 = mgr.var("x1");
  // cells 00, 01, 10 (msb first)
  Interface z = Interface::sink({0, 1}, !x0 | !x1);
  Interface c = icoarsen(z, quantizer(mgr, {0, 1}, {2, 3}, 1, QuantizerSide::kInput));
  CHECK(c.pred() == !mgr.var("c0"));
  // Output coarsening of a function maps to the containing coarse cell.
  Manager m2({"i", "o0", "o1", "k0", "k1"});
  Predicate i = m2.var("i");
  // i -> cell 01 or cell 10
  Predicate f = (!i & !m2.var("o0") & m2.var("o1")) | (i & m2.var("o0") & !m2.var("o1"));
  Interface oc = ocoarsen(Interface({0}, {1, 2}, f), quantizer(m2, {1, 2}, {3, 4}, 1, QuantizerSide::kOutput));
  CHECK(oc.pred() == m2.var("k0").iff(i));
}

TEST_CASE("widen_sink adds unconstrained inputs") {
  Manager mgr({"a", "b"});
  Interface s = Interface::sink({0}, mgr.var("a"));
  Interface w = widen_sink(s, {0, 1});
  CHECK(w.inputs() == VarSet{0, 1});
  CHECK(w.pred() == s.pred());
}

TEST_CASE("interface files round trip") {
  std::mt19937_64 rng(33);
  std::vector<Dimension> dims{Dimension::continuous("x", -2, 2, 3), Dimension::discrete("u", {0.25, 0.5})};
  SymbolicSpace space({dims[0]}, {dims[1]});
  Manager& mgr = space.manager();
  VarSet in = space.state_vars() | space.control_vars();
  Interface f(in, space.next_vars(), random_predicate(mgr, ids(in, space.next_vars()), rng));
  std::stringstream s;
  save_interface(s, f, dims, {{"plan", "exhaustive"}, {"seed", "5"}});
  InterfaceFile hdr;
  std::stringstream in1(s.str());
  Interface g = load_interface(in1, mgr, &hdr);
  CHECK(g == f);
  CHECK(hdr.meta.at("plan") == "exhaustive");
  REQUIRE(hdr.dims.size() == 2);
  CHECK(hdr.dims[0] == dims[0]);
  CHECK(hdr.dims[1] == dims[1]);
  CHECK_NOTHROW(check_dimensions(hdr, dims));
  CHECK_THROWS_AS(check_dimensions(hdr, {dims[0]}), ConfigError);

  Interface bot(in, space.next_vars(), mgr.bot());
  std::stringstream sb;
  save_interface(sb, bot, dims);
  std::stringstream in2(sb.str());
  CHECK(load_interface(in2, mgr) == bot);

  std::string text = s.str();
  std::stringstream trunc(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_interface(trunc, mgr), ParseError);
  std::stringstream junk("hello\n");
  CHECK_THROWS_AS(load_interface(junk, mgr), ParseError);
  Manager other({"q"});
  std::stringstream in3(text);
  CHECK_THROWS_AS(load_interface(in3, other), ParseError);
}
