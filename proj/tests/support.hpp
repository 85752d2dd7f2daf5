#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "relsynth/bdd.hpp"
#include "relsynth/interface.hpp"

namespace relsynth::testing {

inline std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

/// Uniformly random function of `vars` through a truth table; `density` is
/// the probability of a true row.
inline Predicate random_predicate(Manager& mgr, const std::vector<VarId>& vars, std::mt19937_64& rng,
                                  double density = 0.5) {
  std::bernoulli_distribution bit(density);
  std::vector<bool> table(std::size_t{1} << vars.size());
  for (std::size_t r = 0; r < table.size(); ++r) table[r] = bit(rng);
  return from_truth_table(mgr, vars, table);
}

inline std::vector<VarId> ids(const VarSet& s) { return s.ids(); }
inline std::vector<VarId> ids(const VarSet& a, const VarSet& b) { return (a | b).ids(); }

inline Interface random_interface(Manager& mgr, const VarSet& in, const VarSet& out, std::mt19937_64& rng,
                                  double density = 0.5) {
  return Interface(in, out, random_predicate(mgr, ids(in, out), rng, density));
}

/// Random A with A below B in the refinement order:
/// A = (B | W) & NB(B) & !K, where W widens outputs and K blocks inputs.
inline Interface random_abstraction(const Interface& b, std::mt19937_64& rng, double widen = 0.3,
                                    double block = 0.2) {
  Manager& mgr = b.manager();
  Predicate w = random_predicate(mgr, ids(b.inputs(), b.outputs()), rng, widen);
  Predicate k = random_predicate(mgr, ids(b.inputs()), rng, block);
  Predicate nb_b = nb(b).pred();
  return Interface(b.inputs(), b.outputs(), (b.pred() | w) & nb_b & !k);
}

/// A concretization H of G (G below H): same outputs or fewer where G is
/// nonblocking, arbitrary behaviour where G blocks.
inline Interface random_concretization(const Interface& g, std::mt19937_64& rng) {
  Manager& mgr = g.manager();
  Predicate nb_g = nb(g).pred();
  Predicate s = random_predicate(mgr, ids(g.inputs(), g.outputs()), rng, 0.6);
  Predicate narrowed = g.pred() & s;
  Predicate lost = nb_g & !mgr.exists(g.outputs(), narrowed);
  Predicate x = random_predicate(mgr, ids(g.inputs(), g.outputs()), rng, 0.5);
  Predicate h = (nb_g & (narrowed | (lost & g.pred()))) | (!nb_g & x);
  return Interface(g.inputs(), g.outputs(), h);
}

/// Brute-force evaluation over assignments encoded as bit r of `row` for
/// variable vars[r].
inline std::map<VarId, bool> assignment(const std::vector<VarId>& vars, std::uint64_t row) {
  std::map<VarId, bool> a;
  for (std::size_t k = 0; k < vars.size(); ++k) a[vars[k]] = (row >> k) & 1u;
  return a;
}

}  // namespace relsynth::testing
