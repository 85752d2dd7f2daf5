#pragma once

#include <span>
#include <string>

#include "relsynth/bdd.hpp"

namespace relsynth {

/// A predicate over disjoint input and output variable sets. Sinks have no
/// outputs and read as sets (constraints); sources have no inputs.
class Interface {
 public:
  /// Throws SignatureError if inputs and outputs overlap or the predicate
  /// depends on a variable outside inputs | outputs.
  Interface(VarSet inputs, VarSet outputs, Predicate pred);

  static Interface sink(VarSet inputs, Predicate pred) {
    return Interface(std::move(inputs), {}, std::move(pred));
  }
  static Interface source(VarSet outputs, Predicate pred) {
    return Interface({}, std::move(outputs), std::move(pred));
  }

  const VarSet& inputs() const { return inputs_; }
  const VarSet& outputs() const { return outputs_; }
  const Predicate& pred() const { return pred_; }
  Manager& manager() const { return *pred_.manager(); }

  bool is_sink() const { return outputs_.empty(); }
  bool is_source() const { return inputs_.empty(); }
  bool same_signature(const Interface& other) const {
    return inputs_ == other.inputs_ && outputs_ == other.outputs_;
  }

  friend bool operator==(const Interface& a, const Interface& b) {
    return a.same_signature(b) && a.pred_ == b.pred_;
  }

 private:
  VarSet inputs_;
  VarSet outputs_;
  Predicate pred_;
};

/// (i, o \ w) with predicate exists w. F. Requires w to be a subset of outputs.
Interface ohide(const VarSet& w, const Interface& f);

/// Sink of non-blocking inputs: exists o. F over (i, {}).
Interface nb(const Interface& f);

/// Feed-forward composition, F1 & F2 & forall o12 (F1 => NB F2). Arguments
/// are swapped automatically when F2 feeds F1; a connection in both
/// directions or shared outputs raise SignatureError. Shared inputs are
/// allowed.
Interface comp(const Interface& f1, const Interface& f2);
/// Left fold of the binary composition.
Interface comp(std::span<const Interface> parts);

/// (i \ w, {}) with predicate exists w. F; only defined for sinks.
Interface ihide(const VarSet& w, const Interface& f);

/// ohide(w, comp(f1, f2)) computed with relational products instead of
/// materialising the composition. Same result, same signature.
Interface ohide_comp(const VarSet& w, const Interface& f1, const Interface& f2);

struct RefinementReport {
  bool holds = false;
  bool signature_mismatch = false;
};

/// a is an abstraction of b (a below b): NB(a) => NB(b) and
/// (NB(a) & b) => a. Signature mismatch reports false.
RefinementReport refinement_report(const Interface& a, const Interface& b);
inline bool is_refinement(const Interface& a, const Interface& b) {
  return refinement_report(a, b).holds;
}

/// (NB F1 & NB F2) => exists o. (F1 & F2). Throws on signature mismatch.
bool is_shared_refinable(const Interface& f1, const Interface& f2);

/// (NB F1 | NB F2) & (NB F1 => F1) & (NB F2 => F2). Refinability is not
/// checked here; see refine_is_valid().
Interface refine(const Interface& f1, const Interface& f2);

/// True iff both arguments are abstractions of the merged interface, which
/// fails exactly when they were not shared refinable.
bool refine_is_valid(const Interface& f1, const Interface& f2, const Interface& merged);

/// ohide(i, comp(q, f)) for an input quantizer q(i_coarse, i) whose outputs
/// are inputs of f.
Interface icoarsen(const Interface& f, const Interface& q);

/// ohide(o, comp(f, q)) for an output quantizer q(o, o_coarse) whose inputs
/// are outputs of f.
Interface ocoarsen(const Interface& f, const Interface& q);

/// Re-declares a sink over a superset of its inputs by composing it in
/// parallel with the true sink over the extra variables.
Interface widen_sink(const Interface& f, const VarSet& inputs);

std::string describe(const Interface& f);

}  // namespace relsynth
