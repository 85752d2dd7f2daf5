#include "relsynth/interface.hpp"

#include <sstream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

std::string names_of(const Manager& mgr, const VarSet& vs) {
  std::string out = "{";
  bool first = true;
  for (VarId v : vs) {
    if (!first) out += ",";
    out += mgr.name(v);
    first = false;
  }
  return out + "}";
}

void require_same_signature(const Interface& a, const Interface& b, const char* op) {
  if (!a.same_signature(b)) {
    throw SignatureError(std::string(op) + ": interfaces must have identical signatures");
  }
}

}  // namespace

Interface::Interface(VarSet inputs, VarSet outputs, Predicate pred)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), pred_(std::move(pred)) {
  if (!pred_.valid()) throw SignatureError("interface: null predicate");
  if (!inputs_.disjoint(outputs_)) {
    throw SignatureError("interface: inputs and outputs overlap");
  }
  if (!pred_.is_false() && !pred_.is_true()) {
    VarSet supp = manager().support(pred_);
    if (!supp.subset_of(inputs_ | outputs_)) {
      throw SignatureError("interface: predicate depends on undeclared variables " +
                           names_of(manager(), supp - (inputs_ | outputs_)));
    }
  }
}

Interface ohide(const VarSet& w, const Interface& f) {
  if (!w.subset_of(f.outputs())) {
    throw SignatureError("ohide: hidden variables must be outputs");
  }
  return Interface(f.inputs(), f.outputs() - w, f.manager().exists(w, f.pred()));
}

Interface nb(const Interface& f) {
  if (f.is_sink()) return f;
  return Interface::sink(f.inputs(), f.manager().exists(f.outputs(), f.pred()));
}

Interface comp(const Interface& a, const Interface& b) {
  bool a_feeds_b = !(a.outputs() & b.inputs()).empty();
  bool b_feeds_a = !(b.outputs() & a.inputs()).empty();
  if (a_feeds_b && b_feeds_a) throw SignatureError("comp: cyclic connection");
  const Interface& f1 = b_feeds_a ? b : a;
  const Interface& f2 = b_feeds_a ? a : b;
  if (!f1.outputs().disjoint(f2.outputs())) throw SignatureError("comp: shared outputs");

  Manager& mgr = f1.manager();
  VarSet io12 = f1.outputs() & f2.inputs();
  VarSet i12 = (f1.inputs() | f2.inputs()) - io12;
  VarSet o12 = f1.outputs() | f2.outputs();
  Predicate both = f1.pred() & f2.pred();
  if (io12.empty()) {
    // Parallel composition: the robustness clause is implied by F1 & F2.
    return Interface(std::move(i12), std::move(o12), std::move(both));
  }
  // forall o12 (F1 => NB F2) == !exists o1 (F1 & !NB F2); neither side
  // depends on o2.
  Predicate nb2 = nb(f2).pred();
  Predicate robust = !mgr.and_exists(f1.outputs(), f1.pred(), !nb2);
  return Interface(std::move(i12), std::move(o12), both & robust);
}

Interface comp(std::span<const Interface> parts) {
  if (parts.empty()) throw SignatureError("comp: nothing to compose");
  Interface acc = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) acc = comp(acc, parts[k]);
  return acc;
}

Interface ihide(const VarSet& w, const Interface& f) {
  if (!f.is_sink()) throw SignatureError("ihide: only defined for sinks");
  if (!w.subset_of(f.inputs())) throw SignatureError("ihide: hidden variables must be inputs");
  return Interface::sink(f.inputs() - w, f.manager().exists(w, f.pred()));
}

Interface ohide_comp(const VarSet& w, const Interface& a, const Interface& b) {
  bool a_feeds_b = !(a.outputs() & b.inputs()).empty();
  bool b_feeds_a = !(b.outputs() & a.inputs()).empty();
  if (a_feeds_b && b_feeds_a) throw SignatureError("comp: cyclic connection");
  const Interface& f1 = b_feeds_a ? b : a;
  const Interface& f2 = b_feeds_a ? a : b;
  if (!f1.outputs().disjoint(f2.outputs())) throw SignatureError("comp: shared outputs");

  Manager& mgr = f1.manager();
  VarSet io12 = f1.outputs() & f2.inputs();
  VarSet i12 = (f1.inputs() | f2.inputs()) - io12;
  VarSet o12 = f1.outputs() | f2.outputs();
  if (!w.subset_of(o12)) throw SignatureError("ohide: hidden variables must be outputs");
  // The robustness clause depends on i12 only, so exists w commutes with it.
  Predicate hidden = mgr.and_exists(w, f1.pred(), f2.pred());
  if (!io12.empty() && !hidden.is_false()) {
    Predicate nb2 = nb(f2).pred();
    hidden &= !mgr.and_exists(f1.outputs(), f1.pred(), !nb2);
  }
  return Interface(std::move(i12), o12 - w, std::move(hidden));
}

RefinementReport refinement_report(const Interface& a, const Interface& b) {
  if (!a.same_signature(b)) return {false, true};
  Predicate nb_a = nb(a).pred();
  Predicate nb_b = nb(b).pred();
  bool holds = nb_a.entails(nb_b) && (nb_a & b.pred()).entails(a.pred());
  return {holds, false};
}

bool is_shared_refinable(const Interface& f1, const Interface& f2) {
  require_same_signature(f1, f2, "is_shared_refinable");
  Manager& mgr = f1.manager();
  Predicate lhs = nb(f1).pred() & nb(f2).pred();
  Predicate rhs = mgr.exists(f1.outputs(), f1.pred() & f2.pred());
  return lhs.entails(rhs);
}

Interface refine(const Interface& f1, const Interface& f2) {
  require_same_signature(f1, f2, "refine");
  Predicate n1 = nb(f1).pred();
  Predicate n2 = nb(f2).pred();
  Predicate p = (n1 | n2) & n1.implies(f1.pred()) & n2.implies(f2.pred());
  return Interface(f1.inputs(), f1.outputs(), std::move(p));
}

bool refine_is_valid(const Interface& f1, const Interface& f2, const Interface& merged) {
  return is_refinement(f1, merged) && is_refinement(f2, merged);
}

Interface icoarsen(const Interface& f, const Interface& q) {
  if (q.outputs().empty() || !q.outputs().subset_of(f.inputs())) {
    throw SignatureError("icoarsen: quantizer outputs must be inputs of the interface");
  }
  return ohide_comp(q.outputs(), q, f);
}

Interface ocoarsen(const Interface& f, const Interface& q) {
  if (q.inputs().empty() || !q.inputs().subset_of(f.outputs())) {
    throw SignatureError("ocoarsen: quantizer inputs must be outputs of the interface");
  }
  return ohide_comp(q.inputs(), f, q);
}

Interface widen_sink(const Interface& f, const VarSet& inputs) {
  if (!f.is_sink()) throw SignatureError("widen_sink: only defined for sinks");
  VarSet extra = inputs - f.inputs();
  if (extra.empty()) return f;
  return comp(f, Interface::sink(std::move(extra), f.manager().top()));
}

std::string describe(const Interface& f) {
  std::ostringstream out;
  out << "Interface(inputs=" << names_of(f.manager(), f.inputs())
      << ", outputs=" << names_of(f.manager(), f.outputs())
      << ", nodes=" << f.manager().node_count(f.pred()) << ")";
  return out.str();
}

}  // namespace relsynth
