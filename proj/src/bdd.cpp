#include "relsynth/bdd.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

constexpr VarId kTerminalVar = std::numeric_limits<VarId>::max();
constexpr VarId kFreeVar = kTerminalVar - 1;
constexpr NodeId kNil = 0;  // terminals never live in the unique table

constexpr std::size_t kInitialBuckets = 1u << 16;
constexpr std::size_t kInitialCache = 1u << 18;
constexpr std::size_t kMaxCache = 1u << 22;

enum CacheOp : std::uint32_t {
  kOpEmpty = 0,
  kOpAnd,
  kOpOr,
  kOpXor,
  kOpNot,
  kOpIte,
  kOpExists,
  kOpForall,
  kOpAndExists,
};

inline std::size_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = a * 0x9E3779B97F4A7C15ull;
  h ^= b + 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
  h ^= c * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
  h ^= h >> 29;
  return static_cast<std::size_t>(h);
}

}  // namespace

// ---------------------------------------------------------------- VarSet

VarSet::VarSet(std::initializer_list<VarId> ids) : VarSet(std::vector<VarId>(ids)) {}

VarSet::VarSet(std::vector<VarId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool VarSet::contains(VarId v) const {
  return std::binary_search(ids_.begin(), ids_.end(), v);
}

VarSet VarSet::operator|(const VarSet& other) const {
  VarSet r;
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                 std::back_inserter(r.ids_));
  return r;
}

VarSet VarSet::operator-(const VarSet& other) const {
  VarSet r;
  std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                      std::back_inserter(r.ids_));
  return r;
}

VarSet VarSet::operator&(const VarSet& other) const {
  VarSet r;
  std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(r.ids_));
  return r;
}

bool VarSet::disjoint(const VarSet& other) const { return (*this & other).empty(); }

bool VarSet::subset_of(const VarSet& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

// ------------------------------------------------------------- Predicate

Predicate::Predicate(Manager* mgr, NodeId node) : mgr_(mgr), node_(node) {
  if (mgr_) mgr_->ref(node_);
}

Predicate::Predicate(const Predicate& other) : mgr_(other.mgr_), node_(other.node_) {
  if (mgr_) mgr_->ref(node_);
}

Predicate::Predicate(Predicate&& other) noexcept : mgr_(other.mgr_), node_(other.node_) {
  other.mgr_ = nullptr;
  other.node_ = 0;
}

Predicate& Predicate::operator=(const Predicate& other) {
  if (this != &other) {
    if (other.mgr_) other.mgr_->ref(other.node_);
    if (mgr_) mgr_->deref(node_);
    mgr_ = other.mgr_;
    node_ = other.node_;
  }
  return *this;
}

Predicate& Predicate::operator=(Predicate&& other) noexcept {
  if (this != &other) {
    if (mgr_) mgr_->deref(node_);
    mgr_ = other.mgr_;
    node_ = other.node_;
    other.mgr_ = nullptr;
    other.node_ = 0;
  }
  return *this;
}

Predicate::~Predicate() {
  if (mgr_) mgr_->deref(node_);
}

Predicate Predicate::operator&(const Predicate& b) const { return mgr_->apply(BoolOp::kAnd, *this, b); }
Predicate Predicate::operator|(const Predicate& b) const { return mgr_->apply(BoolOp::kOr, *this, b); }
Predicate Predicate::operator^(const Predicate& b) const { return mgr_->apply(BoolOp::kXor, *this, b); }
Predicate Predicate::operator!() const { return mgr_->negate(*this); }
Predicate Predicate::implies(const Predicate& b) const { return mgr_->apply(BoolOp::kImplies, *this, b); }
Predicate Predicate::iff(const Predicate& b) const { return !(*this ^ b); }

bool Predicate::entails(const Predicate& b) const { return implies(b).is_true(); }

// --------------------------------------------------------------- Manager

Manager::Manager(std::vector<std::string> names, std::size_t node_limit)
    : names_(std::move(names)), node_limit_(node_limit) {
  for (VarId v = 0; v < names_.size(); ++v) {
    if (!index_.emplace(names_[v], v).second) {
      throw Error("duplicate variable name: " + names_[v]);
    }
  }
  nodes_.push_back({kTerminalVar, kFalse, kFalse, kNil});
  nodes_.push_back({kTerminalVar, kTrue, kTrue, kNil});
  refs_.assign(2, 0);
  buckets_.assign(kInitialBuckets, kNil);
  cache_.assign(kInitialCache, CacheEntry{kOpEmpty, 0, 0, 0, 0});
}

Manager::~Manager() = default;

std::optional<VarId> Manager::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId Manager::var_id(const std::string& name) const {
  auto v = find(name);
  if (!v) throw Error("unknown variable: " + name);
  return *v;
}

VarSet Manager::all_vars() const {
  std::vector<VarId> ids(num_vars());
  for (VarId v = 0; v < ids.size(); ++v) ids[v] = v;
  return VarSet(std::move(ids));
}

void Manager::check_same(const Predicate& p) const {
  if (p.manager() != this) throw Error("predicate belongs to a different manager");
}

NodeId Manager::make(VarId v, NodeId lo, NodeId hi) {
  if (lo == hi) return lo;
  std::size_t h = mix(v, lo, hi) & (buckets_.size() - 1);
  for (NodeId n = buckets_[h]; n != kNil; n = nodes_[n].next) {
    const Node& node = nodes_[n];
    if (node.var == v && node.lo == lo && node.hi == hi) return n;
  }
  if (node_limit_ != 0 && live_ >= node_limit_) {
    throw ResourceLimitError("node store exceeded soft cap of " + std::to_string(node_limit_) +
                             " nodes");
  }
  NodeId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[id] = {v, lo, hi, buckets_[h]};
    refs_[id] = 0;
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({v, lo, hi, buckets_[h]});
    refs_.push_back(0);
  }
  buckets_[h] = id;
  ++live_;
  peak_ = std::max(peak_, live_);
  if (live_ > buckets_.size()) grow_buckets();
  return id;
}

void Manager::grow_buckets() {
  std::size_t size = buckets_.size();
  while (size < live_) size *= 2;
  size *= 2;
  buckets_.assign(size, kNil);
  for (NodeId n = 2; n < nodes_.size(); ++n) {
    Node& node = nodes_[n];
    if (node.var == kFreeVar) continue;
    std::size_t h = mix(node.var, node.lo, node.hi) & (size - 1);
    node.next = buckets_[h];
    buckets_[h] = n;
  }
}

bool Manager::cache_lookup(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId& out) const {
  const CacheEntry& e = cache_[mix(op | (std::uint64_t{a} << 32), b, c) & (cache_.size() - 1)];
  if (e.op == op && e.a == a && e.b == b && e.c == c) {
    out = e.result;
    return true;
  }
  return false;
}

void Manager::cache_insert(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId r) {
  cache_[mix(op | (std::uint64_t{a} << 32), b, c) & (cache_.size() - 1)] = {op, a, b, c, r};
}

void Manager::maybe_grow_cache() {
  if (live_ > cache_.size() && cache_.size() < kMaxCache) {
    std::size_t size = cache_.size();
    while (size < live_ && size < kMaxCache) size *= 2;
    cache_.assign(size, CacheEntry{kOpEmpty, 0, 0, 0, 0});
  }
}

NodeId Manager::cube(const VarSet& w) {
  NodeId c = kTrue;
  for (auto it = w.ids().rbegin(); it != w.ids().rend(); ++it) {
    if (*it >= num_vars()) throw Error("variable id out of range");
    c = make(*it, kFalse, c);
  }
  return c;
}

Predicate Manager::var(VarId v) {
  if (v >= num_vars()) throw Error("variable id out of range");
  return {this, make(v, kFalse, kTrue)};
}

Predicate Manager::nvar(VarId v) {
  if (v >= num_vars()) throw Error("variable id out of range");
  return {this, make(v, kTrue, kFalse)};
}

Predicate Manager::minterm(std::span<const VarId> vars, std::span<const bool> values) {
  if (vars.size() != values.size()) throw Error("minterm: size mismatch");
  std::vector<std::pair<VarId, bool>> lits;
  for (std::size_t i = 0; i < vars.size(); ++i) lits.emplace_back(vars[i], values[i]);
  std::sort(lits.begin(), lits.end());
  NodeId r = kTrue;
  for (auto it = lits.rbegin(); it != lits.rend(); ++it) {
    if (it->first >= num_vars()) throw Error("variable id out of range");
    if (std::next(it) != lits.rend() && std::next(it)->first == it->first) {
      if (std::next(it)->second != it->second) return bot();
      continue;
    }
    r = it->second ? make(it->first, kFalse, r) : make(it->first, r, kFalse);
  }
  return {this, r};
}

// ------------------------------------------------------- recursive cores

NodeId Manager::not_rec(NodeId a) {
  if (a == kFalse) return kTrue;
  if (a == kTrue) return kFalse;
  NodeId r;
  if (cache_lookup(kOpNot, a, 0, 0, r)) return r;
  const Node n = nodes_[a];
  NodeId lo = not_rec(n.lo);
  NodeId hi = not_rec(n.hi);
  r = make(n.var, lo, hi);
  cache_insert(kOpNot, a, 0, 0, r);
  return r;
}

NodeId Manager::and_rec(NodeId a, NodeId b) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (a == kTrue || a == b) return b;
  if (b == kTrue) return a;
  if (a > b) std::swap(a, b);
  NodeId r;
  if (cache_lookup(kOpAnd, a, b, 0, r)) return r;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  VarId v = std::min(na.var, nb.var);
  NodeId a0 = na.var == v ? na.lo : a, a1 = na.var == v ? na.hi : a;
  NodeId b0 = nb.var == v ? nb.lo : b, b1 = nb.var == v ? nb.hi : b;
  NodeId lo = and_rec(a0, b0);
  NodeId hi = and_rec(a1, b1);
  r = make(v, lo, hi);
  cache_insert(kOpAnd, a, b, 0, r);
  return r;
}

NodeId Manager::or_rec(NodeId a, NodeId b) {
  if (a == kTrue || b == kTrue) return kTrue;
  if (a == kFalse || a == b) return b;
  if (b == kFalse) return a;
  if (a > b) std::swap(a, b);
  NodeId r;
  if (cache_lookup(kOpOr, a, b, 0, r)) return r;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  VarId v = std::min(na.var, nb.var);
  NodeId a0 = na.var == v ? na.lo : a, a1 = na.var == v ? na.hi : a;
  NodeId b0 = nb.var == v ? nb.lo : b, b1 = nb.var == v ? nb.hi : b;
  NodeId lo = or_rec(a0, b0);
  NodeId hi = or_rec(a1, b1);
  r = make(v, lo, hi);
  cache_insert(kOpOr, a, b, 0, r);
  return r;
}

NodeId Manager::xor_rec(NodeId a, NodeId b) {
  if (a == b) return kFalse;
  if (a == kFalse) return b;
  if (b == kFalse) return a;
  if (a == kTrue) return not_rec(b);
  if (b == kTrue) return not_rec(a);
  if (a > b) std::swap(a, b);
  NodeId r;
  if (cache_lookup(kOpXor, a, b, 0, r)) return r;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  VarId v = std::min(na.var, nb.var);
  NodeId a0 = na.var == v ? na.lo : a, a1 = na.var == v ? na.hi : a;
  NodeId b0 = nb.var == v ? nb.lo : b, b1 = nb.var == v ? nb.hi : b;
  NodeId lo = xor_rec(a0, b0);
  NodeId hi = xor_rec(a1, b1);
  r = make(v, lo, hi);
  cache_insert(kOpXor, a, b, 0, r);
  return r;
}

NodeId Manager::ite_rec(NodeId f, NodeId g, NodeId h) {
  if (f == kTrue) return g;
  if (f == kFalse) return h;
  if (g == h) return g;
  if (g == kTrue && h == kFalse) return f;
  if (g == kFalse && h == kTrue) return not_rec(f);
  if (g == kTrue) return or_rec(f, h);
  if (h == kFalse) return and_rec(f, g);
  NodeId r;
  if (cache_lookup(kOpIte, f, g, h, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Node nh = nodes_[h];
  VarId v = std::min({nf.var, ng.var, nh.var});
  NodeId f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  NodeId g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  NodeId h0 = nh.var == v ? nh.lo : h, h1 = nh.var == v ? nh.hi : h;
  NodeId lo = ite_rec(f0, g0, h0);
  NodeId hi = ite_rec(f1, g1, h1);
  r = make(v, lo, hi);
  cache_insert(kOpIte, f, g, h, r);
  return r;
}

NodeId Manager::exists_rec(NodeId p, NodeId c) {
  if (p <= kTrue) return p;
  VarId v = nodes_[p].var;
  while (c != kTrue && nodes_[c].var < v) c = nodes_[c].hi;
  if (c == kTrue) return p;
  NodeId r;
  if (cache_lookup(kOpExists, p, c, 0, r)) return r;
  const Node n = nodes_[p];
  if (nodes_[c].var == v) {
    NodeId rest = nodes_[c].hi;
    NodeId lo = exists_rec(n.lo, rest);
    r = lo == kTrue ? kTrue : or_rec(lo, exists_rec(n.hi, rest));
  } else {
    NodeId lo = exists_rec(n.lo, c);
    NodeId hi = exists_rec(n.hi, c);
    r = make(v, lo, hi);
  }
  cache_insert(kOpExists, p, c, 0, r);
  return r;
}

NodeId Manager::forall_rec(NodeId p, NodeId c) {
  if (p <= kTrue) return p;
  VarId v = nodes_[p].var;
  while (c != kTrue && nodes_[c].var < v) c = nodes_[c].hi;
  if (c == kTrue) return p;
  NodeId r;
  if (cache_lookup(kOpForall, p, c, 0, r)) return r;
  const Node n = nodes_[p];
  if (nodes_[c].var == v) {
    NodeId rest = nodes_[c].hi;
    NodeId lo = forall_rec(n.lo, rest);
    r = lo == kFalse ? kFalse : and_rec(lo, forall_rec(n.hi, rest));
  } else {
    NodeId lo = forall_rec(n.lo, c);
    NodeId hi = forall_rec(n.hi, c);
    r = make(v, lo, hi);
  }
  cache_insert(kOpForall, p, c, 0, r);
  return r;
}

NodeId Manager::and_exists_rec(NodeId a, NodeId b, NodeId c) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (c == kTrue) return and_rec(a, b);
  if (a == kTrue || a == b) return exists_rec(b, c);
  if (b == kTrue) return exists_rec(a, c);
  if (a > b) std::swap(a, b);
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  VarId v = std::min(na.var, nb.var);
  while (c != kTrue && nodes_[c].var < v) c = nodes_[c].hi;
  if (c == kTrue) return and_rec(a, b);
  NodeId r;
  if (cache_lookup(kOpAndExists, a, b, c, r)) return r;
  NodeId a0 = na.var == v ? na.lo : a, a1 = na.var == v ? na.hi : a;
  NodeId b0 = nb.var == v ? nb.lo : b, b1 = nb.var == v ? nb.hi : b;
  if (nodes_[c].var == v) {
    NodeId rest = nodes_[c].hi;
    NodeId lo = and_exists_rec(a0, b0, rest);
    r = lo == kTrue ? kTrue : or_rec(lo, and_exists_rec(a1, b1, rest));
  } else {
    NodeId lo = and_exists_rec(a0, b0, c);
    NodeId hi = and_exists_rec(a1, b1, c);
    r = make(v, lo, hi);
  }
  cache_insert(kOpAndExists, a, b, c, r);
  return r;
}

NodeId Manager::rename_rec(NodeId p, const std::vector<VarId>& map,
                           std::unordered_map<NodeId, NodeId>& memo) {
  if (p <= kTrue) return p;
  if (auto it = memo.find(p); it != memo.end()) return it->second;
  const Node n = nodes_[p];
  NodeId lo = rename_rec(n.lo, map, memo);
  NodeId hi = rename_rec(n.hi, map, memo);
  NodeId v = make(map[n.var], kFalse, kTrue);
  NodeId r = ite_rec(v, hi, lo);
  memo.emplace(p, r);
  return r;
}

// ------------------------------------------------------- public wrappers

Predicate Manager::apply(BoolOp op, const Predicate& a, const Predicate& b) {
  check_same(a);
  check_same(b);
  maybe_grow_cache();
  switch (op) {
    case BoolOp::kAnd:
      return {this, and_rec(a.node(), b.node())};
    case BoolOp::kOr:
      return {this, or_rec(a.node(), b.node())};
    case BoolOp::kXor:
      return {this, xor_rec(a.node(), b.node())};
    case BoolOp::kImplies:
      return {this, ite_rec(a.node(), b.node(), kTrue)};
  }
  throw Error("unknown boolean operator");
}

Predicate Manager::negate(const Predicate& a) {
  check_same(a);
  maybe_grow_cache();
  return {this, not_rec(a.node())};
}

Predicate Manager::ite(const Predicate& f, const Predicate& g, const Predicate& h) {
  check_same(f);
  check_same(g);
  check_same(h);
  maybe_grow_cache();
  return {this, ite_rec(f.node(), g.node(), h.node())};
}

Predicate Manager::exists(const VarSet& w, const Predicate& p) {
  check_same(p);
  maybe_grow_cache();
  NodeId c = cube(w);
  return {this, exists_rec(p.node(), c)};
}

Predicate Manager::forall(const VarSet& w, const Predicate& p) {
  check_same(p);
  maybe_grow_cache();
  NodeId c = cube(w);
  return {this, forall_rec(p.node(), c)};
}

Predicate Manager::and_exists(const VarSet& w, const Predicate& a, const Predicate& b) {
  check_same(a);
  check_same(b);
  maybe_grow_cache();
  NodeId c = cube(w);
  return {this, and_exists_rec(a.node(), b.node(), c)};
}

Predicate Manager::rename(const Predicate& p, const std::vector<std::pair<VarId, VarId>>& map) {
  check_same(p);
  std::vector<VarId> full(num_vars());
  for (VarId v = 0; v < full.size(); ++v) full[v] = v;
  std::vector<bool> seen_src(num_vars(), false);
  for (auto [from, to] : map) {
    if (from >= num_vars() || to >= num_vars()) throw Error("rename: variable id out of range");
    if (seen_src[from]) throw Error("rename: variable mapped twice: " + name(from));
    seen_src[from] = true;
    full[from] = to;
  }
  VarSet supp = support(p);
  std::vector<VarId> image;
  for (VarId v : supp) image.push_back(full[v]);
  std::sort(image.begin(), image.end());
  if (std::adjacent_find(image.begin(), image.end()) != image.end()) {
    throw Error("rename: map is not injective on the predicate's support");
  }
  maybe_grow_cache();
  std::unordered_map<NodeId, NodeId> memo;
  return {this, rename_rec(p.node(), full, memo)};
}

std::uint64_t Manager::sat_count(const Predicate& p, const VarSet& supp) {
  check_same(p);
  if (!support(p).subset_of(supp)) {
    throw Error("sat_count: support misses a variable of the predicate");
  }
  if (supp.size() > 63) throw Error("sat_count: support larger than 63 variables");
  const auto& ids = supp.ids();
  auto index_of = [&](NodeId n) -> std::size_t {
    if (n <= kTrue) return ids.size();
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), nodes_[n].var) -
                                    ids.begin());
  };
  std::unordered_map<NodeId, std::uint64_t> memo;
  auto rec = [&](auto&& self, NodeId n) -> std::uint64_t {
    if (n == kFalse) return 0;
    if (n == kTrue) return 1;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    std::size_t i = index_of(n);
    NodeId lo = nodes_[n].lo, hi = nodes_[n].hi;
    std::uint64_t c = (self(self, lo) << (index_of(lo) - i - 1)) +
                      (self(self, hi) << (index_of(hi) - i - 1));
    memo.emplace(n, c);
    return c;
  };
  return rec(rec, p.node()) << index_of(p.node());
}

std::size_t Manager::node_count(const Predicate& p) const {
  std::vector<NodeId> stack{p.node()};
  std::unordered_map<NodeId, bool> seen;
  std::size_t count = 0;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrue || !seen.emplace(n, true).second) continue;
    ++count;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  return count;
}

VarSet Manager::support(const Predicate& p) const {
  std::vector<NodeId> stack{p.node()};
  std::unordered_map<NodeId, bool> seen;
  std::vector<bool> vars(num_vars(), false);
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrue || !seen.emplace(n, true).second) continue;
    vars[nodes_[n].var] = true;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  std::vector<VarId> ids;
  for (VarId v = 0; v < vars.size(); ++v)
    if (vars[v]) ids.push_back(v);
  return VarSet(std::move(ids));
}

bool Manager::eval(const Predicate& p, const std::map<VarId, bool>& assignment) const {
  check_same(p);
  NodeId n = p.node();
  while (n > kTrue) {
    auto it = assignment.find(nodes_[n].var);
    if (it == assignment.end()) throw Error("eval: assignment misses variable " + name(nodes_[n].var));
    n = it->second ? nodes_[n].hi : nodes_[n].lo;
  }
  return n == kTrue;
}

bool Manager::eval_bits(const Predicate& p, std::uint64_t bits) const {
  NodeId n = p.node();
  while (n > kTrue) n = ((bits >> nodes_[n].var) & 1u) ? nodes_[n].hi : nodes_[n].lo;
  return n == kTrue;
}

std::optional<std::map<VarId, bool>> Manager::pick_one(const Predicate& p) const {
  if (p.is_false()) return std::nullopt;
  std::map<VarId, bool> out;
  NodeId n = p.node();
  while (n > kTrue) {
    bool take_hi = nodes_[n].lo == kFalse;
    out[nodes_[n].var] = take_hi;
    n = take_hi ? nodes_[n].hi : nodes_[n].lo;
  }
  return out;
}

// --------------------------------------------------------- serialization

void Manager::write(std::ostream& out, const Predicate& p) const {
  check_same(p);
  out << "vars:";
  for (const auto& n : names_) out << ' ' << n;
  out << '\n';
  std::unordered_map<NodeId, std::size_t> ids{{kFalse, 0}, {kTrue, 1}};
  std::size_t next_id = 2;
  // Iterative post-order DFS (lo before hi) so ids are deterministic.
  std::vector<std::pair<NodeId, bool>> stack{{p.node(), false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (ids.count(n)) continue;
    if (!expanded) {
      stack.emplace_back(n, true);
      stack.emplace_back(nodes_[n].hi, false);
      stack.emplace_back(nodes_[n].lo, false);
      continue;
    }
    std::size_t id = next_id++;
    ids.emplace(n, id);
    out << id << ' ' << names_[nodes_[n].var] << ' ' << ids.at(nodes_[n].lo) << ' '
        << ids.at(nodes_[n].hi) << '\n';
  }
  out << "root " << ids.at(p.node()) << '\n';
}

Predicate Manager::read(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && line.empty()) {
  }
  if (line.rfind("vars:", 0) != 0) throw ParseError("predicate: expected 'vars:' header");
  {
    std::istringstream hdr(line.substr(5));
    std::string name;
    while (hdr >> name) {
      if (!find(name)) throw ParseError("predicate: unknown variable " + name);
    }
  }
  std::unordered_map<std::size_t, Predicate> built;
  built.emplace(0, bot());
  built.emplace(1, top());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "root") {
      std::size_t root;
      if (!(ls >> root)) throw ParseError("predicate: malformed root line");
      auto it = built.find(root);
      if (it == built.end()) throw ParseError("predicate: root refers to an undefined node");
      return it->second;
    }
    std::size_t id, lo, hi;
    std::string vname;
    try {
      id = std::stoul(first);
    } catch (const std::exception&) {
      throw ParseError("predicate: malformed node line: " + line);
    }
    if (!(ls >> vname >> lo >> hi)) throw ParseError("predicate: malformed node line: " + line);
    auto v = find(vname);
    if (!v) throw ParseError("predicate: unknown variable " + vname);
    auto lit = built.find(lo), hit = built.find(hi);
    if (lit == built.end() || hit == built.end()) {
      throw ParseError("predicate: node refers to an undefined child");
    }
    built.insert_or_assign(id, ite(var(*v), hit->second, lit->second));
  }
  throw ParseError("predicate: truncated input (missing root line)");
}

// ------------------------------------------------------------------- GC

std::size_t Manager::collect_garbage() {
  std::vector<char> mark(nodes_.size(), 0);
  std::vector<NodeId> stack;
  for (NodeId n = 2; n < nodes_.size(); ++n) {
    if (refs_[n] > 0 && nodes_[n].var != kFreeVar) stack.push_back(n);
  }
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrue || mark[n]) continue;
    mark[n] = 1;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  std::size_t freed = 0;
  for (NodeId n = 2; n < nodes_.size(); ++n) {
    if (!mark[n] && nodes_[n].var != kFreeVar) {
      nodes_[n].var = kFreeVar;
      free_.push_back(n);
      ++freed;
    }
  }
  live_ -= freed;
  // Rehash survivors and drop cached results that may name freed ids.
  std::fill(buckets_.begin(), buckets_.end(), kNil);
  for (NodeId n = 2; n < nodes_.size(); ++n) {
    Node& node = nodes_[n];
    if (node.var == kFreeVar) continue;
    std::size_t h = mix(node.var, node.lo, node.hi) & (buckets_.size() - 1);
    node.next = buckets_[h];
    buckets_[h] = n;
  }
  std::fill(cache_.begin(), cache_.end(), CacheEntry{kOpEmpty, 0, 0, 0, 0});
  // Keep the free list ordered so reuse is deterministic.
  std::sort(free_.begin(), free_.end(), std::greater<>());
  return freed;
}

// ---------------------------------------------------------------- helpers

Predicate from_truth_table(Manager& mgr, std::span<const VarId> vars,
                           const std::vector<bool>& table) {
  if (table.size() != (std::size_t{1} << vars.size())) {
    throw Error("from_truth_table: table size must be 2^|vars|");
  }
  std::vector<std::size_t> order(vars.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vars[a] < vars[b]; });
  auto rec = [&](auto&& self, std::size_t depth, std::size_t index) -> Predicate {
    if (depth == order.size()) return mgr.constant(table[index]);
    std::size_t bit = order[depth];
    Predicate lo = self(self, depth + 1, index);
    Predicate hi = self(self, depth + 1, index | (std::size_t{1} << bit));
    return mgr.ite(mgr.var(vars[bit]), hi, lo);
  };
  return rec(rec, 0, 0);
}

}  // namespace relsynth
