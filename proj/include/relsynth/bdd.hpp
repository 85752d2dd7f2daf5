#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace relsynth {

using VarId = std::uint32_t;
using NodeId = std::uint32_t;

class Manager;

/// Duplicate-free set of boolean variable ids, kept sorted by id (which is
/// also the variable order).
class VarSet {
 public:
  VarSet() = default;
  VarSet(std::initializer_list<VarId> ids);
  explicit VarSet(std::vector<VarId> ids);

  bool contains(VarId v) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<VarId>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  VarSet operator|(const VarSet& other) const;  // union
  VarSet operator-(const VarSet& other) const;  // difference
  VarSet operator&(const VarSet& other) const;  // intersection
  bool disjoint(const VarSet& other) const;
  bool subset_of(const VarSet& other) const;

  friend bool operator==(const VarSet&, const VarSet&) = default;

 private:
  std::vector<VarId> ids_;
};

/// Handle to a canonical BDD node. Copies hold an external reference so the
/// node survives Manager::collect_garbage().
class Predicate {
 public:
  Predicate() = default;
  Predicate(Manager* mgr, NodeId node);
  Predicate(const Predicate& other);
  Predicate(Predicate&& other) noexcept;
  Predicate& operator=(const Predicate& other);
  Predicate& operator=(Predicate&& other) noexcept;
  ~Predicate();

  Manager* manager() const { return mgr_; }
  NodeId node() const { return node_; }
  bool valid() const { return mgr_ != nullptr; }
  bool is_false() const { return node_ == 0; }
  bool is_true() const { return node_ == 1; }

  Predicate operator&(const Predicate& b) const;
  Predicate operator|(const Predicate& b) const;
  Predicate operator^(const Predicate& b) const;
  Predicate operator!() const;
  Predicate implies(const Predicate& b) const;
  Predicate iff(const Predicate& b) const;
  Predicate& operator&=(const Predicate& b) { return *this = *this & b; }
  Predicate& operator|=(const Predicate& b) { return *this = *this | b; }

  /// Validity of (this => b).
  bool entails(const Predicate& b) const;

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.mgr_ == b.mgr_ && a.node_ == b.node_;
  }

 private:
  Manager* mgr_ = nullptr;
  NodeId node_ = 0;
};

enum class BoolOp { kAnd, kOr, kXor, kImplies };

/// Reduced ordered BDD store with a fixed variable order (the constructor's
/// name list). No complement edges: node_count() counts every reachable
/// internal node and never the two terminals.
///
/// Nodes are only reclaimed by collect_garbage(), which keeps everything
/// reachable from a live Predicate handle. Handles therefore never dangle,
/// and intermediate results inside a single operation are never swept.
class Manager {
 public:
  static constexpr NodeId kFalse = 0;
  static constexpr NodeId kTrue = 1;

  explicit Manager(std::vector<std::string> names, std::size_t node_limit = 0);
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;
  ~Manager();

  std::size_t num_vars() const { return names_.size(); }
  const std::string& name(VarId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<VarId> find(const std::string& name) const;
  /// Throws if the name is unknown.
  VarId var_id(const std::string& name) const;
  VarSet all_vars() const;

  Predicate bot() { return {this, kFalse}; }
  Predicate top() { return {this, kTrue}; }
  Predicate constant(bool value) { return value ? top() : bot(); }
  Predicate var(VarId v);
  Predicate nvar(VarId v);
  Predicate var(const std::string& name) { return var(var_id(name)); }
  /// Conjunction of the given literals (polarity per variable).
  Predicate minterm(std::span<const VarId> vars, std::span<const bool> values);

  Predicate apply(BoolOp op, const Predicate& a, const Predicate& b);
  Predicate negate(const Predicate& a);
  Predicate ite(const Predicate& f, const Predicate& g, const Predicate& h);
  Predicate exists(const VarSet& w, const Predicate& p);
  Predicate forall(const VarSet& w, const Predicate& p);
  /// exists(w, a & b) without building the conjunction.
  Predicate and_exists(const VarSet& w, const Predicate& a, const Predicate& b);

  /// Simultaneous substitution v -> map[v]. Variables absent from the map
  /// stay fixed. Throws if two support variables would collide.
  Predicate rename(const Predicate& p, const std::vector<std::pair<VarId, VarId>>& map);

  /// Exact number of satisfying assignments over exactly `support`
  /// (at most 63 variables).
  std::uint64_t sat_count(const Predicate& p, const VarSet& support);
  std::size_t node_count(const Predicate& p) const;
  VarSet support(const Predicate& p) const;

  bool eval(const Predicate& p, const std::map<VarId, bool>& assignment) const;
  /// Bit v of `bits` is the value of variable v (num_vars() <= 64).
  bool eval_bits(const Predicate& p, std::uint64_t bits) const;

  /// One satisfying assignment restricted to the support, if any.
  std::optional<std::map<VarId, bool>> pick_one(const Predicate& p) const;

  /// Text form: `vars: <names>` then `id var lo hi` per node in DFS
  /// post-order (0 = false, 1 = true) and a final `root <id>` line.
  void write(std::ostream& out, const Predicate& p) const;
  Predicate read(std::istream& in);

  /// Frees every node not reachable from a live Predicate. Returns the
  /// number of nodes reclaimed.
  std::size_t collect_garbage();
  std::size_t live_nodes() const { return live_; }
  std::size_t peak_nodes() const { return peak_; }
  void set_node_limit(std::size_t limit) { node_limit_ = limit; }
  std::size_t node_limit() const { return node_limit_; }

  // Reference bookkeeping used by Predicate.
  void ref(NodeId n) { ++refs_[n]; }
  void deref(NodeId n) { --refs_[n]; }

  // Raw node access (read-only) for code that walks diagrams directly.
  VarId node_var(NodeId n) const { return nodes_[n].var; }
  NodeId node_lo(NodeId n) const { return nodes_[n].lo; }
  NodeId node_hi(NodeId n) const { return nodes_[n].hi; }
  bool is_terminal(NodeId n) const { return n <= kTrue; }

 private:
  struct Node {
    VarId var;
    NodeId lo;
    NodeId hi;
    NodeId next;
  };
  struct CacheEntry {
    std::uint32_t op;
    NodeId a;
    NodeId b;
    NodeId c;
    NodeId result;
  };

  void check_same(const Predicate& p) const;
  NodeId make(VarId v, NodeId lo, NodeId hi);
  void grow_buckets();
  NodeId cube(const VarSet& w);

  bool cache_lookup(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId& out) const;
  void cache_insert(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId r);
  void maybe_grow_cache();

  NodeId and_rec(NodeId a, NodeId b);
  NodeId or_rec(NodeId a, NodeId b);
  NodeId xor_rec(NodeId a, NodeId b);
  NodeId not_rec(NodeId a);
  NodeId ite_rec(NodeId f, NodeId g, NodeId h);
  NodeId exists_rec(NodeId p, NodeId cube);
  NodeId forall_rec(NodeId p, NodeId cube);
  NodeId and_exists_rec(NodeId a, NodeId b, NodeId cube);
  NodeId rename_rec(NodeId p, const std::vector<VarId>& map,
                    std::unordered_map<NodeId, NodeId>& memo);

  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> refs_;
  std::vector<NodeId> buckets_;
  std::vector<NodeId> free_;
  std::vector<CacheEntry> cache_;
  std::size_t live_ = 2;
  std::size_t peak_ = 2;
  std::size_t node_limit_ = 0;
};

/// Sum-of-minterms predicate from a truth table indexed by the bits of
/// `vars` (vars[0] is the least significant index bit).
Predicate from_truth_table(Manager& mgr, std::span<const VarId> vars,
                           const std::vector<bool>& table);

}  // namespace relsynth
