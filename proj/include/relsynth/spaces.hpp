#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relsynth/bdd.hpp"
#include "relsynth/interface.hpp"
#include "relsynth/interval.hpp"

namespace relsynth {

/// Ordered bit vector, most significant bit first.
using BitVector = std::vector<VarId>;

inline VarSet to_set(const BitVector& bits) { return VarSet(std::vector<VarId>(bits)); }
inline BitVector prefix(const BitVector& bits, int n) {
  return BitVector(bits.begin(), bits.begin() + n);
}

/// A continuous interval split into 2^bits equal cells, or a finite list of
/// values coded by list position.
class Dimension {
 public:
  enum class Kind { kContinuous, kDiscrete };

  static Dimension continuous(std::string name, double lo, double hi, int bits,
                              bool periodic = false);
  static Dimension discrete(std::string name, std::vector<double> values);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  bool is_continuous() const { return kind_ == Kind::kContinuous; }
  bool periodic() const { return periodic_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int bits() const { return bits_; }
  const std::vector<double>& values() const { return values_; }

  /// Number of valid codes: 2^bits or |values|.
  std::uint64_t num_cells() const;
  double cell_width() const;
  /// Same domain viewed with fewer bits (continuous only).
  Dimension with_bits(int bits) const;

  /// Left edge of cell idx; the only place cell boundaries are computed.
  double cell_lo(std::uint64_t idx) const { return lo_ + static_cast<double>(idx) * cell_width(); }

  friend bool operator==(const Dimension&, const Dimension&) = default;

 private:
  Dimension() = default;
  std::string name_;
  Kind kind_ = Kind::kContinuous;
  double lo_ = 0.0;
  double hi_ = 1.0;
  bool periodic_ = false;
  int bits_ = 0;
  std::vector<double> values_;
};

/// Half-open cell box [lo + idx*w, lo + (idx+1)*w). Periodic indices wrap.
Interval cell_box(const Dimension& dim, std::uint64_t idx);

/// Index of the cell containing x (continuous; x inside the domain or, for
/// periodic dimensions, anywhere).
std::uint64_t cell_of(const Dimension& dim, double x);

/// Minterm over `vars` (msb first) spelling idx.
Predicate encode_cell(Manager& mgr, const Dimension& dim, std::uint64_t idx, const BitVector& vars);

/// Codes first..last inclusive over `vars` (msb first), O(|vars|) nodes.
Predicate encode_range(Manager& mgr, const BitVector& vars, std::uint64_t first, std::uint64_t last);

/// A run of `count` consecutive cells starting at `first`; wraps around for
/// periodic dimensions.
struct CellSpan {
  std::uint64_t first = 0;
  std::uint64_t count = 0;
  friend bool operator==(const CellSpan&, const CellSpan&) = default;
};
Predicate encode_span(Manager& mgr, const Dimension& dim, const CellSpan& span, const BitVector& vars);

enum class EncodeMode { kInner, kOuter };

/// Cells inside (inner) or meeting (outer) the closed interval [a, b].
std::vector<CellSpan> interval_cells(const Dimension& dim, const Interval& interval, EncodeMode mode);
Predicate encode_set(Manager& mgr, const Dimension& dim, const Interval& interval, EncodeMode mode,
                     const BitVector& vars);

/// Outer cover of a half-open interval [a, b) produced by dynamics: cells
/// whose interior meets it. Empty optional when the interval leaves a
/// non-periodic domain.
std::optional<std::vector<CellSpan>> image_cells(const Dimension& dim, const Interval& image);

/// Valid codes of a discrete dimension (true for power-of-two sizes).
Predicate discrete_domain_predicate(Manager& mgr, const Dimension& dim, const BitVector& vars);

enum class QuantizerSide {
  kInput,   // Q(coarse, fine): inputs coarse, outputs fine; used by icoarsen
  kOutput,  // Q(fine, coarse): inputs fine, outputs coarse; used by ocoarsen
};

/// Bit-truncating quantizer: the first `keep` bits of fine and coarse agree.
Interface quantizer(Manager& mgr, const BitVector& fine, const BitVector& coarse, int keep,
                    QuantizerSide side);

/// Variables for a set of state and control dimensions. Per state bit k the
/// order is current, next, then a scratch copy used by quantizers; control
/// bits follow all state bits.
class SymbolicSpace {
 public:
  SymbolicSpace(std::vector<Dimension> states, std::vector<Dimension> controls,
                std::size_t node_limit = 0);

  Manager& manager() const { return *mgr_; }

  std::size_t num_dims() const { return dims_.size(); }
  std::size_t num_states() const { return num_states_; }
  bool is_state(std::size_t d) const { return d < num_states_; }
  const Dimension& dim(std::size_t d) const { return dims_.at(d).dim; }
  std::optional<std::size_t> find_dim(const std::string& name) const;

  /// Current-state bits of a state dimension, or the bits of a control.
  const BitVector& cur(std::size_t d) const { return dims_.at(d).cur; }
  const BitVector& next(std::size_t d) const;
  const BitVector& scratch(std::size_t d) const;

  VarSet state_vars() const;
  VarSet next_vars() const;
  VarSet control_vars() const;
  VarSet scratch_vars() const;

  std::vector<std::pair<VarId, VarId>> to_next() const;
  std::vector<std::pair<VarId, VarId>> to_current() const;

  /// Conjunction of discrete_domain_predicate over every control.
  Predicate control_domain() const;
  /// Product of per-state-dimension intervals (missing = whole dimension).
  Predicate state_box(const std::vector<std::optional<Interval>>& box, EncodeMode mode) const;
  /// Number of grid states satisfying a predicate over the current bits.
  std::uint64_t state_count(const Predicate& p) const;
  Interface state_sink(const Predicate& p) const { return Interface::sink(state_vars(), p); }

  const std::vector<Dimension>& dimensions() const { return plain_dims_; }

 private:
  struct Entry {
    Dimension dim;
    BitVector cur, next, scratch;
  };
  std::unique_ptr<Manager> mgr_;
  std::vector<Entry> dims_;
  std::vector<Dimension> plain_dims_;
  std::size_t num_states_ = 0;
};

}  // namespace relsynth
