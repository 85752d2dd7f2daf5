#include "relsynth/spaces.hpp"

#include <cmath>

#include "relsynth/errors.hpp"

namespace relsynth {

// -------------------------------------------------------------- Dimension

Dimension Dimension::continuous(std::string name, double lo, double hi, int bits, bool periodic) {
  if (!(lo < hi)) throw ConfigError("dimension " + name + ": need lo < hi");
  if (bits < 0 || bits > 30) throw ConfigError("dimension " + name + ": bits out of range");
  Dimension d;
  d.name_ = std::move(name);
  d.kind_ = Kind::kContinuous;
  d.lo_ = lo;
  d.hi_ = hi;
  d.periodic_ = periodic;
  d.bits_ = bits;
  return d;
}

Dimension Dimension::discrete(std::string name, std::vector<double> values) {
  if (values.empty()) throw ConfigError("dimension " + name + ": no values");
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j]) throw ConfigError("dimension " + name + ": duplicate values");
  Dimension d;
  d.name_ = std::move(name);
  d.kind_ = Kind::kDiscrete;
  d.values_ = std::move(values);
  int bits = 0;
  while ((std::uint64_t{1} << bits) < d.values_.size()) ++bits;
  d.bits_ = bits;
  d.lo_ = 0.0;
  d.hi_ = static_cast<double>(d.values_.size());
  return d;
}

std::uint64_t Dimension::num_cells() const {
  return is_continuous() ? (std::uint64_t{1} << bits_) : values_.size();
}

double Dimension::cell_width() const {
  return (hi_ - lo_) / static_cast<double>(std::uint64_t{1} << bits_);
}

Dimension Dimension::with_bits(int bits) const {
  if (!is_continuous()) throw ConfigError("dimension " + name_ + ": discrete precision is fixed");
  if (bits < 0 || bits > bits_) throw ConfigError("dimension " + name_ + ": view bits out of range");
  Dimension d = *this;
  d.bits_ = bits;
  return d;
}

// ---------------------------------------------------------------- cells

Interval cell_box(const Dimension& dim, std::uint64_t idx) {
  if (!dim.is_continuous()) throw ConfigError("cell_box: discrete dimension " + dim.name());
  std::uint64_t n = dim.num_cells();
  if (dim.periodic()) idx %= n;
  if (idx >= n) throw ConfigError("cell_box: index out of range");
  return {dim.cell_lo(idx), dim.cell_lo(idx + 1)};
}

std::uint64_t cell_of(const Dimension& dim, double x) {
  std::uint64_t n = dim.num_cells();
  double period = dim.hi() - dim.lo();
  if (dim.periodic()) {
    x = dim.lo() + std::fmod(x - dim.lo(), period);
    if (x < dim.lo()) x += period;
    if (x >= dim.hi()) x = dim.lo();
  }
  auto i = static_cast<std::int64_t>(std::floor((x - dim.lo()) / dim.cell_width()));
  i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(n) - 1);
  while (i > 0 && dim.cell_lo(i) > x) --i;
  while (i + 1 < static_cast<std::int64_t>(n) && dim.cell_lo(i + 1) <= x) ++i;
  return static_cast<std::uint64_t>(i);
}

Predicate encode_cell(Manager& mgr, const Dimension& dim, std::uint64_t idx, const BitVector& vars) {
  if (static_cast<int>(vars.size()) != dim.bits()) {
    throw ConfigError("encode_cell: bit vector width does not match dimension " + dim.name());
  }
  if (idx >= dim.num_cells()) throw ConfigError("encode_cell: index out of range");
  bool bits[64];
  for (std::size_t k = 0; k < vars.size(); ++k) bits[k] = (idx >> (vars.size() - 1 - k)) & 1u;
  return mgr.minterm(vars, std::span<const bool>(bits, vars.size()));
}

Predicate encode_range(Manager& mgr, const BitVector& vars, std::uint64_t first, std::uint64_t last) {
  const std::size_t n = vars.size();
  if (first > last) return mgr.bot();
  if (n < 64 && last >= (std::uint64_t{1} << n)) throw ConfigError("encode_range: code out of range");
  // geq(k): suffix bits k.. spell a value >= first's suffix; leq likewise.
  // Built bottom-up so each level is a handful of nodes.
  Predicate geq = mgr.top(), leq = mgr.top();
  for (std::size_t kk = n; kk-- > 0;) {
    bool fb = (first >> (n - 1 - kk)) & 1u;
    bool lb = (last >> (n - 1 - kk)) & 1u;
    Predicate x = mgr.var(vars[kk]);
    geq = fb ? (x & geq) : (x | geq);
    leq = lb ? ((!x) | leq) : ((!x) & leq);
  }
  return geq & leq;
}

Predicate encode_span(Manager& mgr, const Dimension& dim, const CellSpan& span, const BitVector& vars) {
  if (static_cast<int>(vars.size()) != dim.bits()) {
    throw ConfigError("encode_span: bit vector width does not match dimension " + dim.name());
  }
  std::uint64_t n = dim.num_cells();
  if (span.count == 0) return mgr.bot();
  if (span.count >= n) {
    return dim.is_continuous() ? mgr.top() : encode_range(mgr, vars, 0, n - 1);
  }
  if (span.first >= n) throw ConfigError("encode_span: start out of range");
  std::uint64_t last = span.first + span.count - 1;
  if (last < n) return encode_range(mgr, vars, span.first, last);
  if (!dim.periodic()) throw ConfigError("encode_span: span runs past a non-periodic domain");
  return encode_range(mgr, vars, span.first, n - 1) | encode_range(mgr, vars, 0, last - n);
}

namespace {

// Shifts by whole periods; rounding grows (outward) or shrinks the interval.
Interval shift_by(Interval iv, double delta, bool outward) {
  if (delta == 0.0) return iv;
  if (outward) return {rounding::add_down(iv.lo, delta), rounding::add_up(iv.hi, delta)};
  return {rounding::add_up(iv.lo, delta), rounding::add_down(iv.hi, delta)};
}

// Splits a periodic interval into pieces inside [lo, hi).
std::vector<Interval> unwrap(const Dimension& dim, Interval iv, bool outward) {
  double period = dim.hi() - dim.lo();
  if (iv.width() >= period) return {{dim.lo(), dim.hi()}};
  double k = std::floor((iv.lo - dim.lo()) / period);
  iv = shift_by(iv, -k * period, outward);
  if (iv.lo < dim.lo()) iv = shift_by(iv, period, outward);
  if (iv.lo >= dim.hi()) iv = shift_by(iv, -period, outward);
  if (iv.hi <= dim.hi()) return {iv};
  Interval tail = shift_by({dim.hi(), iv.hi}, -period, outward);
  return {{iv.lo, dim.hi()}, {dim.lo(), tail.hi}};
}

// Runs of flagged cells, merged across the wrap for periodic dimensions.
std::vector<CellSpan> runs(const std::vector<bool>& flags, bool periodic) {
  std::vector<CellSpan> out;
  const std::uint64_t n = flags.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!flags[i]) continue;
    if (!out.empty() && out.back().first + out.back().count == i) {
      ++out.back().count;
    } else {
      out.push_back({i, 1});
    }
  }
  if (periodic && out.size() > 1 && out.front().first == 0 &&
      out.back().first + out.back().count == n) {
    out.back().count += out.front().count;
    out.erase(out.begin());
  }
  return out;
}

}  // namespace

std::vector<CellSpan> interval_cells(const Dimension& dim, const Interval& interval, EncodeMode mode) {
  if (!dim.is_continuous()) throw ConfigError("interval_cells: discrete dimension " + dim.name());
  if (interval.is_nan() || interval.lo > interval.hi) {
    throw ConfigError("encode_set: invalid interval on " + dim.name());
  }
  const std::uint64_t n = dim.num_cells();
  std::vector<Interval> pieces = dim.periodic() ? unwrap(dim, interval, mode == EncodeMode::kOuter)
                                               : std::vector<Interval>{interval};
  std::vector<bool> flags(n, false);
  for (const Interval& iv : pieces) {
    for (std::uint64_t i = 0; i < n; ++i) {
      double c0 = dim.cell_lo(i), c1 = dim.cell_lo(i + 1);
      bool hit = mode == EncodeMode::kInner ? (iv.lo <= c0 && c1 <= iv.hi)
                                            : (c0 <= iv.hi && iv.lo < c1);
      if (hit) flags[i] = true;
    }
  }
  return runs(flags, dim.periodic());
}

Predicate encode_set(Manager& mgr, const Dimension& dim, const Interval& interval, EncodeMode mode,
                     const BitVector& vars) {
  Predicate out = mgr.bot();
  for (const CellSpan& s : interval_cells(dim, interval, mode)) out |= encode_span(mgr, dim, s, vars);
  return out;
}

std::optional<std::vector<CellSpan>> image_cells(const Dimension& dim, const Interval& image) {
  if (image.is_nan() || image.lo > image.hi) return std::nullopt;
  const std::uint64_t n = dim.num_cells();
  std::vector<Interval> pieces;
  if (dim.periodic()) {
    pieces = unwrap(dim, image, true);
  } else {
    if (image.lo < dim.lo() || image.hi > dim.hi()) return std::nullopt;
    pieces = {image};
  }
  std::vector<CellSpan> out;
  for (const Interval& iv : pieces) {
    if (iv.lo == iv.hi) {
      std::uint64_t c = cell_of(dim, iv.lo);
      out.push_back({c, 1});
      continue;
    }
    // First cell with cell_hi > lo, last cell with cell_lo < hi.
    std::uint64_t first = cell_of(dim, iv.lo);
    std::uint64_t last = first;
    while (last + 1 < n && dim.cell_lo(last + 1) < iv.hi) ++last;
    out.push_back({first, last - first + 1});
  }
  if (out.size() == 2) {
    // Merge pieces that touch across the wrap.
    std::vector<bool> flags(n, false);
    for (const auto& s : out)
      for (std::uint64_t k = 0; k < s.count; ++k) flags[(s.first + k) % n] = true;
    return runs(flags, dim.periodic());
  }
  return out;
}

Predicate discrete_domain_predicate(Manager& mgr, const Dimension& dim, const BitVector& vars) {
  if (dim.is_continuous()) throw ConfigError("discrete_domain_predicate: continuous dimension");
  if (static_cast<int>(vars.size()) != dim.bits()) {
    throw ConfigError("discrete_domain_predicate: bit vector width mismatch");
  }
  return encode_range(mgr, vars, 0, dim.num_cells() - 1);
}

Interface quantizer(Manager& mgr, const BitVector& fine, const BitVector& coarse, int keep,
                    QuantizerSide side) {
  if (keep < 0 || keep > static_cast<int>(std::min(fine.size(), coarse.size()))) {
    throw SignatureError("quantizer: keep exceeds the bit vector widths");
  }
  Predicate p = mgr.top();
  for (int k = keep; k-- > 0;) p &= mgr.var(fine[k]).iff(mgr.var(coarse[k]));
  if (side == QuantizerSide::kInput) return Interface(to_set(coarse), to_set(fine), p);
  return Interface(to_set(fine), to_set(coarse), p);
}

// ---------------------------------------------------------- SymbolicSpace

SymbolicSpace::SymbolicSpace(std::vector<Dimension> states, std::vector<Dimension> controls,
                             std::size_t node_limit) {
  std::vector<std::string> names;
  num_states_ = states.size();
  for (auto& d : states) {
    Entry e{d, {}, {}, {}};
    for (int k = 0; k < d.bits(); ++k) {
      const std::string suffix = "." + std::to_string(k);
      e.cur.push_back(static_cast<VarId>(names.size()));
      names.push_back(d.name() + suffix);
      e.next.push_back(static_cast<VarId>(names.size()));
      names.push_back(d.name() + "'" + suffix);
      e.scratch.push_back(static_cast<VarId>(names.size()));
      names.push_back(d.name() + "^" + suffix);
    }
    dims_.push_back(std::move(e));
    plain_dims_.push_back(d);
  }
  for (auto& d : controls) {
    Entry e{d, {}, {}, {}};
    for (int k = 0; k < d.bits(); ++k) {
      e.cur.push_back(static_cast<VarId>(names.size()));
      names.push_back(d.name() + "." + std::to_string(k));
    }
    dims_.push_back(std::move(e));
    plain_dims_.push_back(d);
  }
  for (std::size_t i = 0; i < dims_.size(); ++i)
    for (std::size_t j = i + 1; j < dims_.size(); ++j)
      if (dims_[i].dim.name() == dims_[j].dim.name())
        throw ConfigError("duplicate dimension name " + dims_[i].dim.name());
  mgr_ = std::make_unique<Manager>(std::move(names), node_limit);
}

std::optional<std::size_t> SymbolicSpace::find_dim(const std::string& name) const {
  for (std::size_t d = 0; d < dims_.size(); ++d)
    if (dims_[d].dim.name() == name) return d;
  return std::nullopt;
}

const BitVector& SymbolicSpace::next(std::size_t d) const {
  if (!is_state(d)) throw ConfigError("next bits requested for control " + dim(d).name());
  return dims_[d].next;
}

const BitVector& SymbolicSpace::scratch(std::size_t d) const {
  if (!is_state(d)) throw ConfigError("scratch bits requested for control " + dim(d).name());
  return dims_[d].scratch;
}

VarSet SymbolicSpace::state_vars() const {
  std::vector<VarId> ids;
  for (std::size_t d = 0; d < num_states_; ++d) ids.insert(ids.end(), dims_[d].cur.begin(), dims_[d].cur.end());
  return VarSet(std::move(ids));
}

VarSet SymbolicSpace::next_vars() const {
  std::vector<VarId> ids;
  for (std::size_t d = 0; d < num_states_; ++d) ids.insert(ids.end(), dims_[d].next.begin(), dims_[d].next.end());
  return VarSet(std::move(ids));
}

VarSet SymbolicSpace::scratch_vars() const {
  std::vector<VarId> ids;
  for (std::size_t d = 0; d < num_states_; ++d)
    ids.insert(ids.end(), dims_[d].scratch.begin(), dims_[d].scratch.end());
  return VarSet(std::move(ids));
}

VarSet SymbolicSpace::control_vars() const {
  std::vector<VarId> ids;
  for (std::size_t d = num_states_; d < dims_.size(); ++d)
    ids.insert(ids.end(), dims_[d].cur.begin(), dims_[d].cur.end());
  return VarSet(std::move(ids));
}

std::vector<std::pair<VarId, VarId>> SymbolicSpace::to_next() const {
  std::vector<std::pair<VarId, VarId>> map;
  for (std::size_t d = 0; d < num_states_; ++d)
    for (std::size_t k = 0; k < dims_[d].cur.size(); ++k) map.emplace_back(dims_[d].cur[k], dims_[d].next[k]);
  return map;
}

std::vector<std::pair<VarId, VarId>> SymbolicSpace::to_current() const {
  std::vector<std::pair<VarId, VarId>> map;
  for (std::size_t d = 0; d < num_states_; ++d)
    for (std::size_t k = 0; k < dims_[d].cur.size(); ++k) map.emplace_back(dims_[d].next[k], dims_[d].cur[k]);
  return map;
}

Predicate SymbolicSpace::control_domain() const {
  Predicate p = mgr_->top();
  for (std::size_t d = num_states_; d < dims_.size(); ++d) {
    if (dims_[d].dim.is_continuous()) continue;
    p &= discrete_domain_predicate(*mgr_, dims_[d].dim, dims_[d].cur);
  }
  return p;
}

Predicate SymbolicSpace::state_box(const std::vector<std::optional<Interval>>& box, EncodeMode mode) const {
  if (box.size() > num_states_) throw ConfigError("state_box: too many intervals");
  Predicate p = mgr_->top();
  for (std::size_t d = 0; d < box.size(); ++d) {
    if (!box[d]) continue;
    p &= encode_set(*mgr_, dims_[d].dim, *box[d], mode, dims_[d].cur);
  }
  return p;
}

std::uint64_t SymbolicSpace::state_count(const Predicate& p) const {
  return mgr_->sat_count(p, state_vars());
}

}  // namespace relsynth
