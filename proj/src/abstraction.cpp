#include "relsynth/abstraction.hpp"

#include <chrono>
#include <exception>
#include <random>
#include <sstream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

ComponentLayout layout(const SymbolicSpace& space, const DynamicsComponent& comp) {
  if (!comp.evaluate) throw ConfigError("component " + comp.name + ": no evaluator");
  if (!space.is_state(comp.output_dim)) throw ConfigError("component " + comp.name + ": output must be a state");
  std::vector<Dimension> in_dims;
  std::vector<BitVector> in_bits;
  std::vector<VarId> ins;
  for (const InputView& v : comp.inputs) {
    const Dimension& d = space.dim(v.dim);
    int b = v.bits < 0 ? d.bits() : v.bits;
    if (!d.is_continuous() && b != d.bits()) throw ConfigError("component " + comp.name + ": discrete view");
    in_dims.push_back(d.is_continuous() ? d.with_bits(b) : d);
    in_bits.push_back(prefix(space.cur(v.dim), b));
    ins.insert(ins.end(), in_bits.back().begin(), in_bits.back().end());
  }
  const Dimension& od = space.dim(comp.output_dim);
  int ob = comp.output_bits < 0 ? od.bits() : comp.output_bits;
  BitVector out_bits = prefix(space.next(comp.output_dim), ob);
  VarSet inputs(std::move(ins));
  if (inputs.size() != [&] {
        std::size_t n = 0;
        for (const auto& b : in_bits) n += b.size();
        return n;
      }()) {
    throw ConfigError("component " + comp.name + ": repeated input dimension");
  }
  return ComponentLayout{std::move(in_dims), std::move(in_bits), od.with_bits(ob), out_bits, std::move(inputs),
                         to_set(out_bits)};
}

std::vector<Interval> sample_intervals(const ComponentLayout& lay, const SampleBox& box) {
  if (box.size() != lay.in_dims.size()) throw ConfigError("sample box arity mismatch");
  std::vector<Interval> ivs;
  ivs.reserve(box.size());
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Dimension& d = lay.in_dims[k];
    const CellSpan& s = box[k];
    if (s.count == 0 || s.first >= d.num_cells()) throw ConfigError("sample box outside the domain of " + d.name());
    if (!d.periodic() && s.first + s.count > d.num_cells()) {
      throw ConfigError("sample box outside the domain of " + d.name());
    }
    if (d.is_continuous()) {
      ivs.push_back({d.cell_lo(s.first), d.cell_lo(s.first + s.count)});
    } else {
      Interval hull = Interval::point(d.values()[s.first]);
      for (std::uint64_t j = 1; j < s.count; ++j) {
        double v = d.values()[s.first + j];
        hull = {std::min(hull.lo, v), std::max(hull.hi, v)};
      }
      ivs.push_back(hull);
    }
  }
  return ivs;
}

std::vector<SampleBox> split_wrapping(const ComponentLayout& lay, const SampleBox& box) {
  if (box.size() != lay.in_dims.size()) throw ConfigError("sample box arity mismatch");
  std::vector<SampleBox> pieces{box};
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Dimension& d = lay.in_dims[k];
    const CellSpan& s = box[k];
    if (!d.periodic() || s.count >= d.num_cells() || s.first + s.count <= d.num_cells()) continue;
    const CellSpan head{s.first, d.num_cells() - s.first}, tail{0, s.first + s.count - d.num_cells()};
    std::vector<SampleBox> next;
    for (SampleBox p : pieces) {
      p[k] = head;
      next.push_back(p);
      p[k] = tail;
      next.push_back(std::move(p));
    }
    pieces = std::move(next);
  }
  return pieces;
}

SampleImage evaluate_sample(const DynamicsComponent& comp, const ComponentLayout& lay, const SampleBox& box) {
  // Wrapped runs are evaluated per piece so every cell keeps the edges it
  // has in an exhaustive traversal.
  std::vector<CellSpan> cells;
  for (const SampleBox& piece : split_wrapping(lay, box)) {
    Interval img = comp.evaluate(sample_intervals(lay, piece));
    if (img.is_nan() || img.empty()) throw Error("component " + comp.name + ": evaluator returned an empty box");
    SampleImage part = image_cells(lay.out_dim, img);
    if (!part) return std::nullopt;
    cells.insert(cells.end(), part->begin(), part->end());
  }
  return cells;
}

std::vector<SampleImage> evaluate_samples_serial(const DynamicsComponent& comp, const ComponentLayout& lay,
                                                 std::span<const SampleBox> boxes) {
  std::vector<SampleImage> out;
  out.reserve(boxes.size());
  for (const SampleBox& b : boxes) out.push_back(evaluate_sample(comp, lay, b));
  return out;
}

std::vector<SampleImage> evaluate_samples_parallel(const DynamicsComponent& comp, const ComponentLayout& lay,
                                                   std::span<const SampleBox> boxes) {
  std::vector<SampleImage> out(boxes.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(boxes.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = evaluate_sample(comp, lay, boxes[i]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Interface sample_interface(Manager& mgr, const ComponentLayout& lay, const SampleBox& box, const SampleImage& img) {
  if (!img) return Interface(lay.inputs, lay.outputs, mgr.bot());
  Predicate o = mgr.bot();
  for (const CellSpan& s : *img) o |= encode_span(mgr, lay.out_dim, s, lay.out_bits);
  Predicate p = o;
  for (std::size_t k = box.size(); k-- > 0;) p &= encode_span(mgr, lay.in_dims[k], box[k], lay.in_bits[k]);
  return Interface(lay.inputs, lay.outputs, std::move(p));
}

Interface sample_to_interface(const SymbolicSpace& space, const DynamicsComponent& comp, const SampleBox& box) {
  ComponentLayout lay = layout(space, comp);
  return sample_interface(space.manager(), lay, box, evaluate_sample(comp, lay, box));
}

SampleBox snap_box(const ComponentLayout& lay, std::span<const Interval> box) {
  if (box.size() != lay.in_dims.size()) throw ConfigError("snap_box: arity mismatch");
  SampleBox out;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Dimension& d = lay.in_dims[k];
    if (d.is_continuous()) {
      if (!d.periodic() && (box[k].lo < d.lo() || box[k].hi > d.hi())) {
        throw ConfigError("snap_box: box outside the domain of " + d.name());
      }
      auto spans = interval_cells(d, box[k], EncodeMode::kOuter);
      if (spans.size() != 1) throw ConfigError("snap_box: box does not meet " + d.name());
      out.push_back(spans.front());
    } else {
      if (box[k].lo != box[k].hi) throw ConfigError("snap_box: discrete input needs a single value");
      const auto& vals = d.values();
      auto it = std::find(vals.begin(), vals.end(), box[k].lo);
      if (it == vals.end()) throw ConfigError("snap_box: value outside the domain of " + d.name());
      out.push_back({static_cast<std::uint64_t>(it - vals.begin()), 1});
    }
  }
  return out;
}

TraversalPlan TraversalPlan::random_rects(std::size_t count, std::uint64_t seed, double max_width_fraction) {
  TraversalPlan p;
  p.kind = Kind::kRandomRects;
  p.random = {count, seed, max_width_fraction};
  return p;
}

TraversalPlan TraversalPlan::shifted_grids(std::vector<GridPass> passes) {
  TraversalPlan p;
  p.kind = Kind::kShiftedGrids;
  p.grids.passes = std::move(passes);
  return p;
}

std::string TraversalPlan::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kExhaustive:
      out << "exhaustive";
      break;
    case Kind::kRandomRects:
      out << "random_rects count=" << random.count << " seed=" << random.seed
          << " max_width_fraction=" << random.max_width_fraction;
      break;
    case Kind::kShiftedGrids:
      out << "shifted_grids";
      for (const auto& g : grids.passes) out << ' ' << g.cell_width << '+' << g.offset;
      break;
  }
  return out.str();
}

namespace {

// Cartesian product of per-input choices, last input fastest.
std::vector<SampleBox> product(const std::vector<std::vector<CellSpan>>& choices) {
  std::vector<SampleBox> out;
  for (const auto& c : choices)
    if (c.empty()) return out;
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    SampleBox b;
    for (std::size_t k = 0; k < choices.size(); ++k) b.push_back(choices[k][idx[k]]);
    out.push_back(std::move(b));
    std::size_t k = choices.size();
    while (k > 0) {
      --k;
      if (++idx[k] < choices[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (choices.empty()) return out;
  }
}

std::vector<CellSpan> singles(const Dimension& d) {
  std::vector<CellSpan> out;
  for (std::uint64_t i = 0; i < d.num_cells(); ++i) out.push_back({i, 1});
  return out;
}

std::vector<CellSpan> grid_blocks(const Dimension& d, const GridPass& pass) {
  if (!d.is_continuous()) return singles(d);
  if (pass.cell_width == 0) throw ConfigError("shifted grid: zero cell width");
  const auto n = static_cast<std::int64_t>(d.num_cells());
  const auto w = static_cast<std::int64_t>(pass.cell_width);
  const auto off = static_cast<std::int64_t>(pass.offset % pass.cell_width);
  std::vector<CellSpan> out;
  for (std::int64_t s = -off; s < n; s += w) {
    std::int64_t a = std::max<std::int64_t>(s, 0), b = std::min<std::int64_t>(s + w, n);
    if (a < b) out.push_back({static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b - a)});
  }
  return out;
}

std::vector<SampleBox> random_boxes(const ComponentLayout& lay, const RandomRectsPlan& plan) {
  if (plan.max_width_fraction < 0.0 || plan.max_width_fraction > 1.0) {
    throw ConfigError("random_rects: max_width_fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SampleBox> out;
  out.reserve(plan.count);
  std::vector<Interval> box(lay.in_dims.size());
  for (std::size_t s = 0; s < plan.count; ++s) {
    for (std::size_t k = 0; k < lay.in_dims.size(); ++k) {
      const Dimension& d = lay.in_dims[k];
      if (!d.is_continuous()) {
        auto i = static_cast<std::size_t>(unit(rng) * static_cast<double>(d.values().size()));
        i = std::min(i, d.values().size() - 1);
        box[k] = Interval::point(d.values()[i]);
        continue;
      }
      double range = d.hi() - d.lo();
      double width = unit(rng) * plan.max_width_fraction * range;
      // Offsets keep the rectangle inside the domain; periodic ones may wrap.
      double lo = d.periodic() ? d.lo() + unit(rng) * range : d.lo() + unit(rng) * (range - width);
      box[k] = {lo, std::min(lo + width, d.periodic() ? lo + width : d.hi())};
    }
    out.push_back(snap_box(lay, box));
  }
  return out;
}

}  // namespace

std::vector<SampleBox> plan_samples(const ComponentLayout& lay, const TraversalPlan& plan) {
  switch (plan.kind) {
    case TraversalPlan::Kind::kExhaustive: {
      std::vector<std::vector<CellSpan>> choices;
      for (const Dimension& d : lay.in_dims) choices.push_back(singles(d));
      return product(choices);
    }
    case TraversalPlan::Kind::kRandomRects:
      return random_boxes(lay, plan.random);
    case TraversalPlan::Kind::kShiftedGrids: {
      std::vector<SampleBox> out;
      for (const GridPass& pass : plan.grids.passes) {
        std::vector<std::vector<CellSpan>> choices;
        for (const Dimension& d : lay.in_dims) choices.push_back(grid_blocks(d, pass));
        auto boxes = product(choices);
        out.insert(out.end(), boxes.begin(), boxes.end());
      }
      return out;
    }
  }
  return {};
}

RefineFold::RefineFold(Manager& mgr, VarSet inputs, VarSet outputs)
    : mgr_(&mgr), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {}

void RefineFold::push(Interface f) {
  int level = 0;
  while (!stack_.empty() && stack_.back().first == level) {
    f = refine(stack_.back().second, f);
    stack_.pop_back();
    ++level;
  }
  stack_.emplace_back(level, std::move(f));
}

Interface RefineFold::result() const {
  Interface acc(inputs_, outputs_, mgr_->bot());
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) acc = refine(it->second, acc);
  return acc;
}

Interface refine_sequential(std::span<const Interface> parts, const VarSet& inputs, const VarSet& outputs,
                            Manager& mgr) {
  Interface acc(inputs, outputs, mgr.bot());
  for (const Interface& p : parts) acc = refine(acc, p);
  return acc;
}

Interface traverse(const SymbolicSpace& space, const DynamicsComponent& comp, const TraversalPlan& plan,
                   TraverseStats* stats) {
  ComponentLayout lay = layout(space, comp);
  Manager& mgr = space.manager();
  std::vector<SampleBox> boxes = plan_samples(lay, plan);
  auto t0 = Clock::now();
  std::vector<SampleImage> images =
      plan.parallel ? evaluate_samples_parallel(comp, lay, boxes) : evaluate_samples_serial(comp, lay, boxes);
  double kernel = seconds_since(t0);
  t0 = Clock::now();
  RefineFold fold(mgr, lay.inputs, lay.outputs);
  std::size_t blocked = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!images[i]) {
      ++blocked;
      continue;  // bottom is the unit of refine
    }
    fold.push(sample_interface(mgr, lay, boxes[i], images[i]));
  }
  Interface result = fold.result();
  if (stats) *stats = {boxes.size(), blocked, kernel, seconds_since(t0)};
  return result;
}

}  // namespace relsynth
