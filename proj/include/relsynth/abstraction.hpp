#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relsynth/interface.hpp"
#include "relsynth/interval.hpp"
#include "relsynth/spaces.hpp"

namespace relsynth {

/// One input of a dynamics component: a dimension of the space read at
/// `bits` precision (a prefix of its bit vector; -1 means full).
struct InputView {
  std::size_t dim = 0;
  int bits = -1;
};

/// A next-state map for one output dimension with an interval evaluator.
/// The evaluator receives one interval per input (discrete inputs as point
/// intervals) and must return a superset of the image.
struct DynamicsComponent {
  std::string name;
  std::vector<InputView> inputs;
  std::size_t output_dim = 0;
  int output_bits = -1;
  std::function<Interval(std::span<const Interval>)> evaluate;
  /// Exact successor of a concrete point; optional, used for checking.
  std::function<double(std::span<const double>)> point;
};

/// Per-input run of cells at the input's view precision.
using SampleBox = std::vector<CellSpan>;

/// Sample outcome: output cells, or nullopt when the image leaves a
/// non-periodic domain (the sample then blocks).
using SampleImage = std::optional<std::vector<CellSpan>>;

/// Resolved views of a component against a space.
struct ComponentLayout {
  std::vector<Dimension> in_dims;   // at view precision
  std::vector<BitVector> in_bits;   // current-state or control bits
  Dimension out_dim;
  BitVector out_bits;               // next-state bits
  VarSet inputs;
  VarSet outputs;
};
ComponentLayout layout(const SymbolicSpace& space, const DynamicsComponent& comp);

/// Interval box of the cells a sample covers (periodic spans unwrap past hi).
std::vector<Interval> sample_intervals(const ComponentLayout& lay, const SampleBox& box);

/// Splits runs that wrap around a periodic dimension into two runs each.
std::vector<SampleBox> split_wrapping(const ComponentLayout& lay, const SampleBox& box);

/// Evaluator image of one sample mapped to output cells.
SampleImage evaluate_sample(const DynamicsComponent& comp, const ComponentLayout& lay, const SampleBox& box);

/// Reference kernel and its OpenMP twin; results are identical.
std::vector<SampleImage> evaluate_samples_serial(const DynamicsComponent& comp, const ComponentLayout& lay,
                                                 std::span<const SampleBox> boxes);
std::vector<SampleImage> evaluate_samples_parallel(const DynamicsComponent& comp, const ComponentLayout& lay,
                                                   std::span<const SampleBox> boxes);

/// I & O: I encodes the input cells, O the output cells. Blocking samples
/// give the bottom interface.
Interface sample_interface(Manager& mgr, const ComponentLayout& lay, const SampleBox& box, const SampleImage& img);
Interface sample_to_interface(const SymbolicSpace& space, const DynamicsComponent& comp, const SampleBox& box);

/// Smallest sample box covering a continuous/discrete box (outer).
/// Discrete inputs take the single value's code; the interval must be a point.
SampleBox snap_box(const ComponentLayout& lay, std::span<const Interval> box);

struct RandomRectsPlan {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  /// Widths are uniform in [0, fraction * range] per continuous input.
  double max_width_fraction = 1.0;
};
struct GridPass {
  std::uint64_t cell_width = 1;  // in cells of the view precision
  std::uint64_t offset = 0;      // shift of the grid origin, in cells
};
struct ShiftedGridsPlan {
  std::vector<GridPass> passes{{2, 0}, {2, 1}};
};

struct TraversalPlan {
  enum class Kind { kExhaustive, kRandomRects, kShiftedGrids };
  Kind kind = Kind::kExhaustive;
  RandomRectsPlan random;
  ShiftedGridsPlan grids;
  bool parallel = true;

  static TraversalPlan exhaustive() { return {}; }
  static TraversalPlan random_rects(std::size_t count, std::uint64_t seed, double max_width_fraction = 1.0);
  static TraversalPlan shifted_grids(std::vector<GridPass> passes);
  std::string describe() const;
};

/// The sample boxes a plan visits, in fold order.
std::vector<SampleBox> plan_samples(const ComponentLayout& lay, const TraversalPlan& plan);

/// Balanced pairwise refine fold in binary-counter order; equals the
/// sequential fold from bottom whenever the parts are shared refinable.
class RefineFold {
 public:
  RefineFold(Manager& mgr, VarSet inputs, VarSet outputs);
  void push(Interface f);
  Interface result() const;

 private:
  Manager* mgr_;
  VarSet inputs_, outputs_;
  std::vector<std::pair<int, Interface>> stack_;
};

/// Sequential fold refine(...refine(refine(bottom, p0), p1)..., pn).
Interface refine_sequential(std::span<const Interface> parts, const VarSet& inputs, const VarSet& outputs,
                            Manager& mgr);

struct TraverseStats {
  std::size_t samples = 0;
  std::size_t blocked = 0;
  double kernel_seconds = 0.0;
  double fold_seconds = 0.0;
};

Interface traverse(const SymbolicSpace& space, const DynamicsComponent& comp, const TraversalPlan& plan,
                   TraverseStats* stats = nullptr);

}  // namespace relsynth
