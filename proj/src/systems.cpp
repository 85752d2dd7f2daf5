#include "relsynth/systems.hpp"

#include <cmath>
#include <numbers>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  double r = std::fmod(a + kPi, 2 * kPi);
  if (r < 0) r += 2 * kPi;
  return r - kPi;
}

}  // namespace

System make_dubins(const DubinsParams& p) {
  if (p.bits.size() != 3) throw ConfigError("dubins: bits needs three entries (p_x, p_y, theta)");
  if (!(p.length > 0)) throw ConfigError("dubins: vehicle length must be positive");
  std::vector<Dimension> states{
      Dimension::continuous("px", -p.extent, p.extent, p.bits[0]),
      Dimension::continuous("py", -p.extent, p.extent, p.bits[1]),
      Dimension::continuous("theta", -kPi, kPi, p.bits[2], true),
  };
  std::vector<Dimension> controls{Dimension::discrete("v", p.speeds), Dimension::discrete("omega", p.turn_rates)};
  System sys;
  sys.name = "dubins";
  sys.space = std::make_unique<SymbolicSpace>(std::move(states), std::move(controls), p.node_limit);
  const double len = p.length;
  constexpr std::size_t kPx = 0, kPy = 1, kTheta = 2, kV = 3, kOmega = 4;

  sys.components.push_back(DynamicsComponent{
      "F_x",
      {{kPx}, {kTheta}, {kV}},
      kPx,
      -1,
      [](std::span<const Interval> in) { return in[0] + in[2] * cos(in[1]); },
      [](std::span<const double> in) { return in[0] + in[2] * std::cos(in[1]); },
  });
  sys.components.push_back(DynamicsComponent{
      "F_y",
      {{kPy}, {kTheta}, {kV}},
      kPy,
      -1,
      [](std::span<const Interval> in) { return in[0] + in[2] * sin(in[1]); },
      [](std::span<const double> in) { return in[0] + in[2] * std::sin(in[1]); },
  });
  sys.components.push_back(DynamicsComponent{
      "F_theta",
      {{kTheta}, {kV}, {kOmega}},
      kTheta,
      -1,
      [len](std::span<const Interval> in) {
        Interval k{rounding::div_down(in[1].lo, len), rounding::div_up(in[1].hi, len)};
        return in[0] + k * sin(in[2]);
      },
      [len](std::span<const double> in) { return wrap_angle(in[0] + in[1] / len * std::sin(in[2])); },
  });
  // Innermost first: theta+, then p_y+, then p_x+.
  sys.order = {2, 1, 0};
  sys.objective = Objective::kReach;
  sys.target = {p.target_x, p.target_y, std::nullopt};
  sys.target_mode = p.target_mode;
  return sys;
}

System make_toy1d(const Toy1dParams& p) {
  if (p.controls.empty()) throw ConfigError("toy1d: needs at least one control value");
  System sys;
  sys.name = "toy1d";
  sys.space = std::make_unique<SymbolicSpace>(std::vector<Dimension>{Dimension::continuous("x", p.lo, p.hi, p.bits)},
                                              std::vector<Dimension>{Dimension::discrete("u", p.controls)},
                                              p.node_limit);
  sys.components.push_back(DynamicsComponent{
      "F_x",
      {{0}, {1}},
      0,
      -1,
      [](std::span<const Interval> in) { return in[0] + in[1]; },
      [](std::span<const double> in) { return in[0] + in[1]; },
  });
  sys.order = {0};
  sys.objective = p.objective;
  sys.target = {p.target};
  sys.target_mode = EncodeMode::kInner;
  return sys;
}

Interface objective_sink(const System& sys) {
  return sys.space->state_sink(sys.space->state_box(sys.target, sys.target_mode));
}

std::vector<Interface> abstract_components(const System& sys, const TraversalPlan& plan,
                                           std::vector<TraverseStats>* stats) {
  std::vector<Interface> out;
  if (stats) stats->clear();
  for (std::size_t k = 0; k < sys.components.size(); ++k) {
    TraversalPlan local = plan;
    // Independent random streams per component.
    local.random.seed = plan.random.seed + 0x9e3779b97f4a7c15ULL * k;
    TraverseStats st;
    out.push_back(traverse(*sys.space, sys.components[k], local, &st));
    if (stats) stats->push_back(st);
  }
  return out;
}

GameSpec make_game(const System& sys, std::vector<Interface> components) {
  GameSpec spec = GameSpec::from_space(*sys.space, std::move(components), sys.objective, objective_sink(sys));
  if (spec.components.size() == sys.order.size()) spec.order = sys.order;
  return spec;
}

}  // namespace relsynth
