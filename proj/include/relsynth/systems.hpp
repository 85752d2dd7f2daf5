#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relsynth/abstraction.hpp"
#include "relsynth/games.hpp"
#include "relsynth/spaces.hpp"

namespace relsynth {

/// A concrete system: symbolic space, dynamics components whose outputs
/// partition the next state, and an objective box.
struct System {
  std::string name;
  std::unique_ptr<SymbolicSpace> space;
  std::vector<DynamicsComponent> components;
  /// Elimination order for the decomposed predecessor, innermost first.
  std::vector<std::size_t> order;
  Objective objective = Objective::kReach;
  std::vector<std::optional<Interval>> target;  // per state dimension
  EncodeMode target_mode = EncodeMode::kInner;
};

/// Dubins vehicle: p_x, p_y in [-2, 2], theta in [-pi, pi) periodic,
/// v in {0.25, 0.5}, omega in {-1.5, 0, 1.5}, L = 1.4, unit time step.
struct DubinsParams {
  std::vector<int> bits{7, 7, 7};  // p_x, p_y, theta
  double extent = 2.0;
  double length = 1.4;
  std::vector<double> speeds{0.25, 0.5};
  std::vector<double> turn_rates{-1.5, 0.0, 1.5};
  Interval target_x{-0.4, 0.4};
  Interval target_y{-0.4, 0.4};
  EncodeMode target_mode = EncodeMode::kInner;
  std::size_t node_limit = 0;
};
System make_dubins(const DubinsParams& params = {});

/// x in [lo, hi], x+ = x + u over a finite control list.
struct Toy1dParams {
  int bits = 3;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> controls{0.0};
  Objective objective = Objective::kReach;
  Interval target{0.5, 1.0};
  std::size_t node_limit = 0;
};
System make_toy1d(const Toy1dParams& params = {});

/// Objective set of a system as a sink over the current state bits.
Interface objective_sink(const System& sys);

/// Abstraction of every component with one traversal plan.
std::vector<Interface> abstract_components(const System& sys, const TraversalPlan& plan,
                                           std::vector<TraverseStats>* stats = nullptr);

/// Game spec over abstracted components (decomposed, with the system's
/// elimination order).
GameSpec make_game(const System& sys, std::vector<Interface> components);

}  // namespace relsynth
