#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polarsim/graph.hpp"
#include "polarsim/rng.hpp"

namespace polarsim {

using Opinion = std::int8_t;

/// Per-node opinions, each in {-1, 0, +1}.
class StateVector {
 public:
  StateVector() = default;
  /// Throws std::invalid_argument if any entry is outside {-1, 0, +1}.
  explicit StateVector(std::vector<Opinion> values);

  static StateVector filled(std::size_t n, Opinion value);

  std::size_t size() const { return values_.size(); }
  Opinion operator[](std::size_t i) const { return values_[i]; }
  std::span<const Opinion> values() const { return values_; }
  std::size_t count(Opinion value) const;

  StateVector negated() const;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<Opinion> values_;
};

enum class Convergence { FixedPoint, Cycle, MaxIterations };

struct SteadyStateResult {
  StateVector final_state;
  Convergence status = Convergence::MaxIterations;
  std::size_t period = 0;  // 1 for FixedPoint, p >= 2 for Cycle, 0 otherwise
  std::size_t iterations = 0;
  std::vector<StateVector> cycle_states;  // the p states of a cycle, ending at final_state
};

/// "FixedPoint", "Cycle(2)", "MaxIterations".
std::string status_label(Convergence status, std::size_t period);

/// +1 at seed_plus, -1 at seed_minus, 0 elsewhere.
StateVector init_sic(std::size_t n, NodeId seed_plus, NodeId seed_minus);

/// Independent fair +1/-1 draws.
StateVector init_ric(std::size_t n, RngSeed seed);

/// One synchronous majority update: x_i <- sign(x_i + sum over neighbours x_j),
/// with sign(0) = 0.
StateVector step(const Graph& g, const StateVector& x);

/// Allocation-free form of step(); `out` must not alias `in`.
void step_into(const Graph& g, std::span<const Opinion> in, std::span<Opinion> out);

inline constexpr std::size_t kDefaultMaxIterations = 1000;
inline constexpr std::size_t kDefaultCycleWindow = 4;

/// Iterates step() until x(t+1) == x(t), a cycle of period 2..cycle_window is
/// seen, or max_iter updates have been applied.
SteadyStateResult evolve_to_steady(const Graph& g, StateVector x0,
                                   std::size_t max_iter = kDefaultMaxIterations,
                                   std::size_t cycle_window = kDefaultCycleWindow);

}  // namespace polarsim
