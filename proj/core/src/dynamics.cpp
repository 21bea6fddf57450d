#include "polarsim/dynamics.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace polarsim {

StateVector::StateVector(std::vector<Opinion> values) : values_(std::move(values)) {
  for (Opinion v : values_) {
    if (v < -1 || v > 1) throw std::invalid_argument("opinion values must be -1, 0 or +1");
  }
}

StateVector StateVector::filled(std::size_t n, Opinion value) {
  return StateVector(std::vector<Opinion>(n, value));
}

std::size_t StateVector::count(Opinion value) const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), value));
}

StateVector StateVector::negated() const {
  std::vector<Opinion> flipped(values_.size());
  std::transform(values_.begin(), values_.end(), flipped.begin(),
                 [](Opinion v) { return static_cast<Opinion>(-v); });
  return StateVector(std::move(flipped));
}

std::string status_label(Convergence status, std::size_t period) {
  switch (status) {
    case Convergence::FixedPoint:
      return "FixedPoint";
    case Convergence::Cycle:
      return "Cycle(" + std::to_string(period) + ")";
    case Convergence::MaxIterations:
      return "MaxIterations";
  }
  return "Unknown";
}

StateVector init_sic(std::size_t n, NodeId seed_plus, NodeId seed_minus) {
  if (seed_plus == seed_minus) throw std::invalid_argument("seed nodes must differ");
  if (seed_plus >= n || seed_minus >= n) throw std::invalid_argument("seed node out of range");
  std::vector<Opinion> values(n, 0);
  values[seed_plus] = 1;
  values[seed_minus] = -1;
  return StateVector(std::move(values));
}

StateVector init_ric(std::size_t n, RngSeed seed) {
  Engine engine = seed.engine();
  std::bernoulli_distribution coin(0.5);
  std::vector<Opinion> values(n);
  for (auto& v : values) v = coin(engine) ? Opinion{1} : Opinion{-1};
  return StateVector(std::move(values));
}

void step_into(const Graph& g, std::span<const Opinion> in, std::span<Opinion> out) {
  const std::size_t n = g.node_count();
  for (std::size_t i = 0; i < n; ++i) {
    int field = in[i];
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) field += in[j];
    out[i] = static_cast<Opinion>((field > 0) - (field < 0));
  }
}

StateVector step(const Graph& g, const StateVector& x) {
  if (x.size() != g.node_count()) throw std::invalid_argument("state length does not match graph");
  std::vector<Opinion> next(x.size());
  step_into(g, x.values(), next);
  return StateVector(std::move(next));
}

SteadyStateResult evolve_to_steady(const Graph& g, StateVector x0, std::size_t max_iter,
                                   std::size_t cycle_window) {
  if (x0.size() != g.node_count()) throw std::invalid_argument("state length does not match graph");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");

  using Buffer = std::vector<Opinion>;
  // history.front() is x(t); history[k] is x(t - k).
  std::deque<Buffer> history;
  history.emplace_front(x0.values().begin(), x0.values().end());
  Buffer next(x0.size());

  SteadyStateResult result;
  for (std::size_t t = 0; t < max_iter; ++t) {
    step_into(g, history.front(), next);
    if (next == history.front()) {
      result.status = Convergence::FixedPoint;
      result.period = 1;
      result.iterations = t;
      result.final_state = StateVector(std::move(next));
      return result;
    }
    for (std::size_t p = 2; p <= cycle_window && p - 1 < history.size(); ++p) {
      if (next == history[p - 1]) {
        result.status = Convergence::Cycle;
        result.period = p;
        result.iterations = t + 1;
        for (std::size_t k = p - 1; k-- > 0;) {
          result.cycle_states.emplace_back(history[k]);
        }
        result.final_state = StateVector(next);
        result.cycle_states.emplace_back(std::move(next));  // x(t+2-p) .. x(t+1)
        return result;
      }
    }
    history.push_front(next);
    if (history.size() > cycle_window) history.pop_back();
  }
  result.status = Convergence::MaxIterations;
  result.iterations = max_iter;
  result.final_state = StateVector(std::move(history.front()));
  return result;
}

}  // namespace polarsim
