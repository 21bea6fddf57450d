#pragma once

#include <cstdint>
#include <random>

namespace polarsim {

using Engine = std::mt19937_64;

/// Reproducibility key: (master_seed, stream_index) fixes every draw of one realization.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Independent child stream for one purpose (graph, initial condition, ...)
  /// inside a realization.
  RngSeed substream(std::uint64_t tag) const;

  Engine engine() const;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace polarsim
