#include "polarsim/rng.hpp"

namespace polarsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngSeed RngSeed::substream(std::uint64_t tag) const {
  return {master_seed, splitmix64(stream_index ^ splitmix64(tag + 0x632BE59BD9B4E019ULL))};
}

Engine RngSeed::engine() const {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(stream_index), hi(stream_index)};
  return Engine(seq);
}

}  // namespace polarsim
