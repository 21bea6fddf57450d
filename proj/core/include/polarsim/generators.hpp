#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "polarsim/graph.hpp"
#include "polarsim/rng.hpp"

namespace polarsim {

struct DegreeSequence {
  std::vector<std::size_t> degrees;

  std::size_t total() const;
  double mean() const;
};

/// Planted partition parameters. The affinities are relative: both block
/// models rescale them so the expected mean degree equals target_mean_degree.
struct PlantedPartitionSpec {
  std::size_t node_count = 0;
  std::vector<double> block_fractions;
  double omega_in = 0.7;
  double omega_out = 0.01;
  double target_mean_degree = 6.0;

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

/// Side information from one generator call.
struct GeneratorDiagnostics {
  double scale = 0.0;               // affinity multiplier used by the block models
  std::size_t clamped_pairs = 0;    // pairs whose probability hit 1
  std::size_t erased_self_loops = 0;
  std::size_t erased_duplicates = 0;
  std::vector<std::string> warnings;
};

/// i.i.d. draws from p(k) ~ k^-alpha on [k_min, k_max]. An odd total is fixed
/// by incrementing one uniformly chosen node whose degree is below k_max.
DegreeSequence sample_power_law_degrees(std::size_t n, double alpha, std::size_t k_min,
                                        std::size_t k_max, RngSeed seed);

/// Erased configuration model: uniform half-edge matching, then self-loops and
/// repeated pairs are dropped.
Graph configuration_model(const DegreeSequence& degrees, RngSeed seed,
                          GeneratorDiagnostics* diagnostics = nullptr);

/// Largest-remainder split of n nodes into contiguous blocks.
std::vector<int> assign_blocks(std::size_t n, std::span<const double> fractions);

/// Bernoulli planted partition. Pair (i, j) is linked with probability
/// min(1, s * omega), omega = omega_in inside a block and omega_out across.
Graph planted_partition_poisson(const PlantedPartitionSpec& spec, RngSeed seed,
                                GeneratorDiagnostics* diagnostics = nullptr);

/// Degree-corrected planted partition. theta_i is proportional to the given
/// degree and sums to one inside each block; pair (i, j) is linked with
/// probability min(1, s * theta_i * theta_j * omega).
Graph degree_corrected_planted_partition(const DegreeSequence& degrees,
                                         const PlantedPartitionSpec& spec, RngSeed seed,
                                         GeneratorDiagnostics* diagnostics = nullptr);

/// Expected mean degree of a block model with per-node weights and the given
/// scale (pair probability min(1, scale * omega * w_i * w_j)). Exposed for tests.
double expected_block_mean_degree(std::span<const int> blocks, std::span<const double> weights,
                                  double omega_in, double omega_out, double scale);

}  // namespace polarsim
