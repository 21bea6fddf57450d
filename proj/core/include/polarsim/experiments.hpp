#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "polarsim/dynamics.hpp"
#include "polarsim/generators.hpp"
#include "polarsim/graph.hpp"
#include "polarsim/metrics.hpp"
#include "polarsim/rng.hpp"

namespace polarsim {

struct ConfigModelParams {
  std::size_t node_count = 1000;
  double alpha = 2.5;
  std::size_t k_min = 2;
  std::optional<std::size_t> k_max;  // node_count - 1 when unset
};

struct PlantedPartitionParams {
  PlantedPartitionSpec spec;
};

struct DegreeCorrectedParams {
  PlantedPartitionSpec spec;
  double alpha = 2.5;
  std::size_t k_min = 2;
  std::optional<std::size_t> k_max;
};

/// A fixed graph shared by every realization. `path` and `original_ids` are
/// provenance for output only.
struct FixedGraph {
  std::string path;
  std::shared_ptr<const Graph> graph;
  std::vector<std::uint64_t> original_ids;  // empty: ids are already dense
};

using GeneratorSpec =
    std::variant<ConfigModelParams, PlantedPartitionParams, DegreeCorrectedParams, FixedGraph>;

enum class IcMode { Sic, Ric };
enum class IcSelection { Sic, Ric, Both };
enum class SeedPairPolicy { RandomPairs, AllPairs };

std::string mode_label(IcMode mode);  // "SIC" / "RIC"

struct ExperimentConfig {
  GeneratorSpec generator = ConfigModelParams{};
  IcSelection ic = IcSelection::Both;
  std::size_t realizations = 100;
  SeedPairPolicy seed_pairs = SeedPairPolicy::RandomPairs;
  std::uint64_t master_seed = 0;
  std::size_t max_iter = kDefaultMaxIterations;
  bool include_cycles = false;

  bool has_fixed_graph() const { return std::holds_alternative<FixedGraph>(generator); }
  std::vector<IcMode> modes() const;
  /// Number of runs per mode; N (N - 1) / 2 under AllPairs.
  std::size_t run_count() const;
  /// Throws std::invalid_argument when the configuration is unusable.
  void validate() const;
};

/// One realization of one mode.
struct RunOutcome {
  PolarizationSample sample;  // of the final state
  double mean_r = 0.0;        // r averaged over the cycle states; sample.r for fixed points
  std::size_t iterations = 0;
  std::size_t period = 0;
  NodeId seed_plus = 0;  // SIC only
  NodeId seed_minus = 0;
};

struct ModeRecord {
  IcMode mode = IcMode::Sic;
  std::vector<RunOutcome> runs;  // indexed by realization
  std::size_t fixed_points = 0;
  std::size_t cycles = 0;
  std::size_t max_iterations = 0;
  std::optional<EdgeDifferenceTable> edges;  // fixed graphs only

  /// r of the runs that enter aggregates: fixed points, plus cycles
  /// (cycle-averaged) when include_cycles is set.
  std::vector<double> included_r(bool include_cycles) const;
  std::size_t excluded(bool include_cycles) const;
  MeanStat mean_r(bool include_cycles) const;
};

struct EnsembleRecord {
  std::vector<ModeRecord> modes;
  std::size_t realizations = 0;
  bool include_cycles = false;
  std::uint64_t master_seed = 0;
  std::string config_digest;

  /// Throws std::out_of_range when the mode was not run.
  const ModeRecord& mode(IcMode m) const;
  MeanStat mean_r(IcMode m) const { return mode(m).mean_r(include_cycles); }
};

/// Default worker count: available hardware parallelism, at least 1.
std::size_t default_workers();

/// Realization t uses RngSeed{master_seed, t}; the graph, the SIC pair and the
/// RIC draw come from separate substreams, and both modes share the graph of
/// their realization. The record does not depend on `workers`.
EnsembleRecord run_ensemble(const ExperimentConfig& cfg, std::size_t workers = 1);

/// Graph of realization t, as run_ensemble builds it.
Graph realization_graph(const ExperimentConfig& cfg, std::size_t realization,
                        GeneratorDiagnostics* diagnostics = nullptr);

/// Initial state of one mode in realization t, as run_ensemble draws it.
StateVector realization_initial_state(const ExperimentConfig& cfg, std::size_t realization,
                                      IcMode mode, const Graph& g);

struct SizePoint {
  std::size_t size = 0;
  std::vector<IcMode> modes;
  std::vector<MeanStat> mean_r;  // parallel to modes
  std::vector<std::size_t> excluded;
};

/// One ensemble per size with the node count of the template's generator replaced.
std::vector<SizePoint> size_sweep(const ExperimentConfig& base, std::span<const std::size_t> sizes,
                                  std::size_t workers = 1);

struct HeatmapCell {
  double alpha = 0.0;
  double omega_out = 0.0;
  MeanStat mean_r;
  std::size_t excluded = 0;
};

/// SIC ensembles on the degree-corrected planted partition for each
/// (alpha, omega_out); `base` must use DegreeCorrectedParams. Cells are ordered
/// alpha-major.
std::vector<HeatmapCell> heatmap(const ExperimentConfig& base, std::span<const double> alphas,
                                 std::span<const double> omega_outs, std::size_t workers = 1);

inline constexpr std::size_t kAllPairsNodeLimit = 2000;

struct AllPairsResult {
  std::vector<PolarizationSample> samples;  // one per unordered pair (i < j), lexicographic
  EdgeDifferenceTable edges;                // over FixedPoint states
  std::size_t excluded = 0;
};

/// SIC from every unordered seed pair, +1 on the smaller id.
AllPairsResult all_pairs_sic(const Graph& g, std::size_t max_iter = kDefaultMaxIterations,
                             std::size_t workers = 1);

/// Seeds (i, j), i < j, of pair index t in lexicographic order.
std::pair<NodeId, NodeId> pair_at(std::size_t n, std::size_t t);

struct SplitResult {
  double threshold = 0.0;
  std::vector<EdgeId> removed;
  std::vector<std::vector<NodeId>> components;
};

/// Removes every edge whose delta is strictly above the q-quantile of the table.
SplitResult split_prediction(const Graph& g, const EdgeDifferenceTable& delta, double q);

}  // namespace polarsim
