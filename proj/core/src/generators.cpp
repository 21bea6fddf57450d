#include "polarsim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace polarsim {

std::size_t DegreeSequence::total() const {
  return std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
}

double DegreeSequence::mean() const {
  return degrees.empty() ? 0.0 : static_cast<double>(total()) / static_cast<double>(degrees.size());
}

void PlantedPartitionSpec::validate() const {
  if (node_count < 2) throw std::invalid_argument("planted partition needs at least 2 nodes");
  if (block_fractions.empty()) throw std::invalid_argument("block_fractions is empty");
  double sum = 0.0;
  for (double f : block_fractions) {
    if (!(f >= 0.0)) throw std::invalid_argument("block fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("block fractions sum to " + std::to_string(sum) + ", not 1");
  }
  if (!(omega_in > 0.0)) throw std::invalid_argument("omega_in must be positive");
  if (!(omega_out >= 0.0)) throw std::invalid_argument("omega_out must be non-negative");
  if (!(target_mean_degree > 0.0)) throw std::invalid_argument("target mean degree must be positive");
  if (!(target_mean_degree < static_cast<double>(node_count) - 1.0)) {
    throw std::invalid_argument("target mean degree must be below node_count - 1");
  }
}

DegreeSequence sample_power_law_degrees(std::size_t n, double alpha, std::size_t k_min,
                                        std::size_t k_max, RngSeed seed) {
  if (k_min < 1) throw std::invalid_argument("k_min must be at least 1");
  if (k_min > k_max) throw std::invalid_argument("k_min exceeds k_max");
  if (!(alpha > 1.0)) throw std::invalid_argument("power-law exponent must exceed 1");

  std::vector<double> weights(k_max - k_min + 1);
  for (std::size_t k = k_min; k <= k_max; ++k) {
    weights[k - k_min] = std::pow(static_cast<double>(k), -alpha);
  }
  Engine engine = seed.engine();
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  DegreeSequence seq;
  seq.degrees.resize(n);
  for (auto& d : seq.degrees) d = k_min + pick(engine);

  if (seq.total() % 2 == 1) {
    std::vector<std::size_t> below;
    for (std::size_t v = 0; v < n; ++v) {
      if (seq.degrees[v] < k_max) below.push_back(v);
    }
    if (!below.empty()) {
      std::uniform_int_distribution<std::size_t> choose(0, below.size() - 1);
      ++seq.degrees[below[choose(engine)]];
    } else {
      // Every node sits at k_max. Only possible when k_min == k_max with an odd product.
      throw std::invalid_argument("cannot make the degree sum even: all degrees equal k_max");
    }
  }
  return seq;
}

Graph configuration_model(const DegreeSequence& degrees, RngSeed seed,
                          GeneratorDiagnostics* diagnostics) {
  if (degrees.total() % 2 != 0) throw std::invalid_argument("degree sum must be even");
  std::vector<NodeId> stubs;
  stubs.reserve(degrees.total());
  for (std::size_t v = 0; v < degrees.degrees.size(); ++v) {
    stubs.insert(stubs.end(), degrees.degrees[v], static_cast<NodeId>(v));
  }
  Engine engine = seed.engine();
  std::shuffle(stubs.begin(), stubs.end(), engine);

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(stubs.size() / 2);
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
    pairs.emplace_back(stubs[k], stubs[k + 1]);
  }
  ErasedGraph erased = erase_to_simple(degrees.degrees.size(), pairs);
  if (diagnostics) {
    diagnostics->erased_self_loops = erased.self_loops;
    diagnostics->erased_duplicates = erased.duplicates;
  }
  return std::move(erased.graph);
}

std::vector<int> assign_blocks(std::size_t n, std::span<const double> fractions) {
  if (fractions.empty()) throw std::invalid_argument("no block fractions given");
  const std::size_t b = fractions.size();
  std::vector<std::size_t> sizes(b);
  std::vector<double> remainders(b);
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < b; ++k) {
    double quota = fractions[k] * static_cast<double>(n);
    sizes[k] = static_cast<std::size_t>(std::floor(quota));
    remainders[k] = quota - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::vector<std::size_t> order(b);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainders[x] > remainders[y]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % b, ++assigned) {
    ++sizes[order[k]];
  }
  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t k = 0; k < b; ++k) labels.insert(labels.end(), sizes[k], static_cast<int>(k));
  labels.resize(n);
  return labels;
}

namespace {

// Nodes of one block ordered by decreasing weight, with suffix-friendly prefix sums.
struct Block {
  std::vector<NodeId> nodes;
  std::vector<double> weights;
  std::vector<double> prefix;  // prefix[k] = sum of weights[0..k)
};

std::vector<Block> build_blocks(std::span<const int> labels, std::span<const double> weights) {
  int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Block> blocks(static_cast<std::size_t>(count));
  for (std::size_t v = 0; v < labels.size(); ++v) {
    blocks[static_cast<std::size_t>(labels[v])].nodes.push_back(static_cast<NodeId>(v));
  }
  for (Block& block : blocks) {
    std::stable_sort(block.nodes.begin(), block.nodes.end(),
                     [&](NodeId a, NodeId b) { return weights[a] > weights[b]; });
    block.weights.reserve(block.nodes.size());
    block.prefix.assign(1, 0.0);
    for (NodeId v : block.nodes) {
      block.weights.push_back(weights[v]);
      block.prefix.push_back(block.prefix.back() + weights[v]);
    }
  }
  return blocks;
}

struct PairSums {
  double expected_edges = 0.0;
  std::size_t clamped = 0;
};

// Sum over pairs of min(1, factor * wa_i * wb_j). With `same`, only i < j.
PairSums block_pair_sums(const Block& a, const Block& b, bool same, double factor) {
  PairSums out;
  if (factor <= 0.0) return out;
  const std::size_t nb = b.weights.size();
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    double wi = a.weights[i];
    if (wi <= 0.0) break;
    std::size_t begin = same ? i + 1 : 0;
    if (begin >= nb) continue;
    double threshold = 1.0 / (factor * wi);
    auto first_unclamped = static_cast<std::size_t>(
        std::partition_point(b.weights.begin(), b.weights.end(),
                             [threshold](double w) { return w >= threshold; }) -
        b.weights.begin());
    std::size_t split = std::max(begin, first_unclamped);
    out.clamped += split - begin;
    out.expected_edges += static_cast<double>(split - begin) +
                          factor * wi * (b.prefix[nb] - b.prefix[split]);
  }
  return out;
}

PairSums total_pair_sums(const std::vector<Block>& blocks, double omega_in, double omega_out,
                         double scale) {
  PairSums total;
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    for (std::size_t s = r; s < blocks.size(); ++s) {
      double omega = r == s ? omega_in : omega_out;
      PairSums part = block_pair_sums(blocks[r], blocks[s], r == s, scale * omega);
      total.expected_edges += part.expected_edges;
      total.clamped += part.clamped;
    }
  }
  return total;
}

std::size_t reachable_pairs(const std::vector<Block>& blocks, double omega_in, double omega_out) {
  auto positive = [](const Block& block) {
    return static_cast<std::size_t>(std::count_if(block.weights.begin(), block.weights.end(),
                                                  [](double w) { return w > 0.0; }));
  };
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    std::size_t pr = positive(blocks[r]);
    if (omega_in > 0.0 && pr > 0) pairs += pr * (pr - 1) / 2;
    for (std::size_t s = r + 1; s < blocks.size(); ++s) {
      if (omega_out > 0.0) pairs += pr * positive(blocks[s]);
    }
  }
  return pairs;
}

double calibrate_scale(const std::vector<Block>& blocks, std::size_t n, double omega_in,
                       double omega_out, double target_mean_degree,
                       GeneratorDiagnostics* diagnostics) {
  const double target_edges = target_mean_degree * static_cast<double>(n) / 2.0;
  // Unclamped expected edge count is linear in the scale.
  double linear = 0.0;
  double max_pair = 0.0;
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const Block& br = blocks[r];
    double sum = br.prefix.back();
    double sum_sq = 0.0;
    for (double w : br.weights) sum_sq += w * w;
    linear += omega_in * (sum * sum - sum_sq) / 2.0;
    if (br.weights.size() >= 2) max_pair = std::max(max_pair, omega_in * br.weights[0] * br.weights[1]);
    for (std::size_t s = r + 1; s < blocks.size(); ++s) {
      linear += omega_out * sum * blocks[s].prefix.back();
      if (!br.weights.empty() && !blocks[s].weights.empty()) {
        max_pair = std::max(max_pair, omega_out * br.weights[0] * blocks[s].weights[0]);
      }
    }
  }
  if (!(linear > 0.0)) throw std::invalid_argument("block model admits no edges");

  const double reachable = static_cast<double>(reachable_pairs(blocks, omega_in, omega_out));
  if (target_edges >= reachable * (1.0 - 1e-12)) {
    throw std::invalid_argument("target mean degree " + std::to_string(target_mean_degree) +
                                " is unreachable for this block model");
  }

  double scale = target_edges / linear;
  if (scale * max_pair <= 1.0 + 1e-12) return scale;

  if (diagnostics) {
    diagnostics->warnings.push_back(
        "pair probabilities exceed 1 at the analytic scale; clamping and recalibrating");
  }
  // Expected edges with clamping are continuous and increasing in the scale.
  double lo = scale;
  double hi = scale * 2.0;
  while (total_pair_sums(blocks, omega_in, omega_out, hi).expected_edges < target_edges) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (total_pair_sums(blocks, omega_in, omega_out, mid).expected_edges < target_edges) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Skip-sampling over a weight-sorted block pair: p_ij = min(1, factor*wa_i*wb_j)
// is non-increasing in j, so geometric skips at the current p followed by
// thinning with q/p give exact independent Bernoulli draws.
void sample_block_pair(const Block& a, const Block& b, bool same, double factor, Engine& engine,
                       std::vector<EdgeId>& edges) {
  if (factor <= 0.0) return;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t nb = b.weights.size();
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    double wi = a.weights[i];
    if (wi <= 0.0) break;
    std::size_t j = same ? i + 1 : 0;
    if (j >= nb) continue;
    double p = std::min(1.0, factor * wi * b.weights[j]);
    while (j < nb && p > 0.0) {
      if (p < 1.0) {
        double u = 1.0 - uniform(engine);  // (0, 1]
        double skip = std::floor(std::log(u) / std::log1p(-p));
        if (skip >= static_cast<double>(nb - j)) break;
        j += static_cast<std::size_t>(skip);
      }
      double q = std::min(1.0, factor * wi * b.weights[j]);
      if (uniform(engine) < q / p) edges.push_back(EdgeId::of(a.nodes[i], b.nodes[j]));
      p = q;
      ++j;
    }
  }
}

Graph sample_block_model(std::vector<int> labels, std::span<const double> weights,
                         const PlantedPartitionSpec& spec, RngSeed seed,
                         GeneratorDiagnostics* diagnostics) {
  std::vector<Block> blocks = build_blocks(labels, weights);
  double scale = calibrate_scale(blocks, spec.node_count, spec.omega_in, spec.omega_out,
                                 spec.target_mean_degree, diagnostics);
  if (diagnostics) {
    diagnostics->scale = scale;
    diagnostics->clamped_pairs =
        total_pair_sums(blocks, spec.omega_in, spec.omega_out, scale).clamped;
  }
  Engine engine = seed.engine();
  std::vector<EdgeId> edges;
  edges.reserve(static_cast<std::size_t>(spec.target_mean_degree * spec.node_count / 2.0 * 1.2));
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    for (std::size_t s = r; s < blocks.size(); ++s) {
      double omega = r == s ? spec.omega_in : spec.omega_out;
      sample_block_pair(blocks[r], blocks[s], r == s, scale * omega, engine, edges);
    }
  }
  return Graph::from_edges(spec.node_count, std::move(edges), std::move(labels));
}

}  // namespace

double expected_block_mean_degree(std::span<const int> blocks, std::span<const double> weights,
                                  double omega_in, double omega_out, double scale) {
  auto layout = build_blocks(blocks, weights);
  return 2.0 * total_pair_sums(layout, omega_in, omega_out, scale).expected_edges /
         static_cast<double>(blocks.size());
}

Graph planted_partition_poisson(const PlantedPartitionSpec& spec, RngSeed seed,
                                GeneratorDiagnostics* diagnostics) {
  spec.validate();
  std::vector<double> weights(spec.node_count, 1.0);
  return sample_block_model(assign_blocks(spec.node_count, spec.block_fractions), weights, spec,
                            seed, diagnostics);
}

Graph degree_corrected_planted_partition(const DegreeSequence& degrees,
                                         const PlantedPartitionSpec& spec, RngSeed seed,
                                         GeneratorDiagnostics* diagnostics) {
  spec.validate();
  if (degrees.degrees.size() != spec.node_count) {
    throw std::invalid_argument("degree sequence length does not match node count");
  }
  std::vector<int> labels = assign_blocks(spec.node_count, spec.block_fractions);
  std::vector<double> block_totals(spec.block_fractions.size(), 0.0);
  for (std::size_t v = 0; v < spec.node_count; ++v) {
    block_totals[static_cast<std::size_t>(labels[v])] += static_cast<double>(degrees.degrees[v]);
  }
  std::vector<double> theta(spec.node_count, 0.0);
  for (std::size_t v = 0; v < spec.node_count; ++v) {
    double total = block_totals[static_cast<std::size_t>(labels[v])];
    theta[v] = total > 0.0 ? static_cast<double>(degrees.degrees[v]) / total : 0.0;
  }
  return sample_block_model(std::move(labels), theta, spec, seed, diagnostics);
}

}  // namespace polarsim
