#include "polarsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "polarsim/config.hpp"

namespace polarsim {

namespace {

// Substream tags inside one realization.
constexpr std::uint64_t kDegreeStream = 1;
constexpr std::uint64_t kWiringStream = 2;
constexpr std::uint64_t kSicStream = 3;
constexpr std::uint64_t kRicStream = 4;

class RealizationError : public std::runtime_error {
 public:
  RealizationError(std::size_t index, const std::string& what)
      : std::runtime_error("realization " + std::to_string(index) + ": " + what) {}
};

// Runs body(index, worker) for every index in [0, count). Indices are handed
// out dynamically; callers must make results independent of the assignment.
// The exception of the smallest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto worker_loop = [&](std::size_t worker) {
    for (;;) {
      std::size_t index = next.fetch_add(1);
      if (index >= count) return;
      try {
        body(index, worker);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (index < failed_index) {
          failed_index = index;
          failure = std::current_exception();
        }
        next.store(count);
        return;
      }
    }
  };

  if (workers == 1) {
    worker_loop(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker_loop, w);
  }
  if (failure) std::rethrow_exception(failure);
}

std::size_t resolved_k_max(std::size_t n, const std::optional<std::size_t>& k_max) {
  if (k_max) return *k_max;
  return n > 1 ? n - 1 : 1;
}

std::size_t generator_node_count(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConfigModelParams>) return p.node_count;
        else if constexpr (std::is_same_v<T, FixedGraph>) return p.graph ? p.graph->node_count() : 0;
        else return p.spec.node_count;
      },
      spec);
}

std::pair<NodeId, NodeId> random_seed_pair(std::size_t n, RngSeed seed) {
  Engine engine = seed.engine();
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::uniform_int_distribution<std::size_t> second(0, n - 2);
  std::size_t plus = first(engine);
  std::size_t minus = second(engine);
  if (minus >= plus) ++minus;
  return {static_cast<NodeId>(plus), static_cast<NodeId>(minus)};
}

std::pair<NodeId, NodeId> sic_pair(const ExperimentConfig& cfg, std::size_t t, std::size_t n) {
  if (cfg.seed_pairs == SeedPairPolicy::AllPairs) return pair_at(n, t);
  return random_seed_pair(n, RngSeed{cfg.master_seed, t}.substream(kSicStream));
}

RunOutcome summarize(const SteadyStateResult& steady) {
  RunOutcome out;
  out.sample = polarization_index(steady.final_state);
  out.sample.status = steady.status;
  out.iterations = steady.iterations;
  out.period = steady.period;
  out.mean_r = out.sample.r;
  if (steady.status == Convergence::Cycle && !steady.cycle_states.empty()) {
    double sum = 0.0;
    for (const StateVector& s : steady.cycle_states) sum += polarization_index(s).r;
    out.mean_r = sum / static_cast<double>(steady.cycle_states.size());
  }
  return out;
}

bool is_included(const RunOutcome& run, bool include_cycles) {
  return run.sample.status == Convergence::FixedPoint ||
         (include_cycles && run.sample.status == Convergence::Cycle);
}

}  // namespace

std::string mode_label(IcMode mode) { return mode == IcMode::Sic ? "SIC" : "RIC"; }

std::vector<IcMode> ExperimentConfig::modes() const {
  switch (ic) {
    case IcSelection::Sic: return {IcMode::Sic};
    case IcSelection::Ric: return {IcMode::Ric};
    case IcSelection::Both: break;
  }
  return {IcMode::Sic, IcMode::Ric};
}

std::size_t ExperimentConfig::run_count() const {
  if (seed_pairs == SeedPairPolicy::AllPairs) {
    std::size_t n = generator_node_count(generator);
    return n * (n - 1) / 2;
  }
  return realizations;
}

void ExperimentConfig::validate() const {
  if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConfigModelParams>) {
          if (p.node_count < 1) throw std::invalid_argument("node count must be at least 1");
          if (!(p.alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
          std::size_t k_max = resolved_k_max(p.node_count, p.k_max);
          if (p.k_min < 1 || p.k_min > k_max) throw std::invalid_argument("need 1 <= k_min <= k_max");
        } else if constexpr (std::is_same_v<T, PlantedPartitionParams>) {
          p.spec.validate();
        } else if constexpr (std::is_same_v<T, DegreeCorrectedParams>) {
          p.spec.validate();
          if (!(p.alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
          std::size_t k_max = resolved_k_max(p.spec.node_count, p.k_max);
          if (p.k_min < 1 || p.k_min > k_max) throw std::invalid_argument("need 1 <= k_min <= k_max");
        } else {
          if (!p.graph) throw std::invalid_argument("fixed graph is missing");
        }
      },
      generator);
  if (seed_pairs == SeedPairPolicy::AllPairs && !has_fixed_graph()) {
    throw std::invalid_argument("all-pairs seeding needs a fixed (empirical) graph");
  }
  std::size_t n = generator_node_count(generator);
  if (ic != IcSelection::Ric && n < 2) {
    throw std::invalid_argument("seed initial conditions need at least 2 nodes");
  }
  if (seed_pairs == SeedPairPolicy::AllPairs && n > kAllPairsNodeLimit) {
    throw std::invalid_argument("all-pairs seeding is limited to " + std::to_string(kAllPairsNodeLimit) +
                                " nodes; use random pairs");
  }
}

std::vector<double> ModeRecord::included_r(bool include_cycles) const {
  std::vector<double> r;
  for (const RunOutcome& run : runs) {
    if (is_included(run, include_cycles)) r.push_back(run.mean_r);
  }
  return r;
}

std::size_t ModeRecord::excluded(bool include_cycles) const {
  return max_iterations + (include_cycles ? 0 : cycles);
}

MeanStat ModeRecord::mean_r(bool include_cycles) const {
  auto r = included_r(include_cycles);
  return mean_with_error(r);
}

const ModeRecord& EnsembleRecord::mode(IcMode m) const {
  for (const ModeRecord& rec : modes) {
    if (rec.mode == m) return rec;
  }
  throw std::out_of_range("mode " + mode_label(m) + " was not part of this ensemble");
}

std::size_t default_workers() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

Graph realization_graph(const ExperimentConfig& cfg, std::size_t realization,
                        GeneratorDiagnostics* diagnostics) {
  RngSeed seed{cfg.master_seed, realization};
  return std::visit(
      [&](const auto& p) -> Graph {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConfigModelParams>) {
          auto degrees = sample_power_law_degrees(p.node_count, p.alpha, p.k_min,
                                                  resolved_k_max(p.node_count, p.k_max),
                                                  seed.substream(kDegreeStream));
          return configuration_model(degrees, seed.substream(kWiringStream), diagnostics);
        } else if constexpr (std::is_same_v<T, PlantedPartitionParams>) {
          return planted_partition_poisson(p.spec, seed.substream(kWiringStream), diagnostics);
        } else if constexpr (std::is_same_v<T, DegreeCorrectedParams>) {
          auto degrees = sample_power_law_degrees(p.spec.node_count, p.alpha, p.k_min,
                                                  resolved_k_max(p.spec.node_count, p.k_max),
                                                  seed.substream(kDegreeStream));
          return degree_corrected_planted_partition(degrees, p.spec, seed.substream(kWiringStream),
                                                    diagnostics);
        } else {
          return *p.graph;
        }
      },
      cfg.generator);
}

StateVector realization_initial_state(const ExperimentConfig& cfg, std::size_t realization,
                                      IcMode mode, const Graph& g) {
  if (mode == IcMode::Ric) return init_ric(g.node_count(), RngSeed{cfg.master_seed, realization}.substream(kRicStream));
  auto [plus, minus] = sic_pair(cfg, realization, g.node_count());
  return init_sic(g.node_count(), plus, minus);
}

EnsembleRecord run_ensemble(const ExperimentConfig& cfg, std::size_t workers) {
  cfg.validate();
  const std::size_t count = cfg.run_count();
  const auto modes = cfg.modes();
  const Graph* fixed = nullptr;
  if (const auto* f = std::get_if<FixedGraph>(&cfg.generator)) fixed = f->graph.get();

  EnsembleRecord record;
  record.realizations = count;
  record.include_cycles = cfg.include_cycles;
  record.master_seed = cfg.master_seed;
  record.config_digest = config_digest(cfg);
  for (IcMode m : modes) {
    ModeRecord rec;
    rec.mode = m;
    rec.runs.resize(count);
    record.modes.push_back(std::move(rec));
  }

  // Per-worker edge accumulators; integer sums make the merge order irrelevant.
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<std::vector<EdgeDifferenceAccumulator>> partial;
  if (fixed) {
    partial.resize(workers);
    for (auto& per_worker : partial) {
      for (std::size_t k = 0; k < modes.size(); ++k) per_worker.emplace_back(*fixed);
    }
  }

  parallel_for(count, workers, [&](std::size_t t, std::size_t worker) {
    try {
      std::optional<Graph> generated;
      if (!fixed) generated = realization_graph(cfg, t);
      const Graph& g = fixed ? *fixed : *generated;
      const std::size_t n = g.node_count();
      for (std::size_t k = 0; k < modes.size(); ++k) {
        NodeId plus = 0, minus = 0;
        if (modes[k] == IcMode::Sic) std::tie(plus, minus) = sic_pair(cfg, t, n);
        StateVector x0 = modes[k] == IcMode::Sic ? init_sic(n, plus, minus)
                                                 : init_ric(n, RngSeed{cfg.master_seed, t}.substream(kRicStream));
        SteadyStateResult steady = evolve_to_steady(g, std::move(x0), cfg.max_iter);
        RunOutcome out = summarize(steady);
        out.seed_plus = plus;
        out.seed_minus = minus;
        if (fixed) {
          auto& acc = partial[worker][k];
          if (steady.status == Convergence::FixedPoint) {
            acc.add(steady.final_state);
          } else if (steady.status == Convergence::Cycle && cfg.include_cycles) {
            for (const StateVector& s : steady.cycle_states) acc.add(s);
          }
        }
        record.modes[k].runs[t] = out;
      }
    } catch (const RealizationError&) {
      throw;
    } catch (const std::exception& e) {
      throw RealizationError(t, e.what());
    }
  });

  for (std::size_t k = 0; k < modes.size(); ++k) {
    ModeRecord& rec = record.modes[k];
    for (const RunOutcome& run : rec.runs) {
      switch (run.sample.status) {
        case Convergence::FixedPoint: ++rec.fixed_points; break;
        case Convergence::Cycle: ++rec.cycles; break;
        case Convergence::MaxIterations: ++rec.max_iterations; break;
      }
    }
    if (fixed) {
      EdgeDifferenceAccumulator total(*fixed);
      for (auto& per_worker : partial) total.merge(per_worker[k]);
      if (total.samples() > 0) rec.edges = total.table();
    }
  }
  return record;
}

std::vector<SizePoint> size_sweep(const ExperimentConfig& base, std::span<const std::size_t> sizes,
                                  std::size_t workers) {
  if (sizes.empty()) throw std::invalid_argument("size sweep needs at least one size");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("sizes must be ascending");
  if (base.has_fixed_graph()) throw std::invalid_argument("size sweep needs a synthetic generator");
  std::vector<SizePoint> points;
  for (std::size_t size : sizes) {
    ExperimentConfig cfg = base;
    std::visit(
        [size](auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ConfigModelParams>) p.node_count = size;
          else if constexpr (!std::is_same_v<T, FixedGraph>) p.spec.node_count = size;
        },
        cfg.generator);
    EnsembleRecord rec = run_ensemble(cfg, workers);
    SizePoint point;
    point.size = size;
    for (const ModeRecord& m : rec.modes) {
      point.modes.push_back(m.mode);
      point.mean_r.push_back(m.mean_r(rec.include_cycles));
      point.excluded.push_back(m.excluded(rec.include_cycles));
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<HeatmapCell> heatmap(const ExperimentConfig& base, std::span<const double> alphas,
                                 std::span<const double> omega_outs, std::size_t workers) {
  if (alphas.empty() || omega_outs.empty()) throw std::invalid_argument("heatmap grids must be nonempty");
  if (!std::holds_alternative<DegreeCorrectedParams>(base.generator)) {
    throw std::invalid_argument("heatmap needs the degree-corrected planted partition generator");
  }
  std::vector<HeatmapCell> cells;
  for (double alpha : alphas) {
    for (double omega_out : omega_outs) {
      ExperimentConfig cfg = base;
      cfg.ic = IcSelection::Sic;
      auto& p = std::get<DegreeCorrectedParams>(cfg.generator);
      p.alpha = alpha;
      p.spec.omega_out = omega_out;
      EnsembleRecord rec = run_ensemble(cfg, workers);
      const ModeRecord& sic = rec.mode(IcMode::Sic);
      cells.push_back({alpha, omega_out, sic.mean_r(rec.include_cycles), sic.excluded(rec.include_cycles)});
    }
  }
  return cells;
}

std::pair<NodeId, NodeId> pair_at(std::size_t n, std::size_t t) {
  // Row i holds the n - 1 - i pairs (i, j > i).
  std::size_t i = 0;
  while (t >= n - 1 - i) {
    t -= n - 1 - i;
    ++i;
    if (i + 1 >= n) throw std::out_of_range("pair index beyond n (n - 1) / 2");
  }
  return {static_cast<NodeId>(i), static_cast<NodeId>(i + 1 + t)};
}

AllPairsResult all_pairs_sic(const Graph& g, std::size_t max_iter, std::size_t workers) {
  if (g.node_count() > kAllPairsNodeLimit) {
    throw std::invalid_argument("all-pairs seeding is limited to " + std::to_string(kAllPairsNodeLimit) +
                                " nodes; use random pairs");
  }
  ExperimentConfig cfg;
  cfg.generator = FixedGraph{"", std::make_shared<const Graph>(g), {}};
  cfg.ic = IcSelection::Sic;
  cfg.seed_pairs = SeedPairPolicy::AllPairs;
  cfg.max_iter = max_iter;
  EnsembleRecord rec = run_ensemble(cfg, workers);
  const ModeRecord& sic = rec.mode(IcMode::Sic);
  AllPairsResult out;
  out.samples.reserve(sic.runs.size());
  for (const RunOutcome& run : sic.runs) out.samples.push_back(run.sample);
  out.excluded = sic.excluded(false);
  if (!sic.edges) throw std::runtime_error("no seed pair reached a fixed point");
  out.edges = *sic.edges;
  return out;
}

SplitResult split_prediction(const Graph& g, const EdgeDifferenceTable& delta, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("split quantile must lie in (0, 1)");
  if (delta.edges.size() != g.edge_count()) {
    throw std::invalid_argument("difference table does not match the graph");
  }
  SplitResult out;
  out.threshold = quantile(delta.delta, q);
  std::set<EdgeId> victims;
  for (std::size_t k = 0; k < delta.edges.size(); ++k) {
    if (delta.delta[k] > out.threshold) {
      out.removed.push_back(delta.edges[k]);
      victims.insert(delta.edges[k]);
    }
  }
  out.components = connected_components(remove_edges(g, victims));
  return out;
}

}  // namespace polarsim
