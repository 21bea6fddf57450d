#include "polarsim/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "polarsim/config.hpp"
#include "polarsim/experiments.hpp"
#include "polarsim/io.hpp"
#include "polarsim/metrics.hpp"
#include "polarsim/stability.hpp"

#ifndef POLARSIM_VERSION
#define POLARSIM_VERSION "unknown"
#endif

namespace polarsim::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kDefaultOutDir = "polarsim-out";
constexpr const char* kOutEnv = "POLARSIM_OUT";

// Keys that parameterize a command rather than the experiment itself.
const std::vector<std::string> kExtraKeys{"alphas", "omega_outs", "quantiles", "sizes", "steepness"};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> master_seed;
  std::size_t workers = default_workers();
  std::string out_dir;
  std::string graph;
};

struct CommandOptions {
  std::size_t realization = 0;
  std::string sic;
  bool ric = false;
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::vector<double> omega_outs;
  std::vector<double> quantiles;
};

class Session {
 public:
  Session(std::string command, const CommonOptions& common, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), common_(common), out_(out), err_(err) {
    if (!common.config_path.empty()) doc_ = parse_config_file(common.config_path);
    for (const std::string& assignment : common.overrides) {
      try {
        apply_override(doc_, assignment);
      } catch (const ConfigError& e) {
        throw UsageError(std::string("--set ") + assignment + ": " + e.what());
      }
    }
    if (!common.graph.empty()) {
      doc_["graph"] = common.graph;
      doc_["generator"] = std::string("empirical");
    }
    if (common.master_seed) doc_["master_seed"] = static_cast<std::int64_t>(*common.master_seed);

    if (!common.out_dir.empty()) dir_ = common.out_dir;
    else if (const char* env = std::getenv(kOutEnv); env && *env) dir_ = env;
    else dir_ = kDefaultOutDir;
  }

  ConfigDocument& doc() { return doc_; }
  std::size_t workers() const { return common_.workers; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  json& parameters() { return parameters_; }
  json& diagnostics() { return diagnostics_; }

  void require_seed() {
    if (!doc_.count("master_seed")) {
      throw UsageError("command '" + command_ +
                       "' needs an explicit master seed (--master-seed or master_seed in the config)");
    }
  }

  ExperimentConfig experiment() {
    ExperimentConfig cfg = experiment_from_document(doc_);
    cfg.validate();
    cfg_ = cfg;
    return cfg;
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(dir_);
    fs::path path = dir_ / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    body(file);
    file.close();
    if (!file) throw std::runtime_error("failed writing " + path.string());
    outputs_.push_back(name);
  }

  // Writes the effective configuration and the manifest; call last.
  void finish() {
    ConfigDocument effective;
    if (cfg_) effective = document_from_experiment(*cfg_);
    for (const std::string& key : kExtraKeys) {
      if (doc_.count(key)) effective[key] = doc_.at(key);
    }
    std::string config_text = dump_config(effective);
    write("config.toml", [&](std::ostream& os) { os << config_text; });

    json manifest;
    manifest["tool"] = "polarsim";
    manifest["version"] = POLARSIM_VERSION;
    manifest["command"] = command_;
    if (cfg_) {
      manifest["master_seed"] = cfg_->master_seed;
      manifest["config_digest"] = config_digest(*cfg_);
    }
    manifest["config_file"] = "config.toml";
    manifest["config"] = config_text;
    manifest["parameters"] = parameters_.is_null() ? json::object() : parameters_;
    manifest["diagnostics"] = diagnostics_.is_null() ? json::object() : diagnostics_;
    manifest["outputs"] = outputs_;
    fs::create_directories(dir_);
    std::ofstream file(dir_ / "manifest.json", std::ios::binary);
    if (!file) throw std::runtime_error("cannot write manifest");
    file << manifest.dump(2) << '\n';
    out_ << "wrote " << outputs_.size() + 1 << " files to " << dir_.string() << '\n';
  }

 private:
  std::string command_;
  const CommonOptions& common_;
  std::ostream& out_;
  std::ostream& err_;
  ConfigDocument doc_;
  fs::path dir_;
  std::optional<ExperimentConfig> cfg_;
  json parameters_;
  json diagnostics_;
  std::vector<std::string> outputs_;
};

std::span<const std::uint64_t> ids_of(const ExperimentConfig& cfg) {
  if (const auto* f = std::get_if<FixedGraph>(&cfg.generator)) return f->original_ids;
  return {};
}

const Graph& fixed_graph(const ExperimentConfig& cfg, const std::string& command) {
  const auto* f = std::get_if<FixedGraph>(&cfg.generator);
  if (!f) throw UsageError("command '" + command + "' needs --graph (or graph = \"...\" in the config)");
  return *f->graph;
}

NodeId dense_node(const ExperimentConfig& cfg, std::uint64_t id, std::size_t n) {
  auto ids = ids_of(cfg);
  if (ids.empty()) {
    if (id >= n) throw UsageError("node " + std::to_string(id) + " is out of range");
    return static_cast<NodeId>(id);
  }
  for (std::size_t v = 0; v < ids.size(); ++v) {
    if (ids[v] == id) return static_cast<NodeId>(v);
  }
  throw UsageError("node " + std::to_string(id) + " does not occur in the graph");
}

void record_generator_diagnostics(Session& s, const GeneratorDiagnostics& d) {
  s.diagnostics()["scale"] = d.scale;
  s.diagnostics()["clamped_pairs"] = d.clamped_pairs;
  s.diagnostics()["erased_self_loops"] = d.erased_self_loops;
  s.diagnostics()["erased_duplicates"] = d.erased_duplicates;
  s.diagnostics()["warnings"] = d.warnings;
  for (const std::string& w : d.warnings) s.err() << "warning: " << w << '\n';
}

void write_mode_outputs(Session& s, const ExperimentConfig& cfg, const EnsembleRecord& rec) {
  s.write("samples.csv", [&](std::ostream& os) { write_samples_csv(os, rec); });
  s.write("summary.csv", [&](std::ostream& os) { write_summary_csv(os, rec); });
  for (const ModeRecord& m : rec.modes) {
    std::string tag = m.mode == IcMode::Sic ? "sic" : "ric";
    auto r = m.included_r(rec.include_cycles);
    if (r.size() >= 2) {
      Histogram h = fd_histogram(r);
      s.write("histogram_" + tag + ".csv", [&](std::ostream& os) { write_histogram_csv(os, h); });
    }
    if (m.edges) {
      s.write("edges_" + tag + ".csv", [&](std::ostream& os) { write_edges_csv(os, *m.edges, ids_of(cfg)); });
    }
    MeanStat stat = m.mean_r(rec.include_cycles);
    json entry;
    entry["mean_r"] = stat.mean;
    entry["stderr"] = stat.std_error;
    entry["included"] = stat.count;
    entry["excluded"] = m.excluded(rec.include_cycles);
    entry["cycles"] = m.cycles;
    entry["max_iterations"] = m.max_iterations;
    s.diagnostics()[mode_label(m.mode)] = entry;
    s.out() << mode_label(m.mode) << ": mean r = " << format_double(stat.mean) << " +- "
            << format_double(stat.std_error) << " over " << stat.count << " runs ("
            << m.excluded(rec.include_cycles) << " excluded)\n";
  }
}

std::vector<double> list_or(Session& s, const std::string& key, const std::vector<double>& flag,
                            std::vector<double> fallback) {
  if (!flag.empty()) s.doc()[key] = flag;
  if (auto l = get_list(s.doc(), key)) return *l;
  s.doc()[key] = fallback;
  return fallback;
}

int cmd_generate(Session& s, const CommandOptions& o) {
  s.require_seed();
  ExperimentConfig cfg = s.experiment();
  GeneratorDiagnostics diag;
  Graph g = realization_graph(cfg, o.realization, &diag);
  record_generator_diagnostics(s, diag);
  s.parameters()["realization"] = o.realization;
  s.write("graph.txt", [&](std::ostream& os) { write_edge_list(os, g, ids_of(cfg)); });
  if (g.has_block_labels()) {
    s.write("blocks.csv", [&](std::ostream& os) {
      os << "node,block\n";
      for (std::size_t v = 0; v < g.node_count(); ++v) os << v << ',' << g.block_labels()[v] << '\n';
    });
  }
  s.out() << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
  s.finish();
  return 0;
}

int cmd_run(Session& s, const CommandOptions& o) {
  if (o.sic.empty() == !o.ric) throw UsageError("run needs exactly one of --sic a,b or --ric");
  if (o.ric) s.require_seed();
  ExperimentConfig cfg = s.experiment();
  Graph g = realization_graph(cfg, o.realization);
  StateVector x0;
  IcMode mode = o.ric ? IcMode::Ric : IcMode::Sic;
  if (o.ric) {
    x0 = realization_initial_state(cfg, o.realization, IcMode::Ric, g);
  } else {
    auto comma = o.sic.find(',');
    if (comma == std::string::npos) throw UsageError("--sic expects two node ids, e.g. --sic 0,33");
    std::uint64_t a = 0, b = 0;
    try {
      a = std::stoull(o.sic.substr(0, comma));
      b = std::stoull(o.sic.substr(comma + 1));
    } catch (const std::exception&) {
      throw UsageError("--sic expects two node ids, e.g. --sic 0,33");
    }
    NodeId plus = dense_node(cfg, a, g.node_count());
    NodeId minus = dense_node(cfg, b, g.node_count());
    if (plus == minus) throw UsageError("--sic needs two distinct nodes");
    x0 = init_sic(g.node_count(), plus, minus);
    s.parameters()["sic"] = o.sic;
  }
  s.parameters()["mode"] = mode_label(mode);
  s.parameters()["realization"] = o.realization;
  SteadyStateResult steady = evolve_to_steady(g, x0, cfg.max_iter);
  PolarizationSample p = polarization_index(steady.final_state);
  std::string status = status_label(steady.status, steady.period);
  s.write("run.csv", [&](std::ostream& os) {
    os << "realization,mode,r,n_minus,n_zero,status\n";
    os << o.realization << ',' << mode_label(mode) << ',' << format_double(p.r) << ','
       << format_double(p.n_minus) << ',' << format_double(p.n_zero) << ',' << status << '\n';
  });
  s.write("final_state.csv", [&](std::ostream& os) {
    os << "node,opinion\n";
    auto ids = ids_of(cfg);
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      os << output_id(ids, static_cast<NodeId>(v)) << ',' << int{steady.final_state[v]} << '\n';
    }
  });
  s.diagnostics()["iterations"] = steady.iterations;
  s.out() << "r = " << format_double(p.r) << ", status " << status << " after " << steady.iterations
          << " iterations\n";
  s.finish();
  return 0;
}

int cmd_ensemble(Session& s, const CommandOptions&) {
  s.require_seed();
  ExperimentConfig cfg = s.experiment();
  EnsembleRecord rec = run_ensemble(cfg, s.workers());
  write_mode_outputs(s, cfg, rec);
  s.finish();
  return 0;
}

int cmd_sweep(Session& s, const CommandOptions& o) {
  s.require_seed();
  std::vector<double> raw;
  for (std::size_t v : o.sizes) raw.push_back(static_cast<double>(v));
  raw = list_or(s, "sizes", raw, {250, 500, 1000, 2000});
  std::vector<std::size_t> sizes;
  for (double v : raw) {
    if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("sizes must be positive integers");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  ExperimentConfig cfg = s.experiment();
  auto points = size_sweep(cfg, sizes, s.workers());
  s.write("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, points); });
  s.finish();
  return 0;
}

int cmd_heatmap(Session& s, const CommandOptions& o) {
  s.require_seed();
  ConfigDocument& doc = s.doc();
  if (!doc.count("generator")) doc["generator"] = std::string("degree_corrected");
  if (!doc.count("nodes")) doc["nodes"] = std::int64_t{100};
  if (!doc.count("realizations")) doc["realizations"] = std::int64_t{200};
  auto alphas = list_or(s, "alphas", o.alphas, {2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5});
  auto omega_outs = list_or(s, "omega_outs", o.omega_outs, {0.01, 0.05, 0.1, 0.2, 0.3});
  doc["ic"] = std::string("sic");
  ExperimentConfig cfg = s.experiment();
  auto cells = heatmap(cfg, alphas, omega_outs, s.workers());
  s.write("heatmap.csv", [&](std::ostream& os) { write_heatmap_csv(os, cells); });
  s.finish();
  return 0;
}

int cmd_empirical(Session& s, const CommandOptions&) {
  s.require_seed();
  s.doc()["ic"] = std::string("both");
  s.doc()["seed_pairs"] = std::string("all");
  ExperimentConfig cfg = s.experiment();
  const Graph& g = fixed_graph(cfg, "empirical");
  EnsembleRecord rec = run_ensemble(cfg, s.workers());
  write_mode_outputs(s, cfg, rec);
  const auto& sic = rec.mode(IcMode::Sic).edges;
  const auto& ric = rec.mode(IcMode::Ric).edges;
  if (sic && ric) {
    s.write("edge_comparison.csv", [&](std::ostream& os) {
      os << "i,j,delta_sic,delta_ric\n";
      auto ids = ids_of(cfg);
      for (std::size_t k = 0; k < sic->edges.size(); ++k) {
        os << output_id(ids, sic->edges[k].lo) << ',' << output_id(ids, sic->edges[k].hi) << ','
           << format_double(sic->delta[k]) << ',' << format_double(ric->delta[k]) << '\n';
      }
    });
    double mad = 0.0;
    for (std::size_t k = 0; k < sic->delta.size(); ++k) mad += std::abs(sic->delta[k] - ric->delta[k]);
    if (!sic->delta.empty()) mad /= static_cast<double>(sic->delta.size());
    s.diagnostics()["mean_abs_delta_difference"] = mad;
    try {
      s.diagnostics()["delta_pearson"] = pearson_correlation(sic->delta, ric->delta);
    } catch (const std::invalid_argument& e) {
      s.diagnostics()["delta_pearson"] = nullptr;
      s.err() << "warning: " << e.what() << '\n';
    }
  }
  s.parameters()["nodes"] = g.node_count();
  s.parameters()["edges"] = g.edge_count();
  s.finish();
  return 0;
}

int cmd_stability(Session& s, const CommandOptions&) {
  s.require_seed();
  StabilityOptions options;
  options.steepness = get_double(s.doc(), "steepness").value_or(options.steepness);
  s.doc()["steepness"] = options.steepness;
  ExperimentConfig cfg = s.experiment();
  const std::size_t count = cfg.run_count();
  std::vector<StabilityRow> rows;
  std::size_t skipped = 0;
  std::optional<Graph> fixed;
  if (cfg.has_fixed_graph()) fixed = realization_graph(cfg, 0);
  for (std::size_t t = 0; t < count; ++t) {
    Graph g = fixed ? *fixed : realization_graph(cfg, t);
    for (IcMode mode : cfg.modes()) {
      SteadyStateResult steady =
          evolve_to_steady(g, realization_initial_state(cfg, t, mode, g), cfg.max_iter);
      if (steady.status != Convergence::FixedPoint) {
        ++skipped;
        continue;
      }
      rows.push_back({std::to_string(t) + "-" + mode_label(mode), classify_stability(g, steady, options)});
    }
  }
  s.write("stability.csv", [&](std::ostream& os) { write_stability_csv(os, rows); });
  std::size_t stable = 0;
  for (const StabilityRow& row : rows) stable += row.report.verdict == Verdict::Stable;
  s.diagnostics()["classified"] = rows.size();
  s.diagnostics()["stable"] = stable;
  s.diagnostics()["skipped_not_fixed_point"] = skipped;
  s.out() << rows.size() << " fixed points classified, " << stable << " stable, " << skipped
          << " runs skipped (no fixed point)\n";
  s.finish();
  return 0;
}

int cmd_split(Session& s, const CommandOptions& o) {
  auto quantiles = list_or(s, "quantiles", o.quantiles, {0.85, 0.9, 0.95});
  ExperimentConfig cfg = s.experiment();
  const Graph& g = fixed_graph(cfg, "split");
  AllPairsResult pairs = all_pairs_sic(g, cfg.max_iter, s.workers());
  auto ids = ids_of(cfg);
  s.write("edges_sic.csv", [&](std::ostream& os) { write_edges_csv(os, pairs.edges, ids); });
  std::vector<std::pair<double, SplitResult>> results;
  for (double q : quantiles) results.emplace_back(q, split_prediction(g, pairs.edges, q));
  s.write("split.csv", [&](std::ostream& os) {
    os << "quantile,threshold,removed,components,largest,second\n";
    for (const auto& [q, r] : results) {
      std::vector<std::size_t> sizes;
      for (const auto& c : r.components) sizes.push_back(c.size());
      std::sort(sizes.rbegin(), sizes.rend());
      os << format_double(q) << ',' << format_double(r.threshold) << ',' << r.removed.size() << ','
         << r.components.size() << ',' << (sizes.empty() ? 0 : sizes[0]) << ','
         << (sizes.size() > 1 ? sizes[1] : 0) << '\n';
    }
  });
  s.write("split_components.csv", [&](std::ostream& os) {
    os << "quantile,node,component\n";
    for (const auto& [q, r] : results) {
      std::vector<std::size_t> label(g.node_count());
      for (std::size_t c = 0; c < r.components.size(); ++c) {
        for (NodeId v : r.components[c]) label[v] = c;
      }
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        os << format_double(q) << ',' << output_id(ids, static_cast<NodeId>(v)) << ',' << label[v] << '\n';
      }
    }
  });
  s.write("split_removed.csv", [&](std::ostream& os) {
    os << "quantile,i,j,delta\n";
    for (const auto& [q, r] : results) {
      for (EdgeId e : r.removed) {
        os << format_double(q) << ',' << output_id(ids, e.lo) << ',' << output_id(ids, e.hi) << ','
           << format_double(pairs.edges.at(e)) << '\n';
      }
    }
  });
  s.diagnostics()["seed_pairs"] = pairs.samples.size();
  s.diagnostics()["excluded"] = pairs.excluded;
  s.finish();
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ternary majority-rule opinion dynamics on networks: seed vs random initial conditions",
               "polarsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", POLARSIM_VERSION);

  CommonOptions common;
  CommandOptions options;
  using Handler = int (*)(Session&, const CommandOptions&);
  std::vector<std::pair<CLI::App*, Handler>> commands;

  auto add = [&](const std::string& name, const std::string& description, Handler handler) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", common.config_path, "TOML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides, "Override a configuration key (key=value), repeatable");
    sub->add_option("--master-seed", common.master_seed, "Master RNG seed");
    sub->add_option("--workers", common.workers, "Worker threads (default: hardware parallelism)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out_dir, std::string("Output directory (default: $") + kOutEnv +
                                                 " or " + kDefaultOutDir + ")");
    sub->add_option("--graph", common.graph, "Edge-list file; selects the empirical generator")
        ->check(CLI::ExistingFile);
    commands.emplace_back(sub, handler);
    return sub;
  };

  auto* generate = add("generate", "Generate one graph and write it as an edge list", cmd_generate);
  generate->add_option("--realization", options.realization, "Realization index (default 0)");
  auto* run = add("run", "Evolve one initial condition to its steady state", cmd_run);
  auto* sic = run->add_option("--sic", options.sic, "Seed pair plus,minus (input node ids)");
  run->add_flag("--ric", options.ric, "Random initial condition")->excludes(sic);
  run->add_option("--realization", options.realization, "Realization index (default 0)");
  add("ensemble", "Polarization ensemble under SIC and/or RIC", cmd_ensemble);
  add("sweep-size", "Ensembles over a list of network sizes", cmd_sweep)
      ->add_option("--sizes", options.sizes, "Comma-separated sizes")
      ->delimiter(',');
  auto* heat = add("heatmap", "Mean SIC polarization over an alpha x omega_out grid", cmd_heatmap);
  heat->add_option("--alphas", options.alphas, "Comma-separated alpha values")->delimiter(',');
  heat->add_option("--omega-outs", options.omega_outs, "Comma-separated omega_out values")->delimiter(',');
  add("empirical", "All seed pairs plus an equal-size RIC ensemble on a fixed graph", cmd_empirical);
  add("stability", "Smoothed-map stability of ensemble fixed points", cmd_stability);
  add("split", "Split prediction from SIC edge differences", cmd_split)
      ->add_option("--quantiles", options.quantiles, "Comma-separated threshold quantiles")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    try {
      Session session(sub->get_name(), common, out, err);
      return handler(session, options);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\nRun with --help for usage.\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}

}  // namespace polarsim::cli
