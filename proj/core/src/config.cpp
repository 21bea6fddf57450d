#include "polarsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polarsim/io.hpp"

namespace polarsim {

namespace {

const std::vector<double> kDefaultFractions{0.7, 0.15, 0.15};

std::string_view trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-';
  });
}

std::optional<ConfigValue> parse_number(std::string_view text) {
  std::string cleaned;
  for (char c : text) {
    if (c != '_') cleaned.push_back(c);
  }
  if (cleaned.empty()) return std::nullopt;
  const char* first = cleaned.data();
  const char* last = first + cleaned.size();
  if (*first == '+') ++first;
  bool floating = cleaned.find_first_of(".eE") != std::string::npos || cleaned.find("inf") != std::string::npos ||
                  cleaned.find("nan") != std::string::npos;
  if (!floating) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last) return ConfigValue{v};
    return std::nullopt;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc() && ptr == last) return ConfigValue{v};
  return std::nullopt;
}

// Parses a value at the start of `text`; returns it and the unconsumed rest.
std::pair<ConfigValue, std::string_view> parse_value_prefix(std::string_view text, bool allow_bare) {
  text = trim(text);
  if (text.empty()) throw ConfigError("missing value");
  if (text.front() == '"') {
    std::string out;
    for (std::size_t k = 1; k < text.size(); ++k) {
      char c = text[k];
      if (c == '"') return {ConfigValue{out}, text.substr(k + 1)};
      if (c == '\\') {
        if (++k == text.size()) break;
        switch (text[k]) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: throw ConfigError(std::string("unsupported escape \\") + text[k]);
        }
      } else {
        out.push_back(c);
      }
    }
    throw ConfigError("unterminated string");
  }
  if (text.front() == '[') {
    auto close = text.find(']');
    if (close == std::string_view::npos) throw ConfigError("unterminated array (arrays must fit on one line)");
    std::vector<double> items;
    std::string_view body = text.substr(1, close - 1);
    while (!trim(body).empty()) {
      auto comma = body.find(',');
      std::string_view item = trim(body.substr(0, comma));
      if (item.empty()) throw ConfigError("empty array element");
      auto number = parse_number(item);
      if (!number) throw ConfigError("arrays may only hold numbers, got '" + std::string(item) + "'");
      items.push_back(std::holds_alternative<double>(*number)
                          ? std::get<double>(*number)
                          : static_cast<double>(std::get<std::int64_t>(*number)));
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return {ConfigValue{items}, text.substr(close + 1)};
  }
  auto end = text.find_first_of(" \t#");
  std::string_view token = text.substr(0, end);
  std::string_view rest = end == std::string_view::npos ? std::string_view{} : text.substr(end);
  if (token == "true") return {ConfigValue{true}, rest};
  if (token == "false") return {ConfigValue{false}, rest};
  if (auto number = parse_number(token)) return {*number, rest};
  if (allow_bare) return {ConfigValue{std::string(text)}, {}};
  throw ConfigError("cannot parse value '" + std::string(token) + "'");
}

void check_known(const std::string& key) {
  const auto& keys = known_config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::string render_double(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string render(const ConfigValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return render_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string out = "\"";
          for (char c : v) {
            switch (c) {
              case '"': out += "\\\""; break;
              case '\\': out += "\\\\"; break;
              case '\n': out += "\\n"; break;
              case '\t': out += "\\t"; break;
              default: out.push_back(c);
            }
          }
          return out + "\"";
        } else {
          std::string out = "[";
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (k) out += ", ";
            out += render_double(v[k]);
          }
          return out + "]";
        }
      },
      value);
}

std::size_t get_count(const ConfigDocument& doc, const std::string& key, std::size_t fallback) {
  auto v = get_int(doc, key);
  if (!v) return fallback;
  if (*v < 0) throw ConfigError("'" + key + "' must be non-negative");
  return static_cast<std::size_t>(*v);
}

std::optional<std::size_t> get_optional_count(const ConfigDocument& doc, const std::string& key) {
  if (!doc.count(key)) return std::nullopt;
  return get_count(doc, key, 0);
}

PlantedPartitionSpec spec_from(const ConfigDocument& doc) {
  PlantedPartitionSpec spec;
  spec.node_count = get_count(doc, "nodes", 1000);
  spec.block_fractions = get_list(doc, "block_fractions").value_or(kDefaultFractions);
  spec.omega_in = get_double(doc, "omega_in").value_or(spec.omega_in);
  spec.omega_out = get_double(doc, "omega_out").value_or(spec.omega_out);
  spec.target_mean_degree = get_double(doc, "mean_degree").value_or(spec.target_mean_degree);
  return spec;
}

void put_spec(ConfigDocument& doc, const PlantedPartitionSpec& spec) {
  doc["nodes"] = static_cast<std::int64_t>(spec.node_count);
  doc["block_fractions"] = spec.block_fractions;
  doc["omega_in"] = spec.omega_in;
  doc["omega_out"] = spec.omega_out;
  doc["mean_degree"] = spec.target_mean_degree;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 14695981039346656037ull) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "alpha",      "alphas",        "block_fractions", "generator", "graph",       "ic",
      "include_cycles", "k_max",     "k_min",           "master_seed", "max_iter", "mean_degree",
      "nodes",      "omega_in",      "omega_out",       "omega_outs", "quantiles", "realizations",
      "seed_pairs", "sizes",         "steepness"};
  return keys;
}

ConfigValue parse_config_value(std::string_view text, bool allow_bare_string) {
  auto [value, rest] = parse_value_prefix(text, allow_bare_string);
  rest = trim(rest);
  if (!rest.empty() && rest.front() != '#') {
    throw ConfigError("unexpected text after value: '" + std::string(rest) + "'");
  }
  return value;
}

ConfigDocument parse_config(std::istream& in) {
  ConfigDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      if (line.front() == '[') throw ConfigError("tables are not supported; use flat keys");
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError("expected key = value");
      std::string key(trim(line.substr(0, eq)));
      if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
      check_known(key);
      if (doc.count(key)) throw ConfigError("duplicate key '" + key + "'");
      doc[key] = parse_config_value(line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return doc;
}

ConfigDocument parse_config_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ConfigDocument parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(ConfigDocument& doc, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override must look like key=value");
  std::string key(trim(assignment.substr(0, eq)));
  check_known(key);
  doc[key] = parse_config_value(assignment.substr(eq + 1), true);
}

std::string dump_config(const ConfigDocument& doc) {
  std::string out;
  for (const auto& [key, value] : doc) out += key + " = " + render(value) + "\n";
  return out;
}

std::optional<double> get_double(const ConfigDocument& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::nullopt;
  if (auto d = std::get_if<double>(&it->second)) return *d;
  if (auto i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  throw ConfigError("'" + key + "' must be a number");
}

std::optional<std::int64_t> get_int(const ConfigDocument& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::nullopt;
  if (auto i = std::get_if<std::int64_t>(&it->second)) return *i;
  throw ConfigError("'" + key + "' must be an integer");
}

std::optional<std::string> get_string(const ConfigDocument& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::nullopt;
  if (auto s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("'" + key + "' must be a string");
}

std::optional<bool> get_bool(const ConfigDocument& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::nullopt;
  if (auto b = std::get_if<bool>(&it->second)) return *b;
  throw ConfigError("'" + key + "' must be true or false");
}

std::optional<std::vector<double>> get_list(const ConfigDocument& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::nullopt;
  if (auto l = std::get_if<std::vector<double>>(&it->second)) return *l;
  if (auto d = get_double(doc, key)) return std::vector<double>{*d};
  return std::nullopt;
}

ExperimentConfig experiment_from_document(const ConfigDocument& doc) {
  ExperimentConfig cfg;
  std::string generator =
      get_string(doc, "generator").value_or(doc.count("graph") ? "empirical" : "configuration");
  if (generator == "configuration") {
    ConfigModelParams p;
    p.node_count = get_count(doc, "nodes", p.node_count);
    p.alpha = get_double(doc, "alpha").value_or(p.alpha);
    p.k_min = get_count(doc, "k_min", p.k_min);
    p.k_max = get_optional_count(doc, "k_max");
    cfg.generator = p;
  } else if (generator == "planted_partition") {
    cfg.generator = PlantedPartitionParams{spec_from(doc)};
  } else if (generator == "degree_corrected") {
    DegreeCorrectedParams p;
    p.spec = spec_from(doc);
    p.alpha = get_double(doc, "alpha").value_or(p.alpha);
    p.k_min = get_count(doc, "k_min", p.k_min);
    p.k_max = get_optional_count(doc, "k_max");
    cfg.generator = p;
  } else if (generator == "empirical") {
    auto path = get_string(doc, "graph");
    if (!path) throw ConfigError("generator 'empirical' needs a 'graph' path");
    LoadedGraph loaded = load_edge_list_file(*path);
    cfg.generator = FixedGraph{*path, std::make_shared<const Graph>(std::move(loaded.graph)),
                               std::move(loaded.original_ids)};
  } else {
    throw ConfigError("unknown generator '" + generator +
                      "' (expected configuration, planted_partition, degree_corrected or empirical)");
  }

  std::string ic = get_string(doc, "ic").value_or("both");
  if (ic == "sic") cfg.ic = IcSelection::Sic;
  else if (ic == "ric") cfg.ic = IcSelection::Ric;
  else if (ic == "both") cfg.ic = IcSelection::Both;
  else throw ConfigError("'ic' must be sic, ric or both");

  std::string pairs = get_string(doc, "seed_pairs").value_or("random");
  if (pairs == "random") cfg.seed_pairs = SeedPairPolicy::RandomPairs;
  else if (pairs == "all") cfg.seed_pairs = SeedPairPolicy::AllPairs;
  else throw ConfigError("'seed_pairs' must be random or all");

  cfg.realizations = get_count(doc, "realizations", cfg.realizations);
  cfg.master_seed = static_cast<std::uint64_t>(get_count(doc, "master_seed", cfg.master_seed));
  cfg.max_iter = get_count(doc, "max_iter", cfg.max_iter);
  cfg.include_cycles = get_bool(doc, "include_cycles").value_or(cfg.include_cycles);
  return cfg;
}

ConfigDocument document_from_experiment(const ExperimentConfig& cfg) {
  ConfigDocument doc;
  std::visit(
      [&doc](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConfigModelParams>) {
          doc["generator"] = std::string("configuration");
          doc["nodes"] = static_cast<std::int64_t>(p.node_count);
          doc["alpha"] = p.alpha;
          doc["k_min"] = static_cast<std::int64_t>(p.k_min);
          if (p.k_max) doc["k_max"] = static_cast<std::int64_t>(*p.k_max);
        } else if constexpr (std::is_same_v<T, PlantedPartitionParams>) {
          doc["generator"] = std::string("planted_partition");
          put_spec(doc, p.spec);
        } else if constexpr (std::is_same_v<T, DegreeCorrectedParams>) {
          doc["generator"] = std::string("degree_corrected");
          put_spec(doc, p.spec);
          doc["alpha"] = p.alpha;
          doc["k_min"] = static_cast<std::int64_t>(p.k_min);
          if (p.k_max) doc["k_max"] = static_cast<std::int64_t>(*p.k_max);
        } else {
          doc["generator"] = std::string("empirical");
          doc["graph"] = p.path;
        }
      },
      cfg.generator);
  const char* ic = cfg.ic == IcSelection::Sic ? "sic" : cfg.ic == IcSelection::Ric ? "ric" : "both";
  doc["ic"] = std::string(ic);
  doc["seed_pairs"] = std::string(cfg.seed_pairs == SeedPairPolicy::AllPairs ? "all" : "random");
  doc["realizations"] = static_cast<std::int64_t>(cfg.realizations);
  doc["master_seed"] = static_cast<std::int64_t>(cfg.master_seed);
  doc["max_iter"] = static_cast<std::int64_t>(cfg.max_iter);
  doc["include_cycles"] = cfg.include_cycles;
  return doc;
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::uint64_t hash = fnv1a(dump_config(document_from_experiment(cfg)));
  if (const auto* fixed = std::get_if<FixedGraph>(&cfg.generator); fixed && fixed->graph) {
    std::ostringstream edges;
    write_edge_list(edges, *fixed->graph);
    hash = fnv1a(edges.str(), hash);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace polarsim
