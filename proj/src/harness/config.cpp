#include <algorithm>
#include <fstream>
#include <sstream>

#include "echomod/format.hpp"
#include "echomod/harness.hpp"

namespace echomod {
namespace {

std::size_t as_size(std::string_view key, std::string_view v) {
  const auto p = parse_u64(v);
  if (!p) throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  return static_cast<std::size_t>(*p);
}

double as_double(std::string_view key, std::string_view v) {
  const auto p = parse_double(v);
  if (!p || !std::isfinite(*p)) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
  return *p;
}

bool as_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

Scheme as_scheme(std::string_view v) {
  try {
    return parse_scheme(v);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

struct Key {
  std::string_view name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

#define SIZE_KEY(name, field)                                             \
  Key {                                                                   \
    name, [](const ExperimentConfig& c) { return std::to_string(c.field); }, \
        [](ExperimentConfig& c, std::string_view v) { c.field = as_size(name, v); } \
  }
#define DOUBLE_KEY(name, field)                                           \
  Key {                                                                   \
    name, [](const ExperimentConfig& c) { return format_double(c.field); }, \
        [](ExperimentConfig& c, std::string_view v) { c.field = as_double(name, v); } \
  }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      {"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
       [](ExperimentConfig& c, std::string_view v) {
         const auto p = parse_u64(v);
         if (!p) throw ConfigError("'seed' expects an unsigned 64-bit integer, got '" + std::string(v) + "'");
         c.seed = *p;
       }},
      SIZE_KEY("seeds", seeds),
      {"ebn0_grid",
       [](const ExperimentConfig& c) {
         std::vector<std::string> items;
         for (double d : c.ebn0_grid) items.push_back(format_double(d));
         return join(items);
       },
       [](ExperimentConfig& c, std::string_view v) {
         try {
           c.ebn0_grid = parse_csv_doubles(v);
         } catch (const InputError& e) {
           throw ConfigError(std::string("'ebn0_grid': ") + e.what());
         }
       }},
      SIZE_KEY("threads", threads),
      {"scheme", [](const ExperimentConfig& c) { return std::string(scheme_name(c.scheme)); },
       [](ExperimentConfig& c, std::string_view v) { c.scheme = as_scheme(v); }},
      SIZE_KEY("symbols", symbols),
      SIZE_KEY("preamble_symbols", preamble_symbols),
      SIZE_KEY("payload_symbols", payload_symbols),
      SIZE_KEY("max_clusters", max_clusters),
      SIZE_KEY("kmeans_iterations", kmeans_iterations),
      {"mode", [](const ExperimentConfig& c) { return std::string(c.mode == TrainMode::echo ? "echo" : "single"); },
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "echo") {
           c.mode = TrainMode::echo;
         } else if (v == "single") {
           c.mode = TrainMode::single;
         } else {
           throw ConfigError("'mode' expects echo or single, got '" + std::string(v) + "'");
         }
       }},
      {"receiver", [](const ExperimentConfig& c) { return std::string(scheme_name(c.receiver)); },
       [](ExperimentConfig& c, std::string_view v) { c.receiver = as_scheme(v); }},
      SIZE_KEY("preamble_length", train.preamble_length),
      DOUBLE_KEY("n0", train.n0),
      {"bits_per_symbol", [](const ExperimentConfig& c) { return std::to_string(c.train.bits_per_symbol); },
       [](ExperimentConfig& c, std::string_view v) {
         const std::size_t n = as_size("bits_per_symbol", v);
         if (n < 1 || n > kMaxBitsPerSymbol) throw ConfigError("'bits_per_symbol' must be in [1, 4]");
         c.train.bits_per_symbol = static_cast<unsigned>(n);
       }},
      SIZE_KEY("iterations", train.iterations),
      SIZE_KEY("knn_k", train.knn_k),
      DOUBLE_KEY("step_size", train.tx.step_size),
      DOUBLE_KEY("lambda_p", train.tx.lambda_p),
      DOUBLE_KEY("initial_log_sigma", train.tx.initial_log_sigma),
      {"restrict_energy", [](const ExperimentConfig& c) { return std::string(c.train.tx.restrict_energy ? "true" : "false"); },
       [](ExperimentConfig& c, std::string_view v) { c.train.tx.restrict_energy = as_bool("restrict_energy", v); }},
      SIZE_KEY("hidden_units", train.tx.hidden_units),
      SIZE_KEY("eval_symbols", eval_symbols),
      SIZE_KEY("recon_preamble", recon_preamble),
      {"sweep_parameter", [](const ExperimentConfig& c) { return c.sweep_parameter; },
       [](ExperimentConfig& c, std::string_view v) { c.sweep_parameter = std::string(v); }},
      {"sweep_values", [](const ExperimentConfig& c) { return join(c.sweep_values); },
       [](ExperimentConfig& c, std::string_view v) { c.sweep_values = split_list(v); }},
  };
  return keys;
}

#undef SIZE_KEY
#undef DOUBLE_KEY

const Key& find_key(std::string_view key) {
  for (const auto& k : registry()) {
    if (k.name == key) return k;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "' (nearest valid key: '" +
                    nearest_key(key, config_keys()) + "')");
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (int db = 0; db <= 16; ++db) ebn0_grid.push_back(db);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : registry()) out.emplace_back(k.name);
  return out;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  find_key(key).set(cfg, trim(value));
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) {
  return find_key(key).get(cfg);
}

std::string nearest_key(std::string_view key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = 0;
  for (const auto& c : candidates) {
    // Levenshtein distance with a single rolling row.
    std::vector<std::size_t> row(c.size() + 1);
    for (std::size_t j = 0; j <= c.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= key.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= c.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (key[i - 1] == c[j - 1] ? 0u : 1u)});
        diag = up;
      }
    }
    if (best.empty() || row[c.size()] < best_d) {
      best = c;
      best_d = row[c.size()];
    }
  }
  return best;
}

std::vector<double> parse_csv_doubles(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const auto v = parse_double(item);
    if (!v || !std::isfinite(*v)) throw InputError("not a number: '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "missing key before '='");
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string resolved_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : registry()) {
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& k : registry()) {
    if (k.name == "seed" || k.name == "threads") continue;
    const std::string line = std::string(k.name) + '=' + k.get(cfg) + '\n';
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace echomod
