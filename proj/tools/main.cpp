#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "echomod/harness.hpp"

namespace fs = std::filesystem;
using namespace echomod;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string ebn0;
  std::optional<std::size_t> symbols;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Common& c, bool with_symbols = true) {
  cmd->add_option("--config", c.config, "key = value config file");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--out", c.out, "output directory (default: stdout for curves, ./runs for train)");
  cmd->add_option("--ebn0", c.ebn0, "comma-separated Eb/N0 grid in dB");
  if (with_symbols) cmd->add_option("--symbols", c.symbols, "symbols per point");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

ExperimentConfig resolve(const Common& c, std::string_view symbols_key) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.ebn0.empty()) set_config_value(cfg, "ebn0_grid", c.ebn0);
  if (c.symbols && !symbols_key.empty()) set_config_value(cfg, symbols_key, std::to_string(*c.symbols));
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

// Writes to <out>/<name>, or stdout when no --out was given.
void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
  std::cerr << "wrote " << path.string() << '\n';
}

template <class Fn>
std::string to_text(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echomod: learned modulation over AWGN"};
  app.require_subcommand(1);

  Common base;
  auto* baseline = app.add_subcommand("baseline-ber", "Monte Carlo BER of a standard scheme");
  add_common(baseline, base);
  std::string scheme;
  baseline->add_option("--scheme", scheme, "qpsk, 8psk or 16qam");

  Common clus;
  auto* cluster = app.add_subcommand("cluster-demod", "jump-method clustering receiver");
  add_common(cluster, clus);
  std::string cluster_scheme;
  cluster->add_option("--scheme", cluster_scheme, "qpsk, 8psk or 16qam");

  Common tr;
  auto* train = app.add_subcommand("train", "train a transmitter (single) or two agents (echo)");
  add_common(train, tr, false);
  std::string mode;
  train->add_option("--mode", mode, "single or echo");

  Common ev;
  auto* eval = app.add_subcommand("eval-scheme", "BER of a constellation dump");
  add_common(eval, ev);
  std::string dump_path;
  eval->add_option("dump", dump_path, "constellation dump")->required();

  Common sw;
  auto* sweep = app.add_subcommand("sweep", "train + evaluate over a parameter and seeds");
  add_common(sweep, sw);
  std::string param;
  std::string values;
  sweep->add_option("--param", param, "config key to sweep");
  sweep->add_option("--values", values, "comma-separated values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (baseline->parsed()) {
      ExperimentConfig cfg = resolve(base, "symbols");
      if (!scheme.empty()) set_config_value(cfg, "scheme", scheme);
      const auto curve = cmd_baseline_ber(cfg);
      emit(base, "baseline.csv", to_text([&](std::ostream& o) { write_curve_csv(o, curve); }));
    } else if (cluster->parsed()) {
      ExperimentConfig cfg = resolve(clus, "payload_symbols");
      if (!cluster_scheme.empty()) set_config_value(cfg, "scheme", cluster_scheme);
      const auto c = cmd_cluster_demod(cfg);
      emit(clus, "cluster.csv", to_text([&](std::ostream& o) { write_cluster_csv(o, c); }));
      if (!clus.out.empty()) {
        emit(clus, "cluster_trials.csv", to_text([&](std::ostream& o) { write_cluster_trials_csv(o, c); }));
      }
    } else if (train->parsed()) {
      ExperimentConfig cfg = resolve(tr, "");
      if (!mode.empty()) set_config_value(cfg, "mode", mode);
      const fs::path dir = cmd_train(cfg, tr.out.empty() ? fs::path("runs") : fs::path(tr.out));
      std::cout << dir.string() << '\n';
    } else if (eval->parsed()) {
      ExperimentConfig cfg = resolve(ev, "eval_symbols");
      std::ifstream in(dump_path);
      if (!in) throw InputError("cannot open dump " + dump_path);
      const Constellation c = read_dump(in);
      const auto curve = cmd_eval_scheme(c, cfg);
      emit(ev, "eval.csv", to_text([&](std::ostream& o) { write_curve_csv(o, curve); }));
    } else if (sweep->parsed()) {
      ExperimentConfig cfg = resolve(sw, "eval_symbols");
      if (!param.empty()) set_config_value(cfg, "sweep_parameter", param);
      if (!values.empty()) set_config_value(cfg, "sweep_values", values);
      const auto r = cmd_sweep(cfg);
      emit(sw, "sweep.csv", to_text([&](std::ostream& o) { write_sweep_csv(o, r, cfg.sweep_parameter); }));
      const std::string runs = to_text([&](std::ostream& o) { write_sweep_runs_csv(o, r); });
      if (sw.out.empty()) {
        std::cerr << runs;
      } else {
        emit(sw, "sweep_runs.csv", runs);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error[parse]: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error[input]: " << e.what() << '\n';
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "error[numeric]: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error[io]: " << e.what() << '\n';
    return 6;
  }
  return 0;
}
