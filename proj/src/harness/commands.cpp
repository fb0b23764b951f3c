#include <bit>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "echomod/format.hpp"
#include "echomod/harness.hpp"

namespace echomod {
namespace {

enum StreamTag : std::uint64_t { kBaseline = 11, kClusterPreamble, kClusterPayload, kRecon, kPayload };

// Streams are keyed by the grid value itself so a point does not depend on
// which other points are in the grid.
std::uint64_t point_seed(std::uint64_t seed, StreamTag tag, double ebn0_db) {
  return derive_seed(seed, {tag, std::bit_cast<std::uint64_t>(ebn0_db)});
}

BitWord random_word(Rng& rng, unsigned bits) {
  return BitWord(static_cast<unsigned>(rng.below(std::uint64_t{1} << bits)), bits);
}

IQSymbol add_noise(IQSymbol s, double sigma, Rng& rng) {
  const double ni = rng.normal();
  const double nq = rng.normal();
  return {s.real() + sigma * ni, s.imag() + sigma * nq};
}

template <class Fn>
std::vector<CurvePoint> ensemble_curve(const ExperimentConfig& cfg, Fn&& point) {
  const auto seeds = ensemble_seeds(cfg.seed, cfg.seeds);
  const std::size_t g = cfg.ebn0_grid.size();
  std::vector<BitCount> counts(g * seeds.size());
  parallel_for(counts.size(), cfg.threads, [&](std::size_t job) {
    counts[job] = point(cfg.ebn0_grid[job / seeds.size()], seeds[job % seeds.size()]);
  });
  std::vector<CurvePoint> curve;
  for (std::size_t p = 0; p < g; ++p) {
    std::vector<double> bers;
    std::uint64_t errors = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      bers.push_back(counts[p * seeds.size() + s].ber());
      errors += counts[p * seeds.size() + s].errors;
    }
    curve.push_back(aggregate(cfg.ebn0_grid[p], bers, errors));
  }
  return curve;
}

void require_ensemble(const ExperimentConfig& cfg) {
  if (cfg.seeds < 1) throw InputError("seeds must be at least 1");
  if (cfg.ebn0_grid.empty()) throw InputError("empty Eb/N0 grid");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace

BitCount baseline_ber_point(Scheme scheme, double ebn0_db, std::size_t symbols, std::uint64_t seed) {
  if (symbols < 10'000) throw InputError("baseline BER needs at least 10^4 symbols");
  const Constellation c = standard_constellation(scheme);
  const CoherentDemodulator demod(c);
  const unsigned bits = c.bits_per_symbol();
  const double sigma = std::sqrt(n0_for_ebn0(ebn0_db, mean_symbol_energy(c), bits) / 2.0);
  Rng rng(point_seed(seed, kBaseline, ebn0_db));
  BitCount n;
  for (std::size_t i = 0; i < symbols; ++i) {
    const BitWord w = random_word(rng, bits);
    n.errors += hamming(w, demod(add_noise(c.point(w), sigma, rng)));
  }
  n.bits = static_cast<std::uint64_t>(symbols) * bits;
  return n;
}

std::vector<CurvePoint> cmd_baseline_ber(const ExperimentConfig& cfg) {
  require_ensemble(cfg);
  return ensemble_curve(cfg, [&](double db, std::uint64_t seed) {
    return baseline_ber_point(cfg.scheme, db, cfg.symbols, seed);
  });
}

ClusterTrial cluster_demod_trial(Scheme scheme, double ebn0_db, std::size_t preamble_symbols,
                                 std::size_t payload_symbols, std::size_t max_clusters,
                                 std::size_t kmeans_iterations, std::uint64_t seed) {
  if (preamble_symbols < 20) throw InputError("cluster demodulation needs a preamble of at least 20 symbols");
  const Constellation c = standard_constellation(scheme);
  const unsigned bits = c.bits_per_symbol();
  const double sigma = std::sqrt(n0_for_ebn0(ebn0_db, mean_symbol_energy(c), bits) / 2.0);

  Rng pre(point_seed(seed, kClusterPreamble, ebn0_db));
  std::vector<BitWord> words;
  std::vector<IQSymbol> noisy;
  for (std::size_t i = 0; i < preamble_symbols; ++i) {
    words.push_back(random_word(pre, bits));
    noisy.push_back(add_noise(c.point(words.back()), sigma, pre));
  }
  const JumpSelection sel =
      jump_select_k(noisy, std::min(max_clusters, preamble_symbols), static_cast<int>(kmeans_iterations));
  const LabeledDemod demod = label_clusters(sel.clustering, words);
  const simd::PointSet means(demod.means);

  ClusterTrial t;
  t.ebn0_db = ebn0_db;
  t.seed = seed;
  t.k_selected = sel.k;
  Rng pay(point_seed(seed, kClusterPayload, ebn0_db));
  for (std::size_t i = 0; i < payload_symbols; ++i) {
    const BitWord w = random_word(pay, bits);
    const int idx = simd::nearest(means, add_noise(c.point(w), sigma, pay));
    t.count.errors += hamming(w, demod.labels[static_cast<std::size_t>(idx)]);
  }
  t.count.bits = static_cast<std::uint64_t>(payload_symbols) * bits;
  return t;
}

ClusterCurve cmd_cluster_demod(const ExperimentConfig& cfg) {
  require_ensemble(cfg);
  const auto seeds = ensemble_seeds(cfg.seed, cfg.seeds);
  ClusterCurve out;
  out.trials.resize(cfg.ebn0_grid.size() * seeds.size());
  parallel_for(out.trials.size(), cfg.threads, [&](std::size_t job) {
    out.trials[job] = cluster_demod_trial(cfg.scheme, cfg.ebn0_grid[job / seeds.size()],
                                          cfg.preamble_symbols, cfg.payload_symbols, cfg.max_clusters,
                                          cfg.kmeans_iterations, seeds[job % seeds.size()]);
  });
  for (std::size_t p = 0; p < cfg.ebn0_grid.size(); ++p) {
    std::vector<double> bers;
    std::uint64_t errors = 0;
    double k_sum = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& t = out.trials[p * seeds.size() + s];
      bers.push_back(t.count.ber());
      errors += t.count.errors;
      k_sum += static_cast<double>(t.k_selected);
    }
    out.curve.push_back(aggregate(cfg.ebn0_grid[p], bers, errors));
    out.mean_k.push_back(k_sum / static_cast<double>(seeds.size()));
  }
  return out;
}

void write_cluster_csv(std::ostream& out, const ClusterCurve& c) {
  out << "ebn0_db,ber,ber_std,n,flag,k_selected\n";
  for (std::size_t i = 0; i < c.curve.size(); ++i) {
    const auto& p = c.curve[i];
    out << format_double(p.ebn0_db) << ',' << format_double(p.ber) << ','
        << (p.ber_std ? format_double(*p.ber_std) : "") << ',' << p.n << ','
        << (p.no_errors ? "no_errors" : "") << ',' << format_double(c.mean_k[i]) << '\n';
  }
}

void write_cluster_trials_csv(std::ostream& out, const ClusterCurve& c) {
  out << "ebn0_db,seed,k_selected,ber\n";
  for (const auto& t : c.trials) {
    out << format_double(t.ebn0_db) << ',' << t.seed << ',' << t.k_selected << ','
        << format_double(t.count.ber()) << '\n';
  }
}

BitCount eval_scheme_point(const Constellation& c, double ebn0_db, std::size_t symbols,
                           std::size_t recon_preamble, std::uint64_t seed) {
  const unsigned bits = c.bits_per_symbol();
  const double es = mean_symbol_energy(c);
  if (!(es > 0.0)) throw InputError("constellation has zero energy; Eb/N0 is undefined");
  const double sigma = std::sqrt(n0_for_ebn0(ebn0_db, es, bits) / 2.0);

  // Receiver-side means: per-word averages of a long noisy preamble.
  std::vector<IQSymbol> points;
  std::vector<BitWord> labels;
  if (recon_preamble == 0) {
    points.assign(c.points().begin(), c.points().end());
    for (std::size_t w = 0; w < c.order(); ++w) labels.push_back(c.word(w));
  } else {
    std::vector<IQSymbol> sum(c.order());
    std::vector<std::size_t> count(c.order(), 0);
    Rng rng(point_seed(seed, kRecon, ebn0_db));
    for (std::size_t i = 0; i < recon_preamble; ++i) {
      const BitWord w = random_word(rng, bits);
      sum[w.value()] += add_noise(c.point(w), sigma, rng);
      ++count[w.value()];
    }
    for (std::size_t w = 0; w < c.order(); ++w) {
      if (count[w] == 0) continue;
      points.push_back(sum[w] / static_cast<double>(count[w]));
      labels.push_back(c.word(w));
    }
  }
  const simd::PointSet rx(points);

  BitCount n;
  Rng rng(point_seed(seed, kPayload, ebn0_db));
  for (std::size_t i = 0; i < symbols; ++i) {
    const BitWord w = random_word(rng, bits);
    const int idx = simd::nearest(rx, add_noise(c.point(w), sigma, rng));
    n.errors += hamming(w, labels[static_cast<std::size_t>(idx)]);
  }
  n.bits = static_cast<std::uint64_t>(symbols) * bits;
  return n;
}

std::vector<CurvePoint> cmd_eval_scheme(const Constellation& c, const ExperimentConfig& cfg) {
  require_ensemble(cfg);
  return ensemble_curve(cfg, [&](double db, std::uint64_t seed) {
    return eval_scheme_point(c, db, cfg.eval_symbols, cfg.recon_preamble, seed);
  });
}

TrainArtifacts run_training(const ExperimentConfig& cfg) {
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  TrainArtifacts a;
  if (cfg.mode == TrainMode::single) {
    const Constellation rx = standard_constellation(cfg.receiver);
    if (rx.bits_per_symbol() != tc.bits_per_symbol) {
      throw InputError("receiver " + std::string(scheme_name(cfg.receiver)) + " carries " +
                       std::to_string(rx.bits_per_symbol()) + " bits per symbol but bits_per_symbol = " +
                       std::to_string(tc.bits_per_symbol));
    }
    RunMetrics m = train_single_agent(rx, tc);
    a.records = std::move(m.records);
    a.schemes.push_back(std::move(m.final_constellation));
    a.states.push_back(std::move(m.final_state));
  } else {
    EchoResult r = train_echo(tc);
    a.records = merged_records(r);
    for (RunMetrics* m : {&r.agent1, &r.agent2}) {
      a.schemes.push_back(std::move(m->final_constellation));
      a.states.push_back(std::move(m->final_state));
    }
  }
  return a;
}

std::filesystem::path run_directory(const std::filesystem::path& out, const ExperimentConfig& cfg) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  return out / (std::string(hex) + "-s" + std::to_string(cfg.seed));
}

std::filesystem::path cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const TrainArtifacts a = run_training(cfg);
  const auto dir = run_directory(out, cfg);
  std::filesystem::create_directories(dir);
  write_file(dir / "config.resolved", resolved_config(cfg));
  std::ostringstream metrics;
  write_metrics_csv(metrics, a.records);
  write_file(dir / "metrics.csv", metrics.str());
  for (std::size_t i = 0; i < a.schemes.size(); ++i) {
    const std::string stem = "agent" + std::to_string(i + 1);
    write_file(dir / (stem + ".dump"), to_dump(a.schemes[i]));
    std::ostringstream ckpt;
    write_checkpoint(ckpt, a.states[i]);
    write_file(dir / (stem + ".ckpt"), ckpt.str());
  }
  return dir;
}

SweepResult cmd_sweep(const ExperimentConfig& cfg) {
  require_ensemble(cfg);
  if (cfg.sweep_parameter.empty()) throw ConfigError("sweep_parameter is not set");
  if (cfg.sweep_parameter == "seed" || cfg.sweep_parameter == "sweep_parameter" ||
      cfg.sweep_parameter == "sweep_values") {
    throw ConfigError("cannot sweep over '" + cfg.sweep_parameter + "'");
  }
  get_config_value(cfg, cfg.sweep_parameter);  // rejects unknown keys
  if (cfg.sweep_values.empty()) throw ConfigError("sweep_values is empty");

  // Validate every value up front; a typo should not cost a whole sweep.
  for (const auto& v : cfg.sweep_values) {
    ExperimentConfig probe = cfg;
    set_config_value(probe, cfg.sweep_parameter, v);
  }

  const auto seeds = ensemble_seeds(cfg.seed, cfg.seeds);
  SweepResult r;
  r.values = cfg.sweep_values;
  r.runs.resize(r.values.size() * seeds.size());
  parallel_for(r.runs.size(), cfg.threads, [&](std::size_t job) {
    SweepRun& run = r.runs[job];
    run.value = r.values[job / seeds.size()];
    run.seed = seeds[job % seeds.size()];
    try {
      ExperimentConfig one = cfg;
      set_config_value(one, cfg.sweep_parameter, run.value);
      one.seed = run.seed;
      const TrainArtifacts a = run_training(one);
      for (double db : one.ebn0_grid) {
        run.counts.push_back(eval_scheme_point(a.schemes.front(), db, one.eval_symbols,
                                               one.recon_preamble, run.seed));
      }
      run.ok = true;
    } catch (const std::exception& e) {
      run.ok = false;
      run.message = e.what();
      run.counts.clear();
    }
  });

  for (std::size_t v = 0; v < r.values.size(); ++v) {
    std::vector<CurvePoint> curve;
    for (std::size_t p = 0; p < cfg.ebn0_grid.size(); ++p) {
      std::vector<double> bers;
      std::uint64_t errors = 0;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& run = r.runs[v * seeds.size() + s];
        if (!run.ok) continue;
        bers.push_back(run.counts[p].ber());
        errors += run.counts[p].errors;
      }
      curve.push_back(aggregate(cfg.ebn0_grid[p], bers, errors));
    }
    r.curves.push_back(std::move(curve));
  }
  return r;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r, std::string_view parameter) {
  out << parameter << ",ebn0_db,ber,ber_std,n,flag\n";
  for (std::size_t v = 0; v < r.values.size(); ++v) {
    for (const auto& p : r.curves[v]) {
      out << r.values[v] << ',' << format_double(p.ebn0_db) << ',' << format_double(p.ber) << ','
          << (p.ber_std ? format_double(*p.ber_std) : "") << ',' << p.n << ','
          << (p.n == 0 ? "no_runs" : p.no_errors ? "no_errors" : "") << '\n';
    }
  }
}

void write_sweep_runs_csv(std::ostream& out, const SweepResult& r) {
  out << "value,seed,status,message\n";
  for (const auto& run : r.runs) {
    std::string msg = run.message;
    for (auto& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << run.value << ',' << run.seed << ',' << (run.ok ? "ok" : "failed") << ',' << msg << '\n';
  }
}

}  // namespace echomod
