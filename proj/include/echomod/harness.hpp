#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echomod/modem.hpp"
#include "echomod/trainer.hpp"

namespace echomod {

/// Unknown keys and malformed values in experiment configs.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class TrainMode { single, echo };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t seeds = 10;
  std::vector<double> ebn0_grid;  ///< dB; defaults to 0..16 in 1 dB steps
  std::size_t threads = 0;        ///< 0: one per hardware thread; not part of the run hash

  // baseline-ber
  Scheme scheme = Scheme::qam16;
  std::size_t symbols = 1'000'000;

  // cluster-demod
  std::size_t preamble_symbols = 1000;
  std::size_t payload_symbols = 100'000;
  std::size_t max_clusters = 20;
  std::size_t kmeans_iterations = 50;

  // train
  TrainMode mode = TrainMode::echo;
  Scheme receiver = Scheme::qam16;  ///< fixed receiver for single mode
  TrainConfig train;

  // eval-scheme
  std::size_t eval_symbols = 10'000'000;
  std::size_t recon_preamble = 10'000;  ///< 0: receiver knows the means exactly

  // sweep
  std::string sweep_parameter;
  std::vector<std::string> sweep_values;

  ExperimentConfig();
};

/// Every recognised key, in resolved-config order.
std::vector<std::string> config_keys();

/// Applies one `key = value` assignment. Unknown keys raise a ConfigError
/// that names the closest valid key.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

/// Flat `key = value` text with `#` comments, applied on top of defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its value; parsing this text gives back the same config.
std::string resolved_config(const ExperimentConfig& cfg);

/// FNV-1a over the resolved config without `seed` and `threads`.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Closest candidate by edit distance (first one on ties).
std::string nearest_key(std::string_view key, const std::vector<std::string>& candidates);

std::vector<double> parse_csv_doubles(std::string_view text);

// ---------------------------------------------------------------------------
// Curves

struct CurvePoint {
  double ebn0_db = 0.0;
  double ber = 0.0;
  std::optional<double> ber_std;  ///< only with more than one seed
  std::size_t n = 0;              ///< seeds aggregated
  bool no_errors = false;         ///< no bit error observed in any seed
};

/// Mean and sample standard deviation of per-seed BERs; `errors` is the total
/// bit-error count behind them.
CurvePoint aggregate(double ebn0_db, std::span<const double> per_seed_ber, std::uint64_t errors);

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

/// Runs `count` independent jobs on up to `threads` workers. Results land at
/// their job index, so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

/// Seeds of an ensemble: base, base + 1, ...
std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base, std::size_t count);

// ---------------------------------------------------------------------------
// Commands

struct BitCount {
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  double ber() const { return bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits); }
};

/// Monte Carlo coherent BER of a standard scheme at one Eb/N0.
BitCount baseline_ber_point(Scheme scheme, double ebn0_db, std::size_t symbols, std::uint64_t seed);

std::vector<CurvePoint> cmd_baseline_ber(const ExperimentConfig& cfg);

struct ClusterTrial {
  double ebn0_db = 0.0;
  std::uint64_t seed = 0;
  std::size_t k_selected = 0;
  BitCount count;
};

/// Jump-method clustering receiver on a noisy preamble, scored on a fresh payload.
ClusterTrial cluster_demod_trial(Scheme scheme, double ebn0_db, std::size_t preamble_symbols,
                                 std::size_t payload_symbols, std::size_t max_clusters,
                                 std::size_t kmeans_iterations, std::uint64_t seed);

struct ClusterCurve {
  std::vector<CurvePoint> curve;
  std::vector<double> mean_k;
  std::vector<ClusterTrial> trials;  ///< grid-major, then seed
};

ClusterCurve cmd_cluster_demod(const ExperimentConfig& cfg);
void write_cluster_csv(std::ostream& out, const ClusterCurve& c);
void write_cluster_trials_csv(std::ostream& out, const ClusterCurve& c);

/// Receiver-side reconstruction from `recon_preamble` noisy symbols, then
/// nearest-point demodulation of `symbols` payload symbols. Eb comes from the
/// constellation's mean symbol energy.
BitCount eval_scheme_point(const Constellation& c, double ebn0_db, std::size_t symbols,
                           std::size_t recon_preamble, std::uint64_t seed);

std::vector<CurvePoint> cmd_eval_scheme(const Constellation& c, const ExperimentConfig& cfg);

/// Per-agent training output in the form written to a run directory.
struct TrainArtifacts {
  std::vector<IterationRecord> records;
  std::vector<Constellation> schemes;  ///< one per agent
  std::vector<PolicyState> states;
};

TrainArtifacts run_training(const ExperimentConfig& cfg);

/// out / <hash>-s<seed>
std::filesystem::path run_directory(const std::filesystem::path& out, const ExperimentConfig& cfg);

/// Trains and writes config.resolved, metrics.csv, agentN.dump and agentN.ckpt.
std::filesystem::path cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct SweepRun {
  std::string value;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;
  std::vector<BitCount> counts;  ///< per grid point
};

struct SweepResult {
  std::vector<SweepRun> runs;  ///< value-major, then seed
  std::vector<std::string> values;
  std::vector<std::vector<CurvePoint>> curves;  ///< per value, over successful runs
};

/// Train + eval for every (value, seed). Failures are recorded, not thrown.
SweepResult cmd_sweep(const ExperimentConfig& cfg);
void write_sweep_csv(std::ostream& out, const SweepResult& r, std::string_view parameter);
void write_sweep_runs_csv(std::ostream& out, const SweepResult& r);

// ---------------------------------------------------------------------------
// Learned-scheme analysis

/// Number of groups when points closer than `radius` are chained together.
std::size_t count_clusters(const Constellation& c, double radius);
/// count_clusters with radius 0.1 * sqrt(mean symbol energy).
std::size_t distinguishable_clusters(const Constellation& c);

/// Fraction of points whose nearest neighbour differs in exactly one bit.
double gray_neighbor_fraction(const Constellation& c);

}  // namespace echomod
