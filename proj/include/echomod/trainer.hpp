#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "echomod/modem.hpp"
#include "echomod/policy.hpp"
#include "echomod/receivers.hpp"

namespace echomod {

struct TrainConfig {
  std::size_t preamble_length = 512;
  double n0 = 0.01;
  unsigned bits_per_symbol = 4;
  std::size_t iterations = 2000;
  std::uint64_t seed = 0;
  std::size_t knn_k = 3;
  TxConfig tx;
};

/// One side of the echo protocol.
struct Agent {
  PolicyState tx;
  TxConfig cfg;
  std::size_t rx_k = 3;
  std::vector<BitWord> preamble;
};

struct IterationRecord {
  std::size_t iteration = 0;
  int agent = 1;                    ///< the agent whose transmitter was updated
  double ber = 0.0;                 ///< preamble bit-error rate seen by that agent
  double mean_symbol_energy = 0.0;  ///< mean energy of the symbols it put on air
  double sigma_re = 0.0;
  double sigma_im = 0.0;
};

struct RunMetrics {
  std::vector<IterationRecord> records;
  Constellation final_constellation;
  PolicyState final_state;
};

/// M words of fair i.i.d. bits.
std::vector<BitWord> generate_preamble(std::size_t length, unsigned bits, std::uint64_t seed);

/// Seed of the policy initialisation for agent 1 or 2.
std::uint64_t agent_init_seed(std::uint64_t run_seed, int agent);

/// Builds an agent with a freshly initialised transmitter.
Agent make_agent(const TrainConfig& cfg, int agent, std::span<const BitWord> preamble);

/// Learned means of an agent, energy-clamped when its transmitter is restricted.
Constellation extract_scheme(const Agent& agent);

/// Transmitter-only training against a fixed coherent receiver.
RunMetrics train_single_agent(const Constellation& fixed_rx, const TrainConfig& cfg);

/// Everything one echo round produced, from a1's point of view.
struct EchoRound {
  Transmission outbound;             ///< a1's preamble transmission
  std::vector<IQSymbol> received_2;  ///< what a2 heard
  std::vector<BitWord> guess;        ///< a2's leave-one-out estimate of the preamble
  Transmission echo;                 ///< a2's 2M symbols: preamble first, then guess
  std::vector<IQSymbol> received_1;  ///< what a1 heard
  std::vector<BitWord> echoed;       ///< a1's decision on the guess half
  std::vector<double> losses;
  std::size_t bit_errors = 0;

  double ber() const;
  std::vector<Experience> experiences(std::span<const BitWord> preamble) const;
};

/// a1 sends the preamble, a2 demodulates and echoes it, a1 scores the echo.
/// Random draws are consumed in protocol order from `rng`.
EchoRound echo_round(const Agent& a1, const Agent& a2, double n0, Rng& rng);

struct EchoResult {
  RunMetrics agent1;
  RunMetrics agent2;
};

/// Echo training: every iteration runs a round with agent 1 as originator and
/// updates it, then the same with the roles swapped.
EchoResult train_echo(const TrainConfig& cfg);

/// Header plus one row per record.
void write_metrics_csv(std::ostream& out, std::span<const IterationRecord> records);

/// Records of both agents interleaved in iteration order.
std::vector<IterationRecord> merged_records(const EchoResult& r);

}  // namespace echomod
