#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "echomod/channel.hpp"
#include "echomod/modem.hpp"
#include "echomod/types.hpp"

namespace echomod {

struct TxConfig {
  double step_size = 0.00245;
  double lambda_p = 0.09;  ///< weight of the symbol-energy penalty
  double initial_log_sigma = -1.0;
  bool restrict_energy = false;
  std::size_t hidden_units = 40;
};

/// Standard deviations never drop below this, keeping log densities finite.
inline constexpr double kSigmaFloor = 1e-9;

/// Flat parameter vector in PolicyState layout.
using ParamVector = std::vector<double>;

/// Stochastic transmitter: a one-hidden-layer ReLU network maps the bipolar
/// encoding of a word to a complex mean, and the transmitted symbol is drawn
/// from independent Gaussians around it with trainable log standard deviations.
///
/// Parameters live in one flat vector laid out as
///   [ W1 (hidden x bits, row-major) | b1 (hidden) | W2 (2 x hidden) | log_sigma (2) ]
/// and the Adam moments share that layout.
class PolicyState {
 public:
  PolicyState() = default;
  /// All-zero weights.
  PolicyState(unsigned bits, std::size_t hidden, double log_sigma = 0.0);

  /// Weights and hidden biases ~ N(0, 0.2^2), output weights ~ N(0, 0.5^2),
  /// both log standard deviations set to cfg.initial_log_sigma.
  static PolicyState initialize(unsigned bits, const TxConfig& cfg, std::uint64_t seed);

  /// A network whose means reproduce `c` exactly: hidden unit w fires only for
  /// word w. Needs hidden >= c.order().
  static PolicyState from_constellation(const Constellation& c, std::size_t hidden,
                                        double log_sigma);

  unsigned bits() const noexcept { return bits_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  std::size_t w1_index(std::size_t h, unsigned b) const { return h * bits_ + b; }
  std::size_t b1_index(std::size_t h) const { return hidden_ * bits_ + h; }
  std::size_t w2_index(int out, std::size_t h) const {
    return hidden_ * (bits_ + 1) + static_cast<std::size_t>(out) * hidden_ + h;
  }
  std::size_t log_sigma_index(int c) const {
    return hidden_ * (bits_ + 3) + static_cast<std::size_t>(c);
  }

  double& w1(std::size_t h, unsigned b) { return params_[w1_index(h, b)]; }
  double& b1(std::size_t h) { return params_[b1_index(h)]; }
  double& w2(int out, std::size_t h) { return params_[w2_index(out, h)]; }
  double& log_sigma(int c) { return params_[log_sigma_index(c)]; }
  double w1(std::size_t h, unsigned b) const { return params_[w1_index(h, b)]; }
  double b1(std::size_t h) const { return params_[b1_index(h)]; }
  double w2(int out, std::size_t h) const { return params_[w2_index(out, h)]; }
  double log_sigma(int c) const { return params_[log_sigma_index(c)]; }

  /// Floored standard deviations {real, imaginary}.
  std::array<double, 2> sigma() const;

  ParamVector adam_m;
  ParamVector adam_v;
  std::uint64_t step_count = 0;

  friend bool operator==(const PolicyState&, const PolicyState&) = default;

 private:
  unsigned bits_ = 0;
  std::size_t hidden_ = 0;
  ParamVector params_;
};

/// mu = W2 * relu(W1 * bipolar(word) + b1)
IQSymbol forward_mean(const PolicyState& state, BitWord word);

/// One draw: i ~ N(Re mu, sigma_re), q ~ N(Im mu, sigma_im).
IQSymbol sample_symbol(const PolicyState& state, BitWord word, Rng& rng);

/// With restricted energy the transmitted symbol is y = scale * x where x is
/// the draw above and scale = 1/sqrt(E_max) if the largest mean energy E_max
/// exceeds 1. The density of y is then N(scale * mu, scale * sigma), and scale
/// itself depends on the parameters through the loudest mean.

/// log of the density of the transmitted symbol `y` given `word`.
double log_prob(const PolicyState& state, BitWord word, IQSymbol y, bool restrict_energy = false);

/// Gradient of log_prob with respect to every parameter.
ParamVector log_prob_grad(const PolicyState& state, BitWord word, IQSymbol y,
                          bool restrict_energy = false);

/// Per-symbol loss: bit errors of the echo plus lambda_p times the energy of
/// the transmitted symbol.
double symbol_loss(BitWord word, BitWord echoed, IQSymbol tx_symbol, double lambda_p);

/// One transmitted symbol's training record.
struct Experience {
  BitWord word;
  IQSymbol symbol;  ///< what went on air
  double loss = 0.0;
};

/// Score-function estimate of the reward gradient with reward = -loss:
///   -(1/N) sum_i loss_i * grad log p(symbol_i | word_i).
/// No baseline is subtracted.
ParamVector reward_gradient(const PolicyState& state, std::span<const Experience> batch,
                            bool restrict_energy = false);

/// Adam ascent on reward_gradient(batch) (beta1 0.9, beta2 0.999, eps 1e-8).
/// Throws NumericError if the estimate is not finite.
void policy_gradient_step(PolicyState& state, std::span<const Experience> batch,
                          const TxConfig& cfg);

/// Unscaled means for all 2^n words.
Constellation extract_means(const PolicyState& state);

/// 1/sqrt(E_max) when the largest mean energy E_max exceeds 1, otherwise 1.
double energy_scale(const PolicyState& state);

/// Scales all points by 1/sqrt(E_max) when the largest point energy E_max exceeds 1.
Constellation clamp_energy(const Constellation& c);

/// Means after the hard energy constraint: every amplitude multiplied by energy_scale().
Constellation restricted_means(const PolicyState& state);

struct Transmission {
  std::vector<IQSymbol> samples;  ///< raw policy draws
  std::vector<IQSymbol> symbols;  ///< what goes on air (scaled when restricted)
  double scale = 1.0;
};

/// Draws one symbol per word; with `restrict_energy` all draws are multiplied
/// by energy_scale(state).
Transmission transmit(const PolicyState& state, std::span<const BitWord> words,
                      bool restrict_energy, Rng& rng);

// Checkpoints: versioned text, one "name rows cols values..." line per block.
void write_checkpoint(std::ostream& out, const PolicyState& state);
PolicyState read_checkpoint(std::istream& in);

}  // namespace echomod
