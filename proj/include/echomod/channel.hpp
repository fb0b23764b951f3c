#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "echomod/types.hpp"

namespace echomod {

/// Deterministic generator used for every random draw in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform and Gaussian variates are derived here rather than via
/// <random> distributions (whose algorithms are implementation-defined), so a
/// given seed produces the same stream with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Standard normal via the Marsaglia polar method.
  double normal();
  bool bit() { return (engine_() >> 63) != 0; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream seed from a base seed and a tag path
/// (e.g. {iteration, direction}) with the SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

struct ChannelSpec {
  double n0 = 0.0;          ///< noise power density; per-component variance n0/2
  std::uint64_t seed = 0;
};

/// Adds circular complex Gaussian noise CN(0, n0). Noise for position p is the
/// p-th (I, Q) pair drawn from Rng(spec.seed).
std::vector<IQSymbol> awgn_apply(std::span<const IQSymbol> symbols, const ChannelSpec& spec);
/// Same channel drawing from an existing stream.
void awgn_apply_inplace(std::span<IQSymbol> symbols, double n0, Rng& rng);

struct MultipathSpec {
  std::vector<std::complex<double>> taps;
};

/// Causal convolution with zero prehistory, truncated to the input length.
std::vector<IQSymbol> fir_apply(std::span<const IQSymbol> symbols, const MultipathSpec& mp);

struct EqualizerState {
  std::vector<std::complex<double>> weights;
  double step_size = 0.0;
};

struct LmsResult {
  EqualizerState state;
  std::vector<double> error_energy;  ///< |e[m]|^2 before the update at step m
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(std::size_t step, double magnitude);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// One pass of per-sample complex LMS from all-zero weights:
///   y[m] = sum_k w_k x[m-k],  e[m] = y[m] - ref[m],  w_k -= step * e[m] * conj(x[m-k]).
/// Converges in the mean for 0 < step < 2 / (num_taps * E|x|^2).
/// Throws DivergenceError when |e| exceeds 1e6.
LmsResult lms_train(std::span<const IQSymbol> corrupted, std::span<const IQSymbol> reference,
                    std::size_t num_taps, double step_size);

}  // namespace echomod
