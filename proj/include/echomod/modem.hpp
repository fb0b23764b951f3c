#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echomod/simd.hpp"
#include "echomod/types.hpp"

namespace echomod {

enum class Scheme { qpsk, psk8, qam16 };

std::string_view scheme_name(Scheme s);
/// Accepts "qpsk", "8psk"/"psk8", "16qam"/"qam16" (case-insensitive).
Scheme parse_scheme(std::string_view name);
unsigned bits_per_symbol(Scheme s);

/// Total map from the 2^n words of length n to constellation points. The point
/// for a word is stored at index word.value().
class Constellation {
 public:
  Constellation() = default;
  /// points.size() must be 2^n with 1 <= n <= 4.
  explicit Constellation(std::vector<IQSymbol> points);

  unsigned bits_per_symbol() const noexcept { return bits_; }
  std::size_t order() const noexcept { return points_.size(); }
  std::span<const IQSymbol> points() const noexcept { return points_; }
  const IQSymbol& point(BitWord w) const;
  BitWord word(std::size_t index) const { return BitWord(static_cast<unsigned>(index), bits_); }

  friend bool operator==(const Constellation&, const Constellation&) = default;

 private:
  unsigned bits_ = 0;
  std::vector<IQSymbol> points_;
};

/// Gray-labelled QPSK, 8-PSK and 16-QAM with the usual normalizations:
/// QPSK and 8-PSK on the unit circle, 16-QAM on the grid {+-1/sqrt2, +-1/(3 sqrt2)}^2.
Constellation standard_constellation(Scheme s);

std::vector<IQSymbol> modulate(std::span<const BitWord> words, const Constellation& c);

/// Minimum-distance decision; ties resolve to the smallest word value.
BitWord demod_coherent(IQSymbol s, const Constellation& c);

/// Reusable minimum-distance demodulator for bulk work.
class CoherentDemodulator {
 public:
  explicit CoherentDemodulator(const Constellation& c);
  BitWord operator()(IQSymbol s) const;
  unsigned bits_per_symbol() const noexcept { return bits_; }

 private:
  unsigned bits_;
  simd::PointSet points_;
};

double mean_symbol_energy(const Constellation& c);
double mean_symbol_energy(std::span<const IQSymbol> symbols);

/// Eb/N0 in dB for a constellation sent with uniformly distributed words.
double ebn0_db(double n0, const Constellation& c);
/// Inverse of ebn0_db: noise density giving the requested Eb/N0.
double n0_for_ebn0(double ebn0_db, double mean_symbol_energy, unsigned bits_per_symbol);

/// Exact Gray-coded bit error probability over AWGN at the given Eb/N0.
double theoretical_ber(Scheme s, double ebn0_db);

/// Gaussian tail probability Q(x).
double gaussian_q(double x);

// Constellation dump: one "word,i,q" line per point, sorted by word.
void write_dump(std::ostream& out, const Constellation& c);
std::string to_dump(const Constellation& c);
/// Throws ParseError with the offending line number.
Constellation read_dump(std::istream& in);
Constellation parse_dump(std::string_view text);

}  // namespace echomod
