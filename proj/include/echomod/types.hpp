#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace echomod {

/// Complex baseband sample: real part is the in-phase amplitude, imaginary
/// part the quadrature amplitude. Amplitudes are dimensionless.
using IQSymbol = std::complex<double>;

inline double energy(IQSymbol s) { return std::norm(s); }

inline constexpr unsigned kMaxBitsPerSymbol = 4;

/// Malformed arguments (length mismatch, out-of-range parameters).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values produced during optimization.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text input that does not match its format; carries a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A word of n bits (1 <= n <= 4). Bit position 0 is the leftmost bit, which is
/// also the most significant bit of value().
class BitWord {
 public:
  constexpr BitWord() = default;
  BitWord(unsigned value, unsigned length);

  /// Parses a string of '0'/'1' characters.
  static BitWord parse(std::string_view bits);

  unsigned value() const noexcept { return value_; }
  unsigned length() const noexcept { return length_; }

  int bit(unsigned pos) const {
    return static_cast<int>((value_ >> (length_ - 1 - pos)) & 1u);
  }
  /// 0 -> -1, 1 -> +1
  double bipolar(unsigned pos) const { return bit(pos) ? 1.0 : -1.0; }

  std::string to_string() const;

  friend bool operator==(const BitWord&, const BitWord&) = default;
  friend auto operator<=>(const BitWord&, const BitWord&) = default;

 private:
  std::uint8_t length_ = 0;
  std::uint8_t value_ = 0;
};

/// Number of differing bit positions.
unsigned hamming(BitWord a, BitWord b);

}  // namespace echomod
