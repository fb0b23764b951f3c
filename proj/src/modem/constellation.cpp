#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>

#include "echomod/modem.hpp"

namespace echomod {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::qpsk:
      return "qpsk";
    case Scheme::psk8:
      return "8psk";
    case Scheme::qam16:
      return "16qam";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "qpsk") return Scheme::qpsk;
  if (lower == "8psk" || lower == "psk8" || lower == "8-psk") return Scheme::psk8;
  if (lower == "16qam" || lower == "qam16" || lower == "16-qam") return Scheme::qam16;
  throw InputError("unknown modulation scheme '" + std::string(name) +
                   "' (expected qpsk, 8psk or 16qam)");
}

unsigned bits_per_symbol(Scheme s) {
  switch (s) {
    case Scheme::qpsk:
      return 2;
    case Scheme::psk8:
      return 3;
    case Scheme::qam16:
      return 4;
  }
  return 0;
}

Constellation::Constellation(std::vector<IQSymbol> points) : points_(std::move(points)) {
  const std::size_t m = points_.size();
  if (m < 2 || !std::has_single_bit(m) || m > (std::size_t{1} << kMaxBitsPerSymbol)) {
    throw InputError("constellation order must be a power of two in [2, 16], got " +
                     std::to_string(m));
  }
  bits_ = static_cast<unsigned>(std::countr_zero(m));
}

const IQSymbol& Constellation::point(BitWord w) const {
  if (w.length() != bits_) {
    throw InputError("word length " + std::to_string(w.length()) +
                     " does not match constellation (" + std::to_string(bits_) + " bits)");
  }
  return points_[w.value()];
}

Constellation standard_constellation(Scheme s) {
  using std::numbers::sqrt2;
  const double a = 1.0 / sqrt2;
  switch (s) {
    case Scheme::qpsk: {
      // First bit selects the quadrature sign, second the in-phase sign.
      std::vector<IQSymbol> pts(4);
      for (unsigned w = 0; w < 4; ++w) {
        pts[w] = {(w & 1u) ? a : -a, (w & 2u) ? a : -a};
      }
      return Constellation(std::move(pts));
    }
    case Scheme::psk8: {
      // Phase of words 000..111 in multiples of 45 degrees.
      constexpr std::array<int, 8> octant = {5, 4, 2, 3, 6, 7, 1, 0};
      const std::array<IQSymbol, 8> ring = {IQSymbol{1.0, 0.0}, {a, a},   {0.0, 1.0},
                                            {-a, a},           {-1.0, 0.0}, {-a, -a},
                                            {0.0, -1.0},       {a, -a}};
      std::vector<IQSymbol> pts(8);
      for (unsigned w = 0; w < 8; ++w) pts[w] = ring[octant[w]];
      return Constellation(std::move(pts));
    }
    case Scheme::qam16: {
      // Gray-coded 4-PAM per axis; first bit pair drives I, second pair Q.
      const double b = 1.0 / (3.0 * sqrt2);
      constexpr std::array<int, 4> in_phase = {-3, -1, 3, 1};    // 00,01,10,11
      constexpr std::array<int, 4> quadrature = {3, 1, -3, -1};  // 00,01,10,11
      auto level = [&](int l) { return l == 3 ? a : l == 1 ? b : l == -1 ? -b : -a; };
      std::vector<IQSymbol> pts(16);
      for (unsigned w = 0; w < 16; ++w) {
        pts[w] = {level(in_phase[w >> 2]), level(quadrature[w & 3u])};
      }
      return Constellation(std::move(pts));
    }
  }
  throw InputError("unknown scheme");
}

std::vector<IQSymbol> modulate(std::span<const BitWord> words, const Constellation& c) {
  std::vector<IQSymbol> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(c.point(w));
  return out;
}

CoherentDemodulator::CoherentDemodulator(const Constellation& c)
    : bits_(c.bits_per_symbol()), points_(c.points()) {}

BitWord CoherentDemodulator::operator()(IQSymbol s) const {
  return BitWord(static_cast<unsigned>(simd::nearest(points_, s)), bits_);
}

BitWord demod_coherent(IQSymbol s, const Constellation& c) {
  return CoherentDemodulator(c)(s);
}

double mean_symbol_energy(std::span<const IQSymbol> symbols) {
  if (symbols.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : symbols) sum += energy(s);
  return sum / static_cast<double>(symbols.size());
}

double mean_symbol_energy(const Constellation& c) { return mean_symbol_energy(c.points()); }

double ebn0_db(double n0, const Constellation& c) {
  if (!(n0 > 0.0)) throw InputError("ebn0_db: noise density must be positive");
  const double eb = mean_symbol_energy(c) / c.bits_per_symbol();
  return 10.0 * std::log10(eb / n0);
}

double n0_for_ebn0(double ebn0, double es, unsigned bits) {
  if (bits == 0) throw InputError("n0_for_ebn0: bits per symbol must be positive");
  return (es / bits) / std::pow(10.0, ebn0 / 10.0);
}

}  // namespace echomod
