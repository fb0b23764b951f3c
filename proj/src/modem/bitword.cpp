#include <bit>

#include "echomod/types.hpp"

namespace echomod {

BitWord::BitWord(unsigned value, unsigned length) {
  if (length < 1 || length > kMaxBitsPerSymbol) {
    throw InputError("bit word length must be in [1, " + std::to_string(kMaxBitsPerSymbol) +
                     "], got " + std::to_string(length));
  }
  if (value >= (1u << length)) {
    throw InputError("bit word value " + std::to_string(value) + " does not fit in " +
                     std::to_string(length) + " bits");
  }
  length_ = static_cast<std::uint8_t>(length);
  value_ = static_cast<std::uint8_t>(value);
}

BitWord BitWord::parse(std::string_view bits) {
  unsigned v = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') {
      throw InputError("bit word must contain only '0' and '1': '" + std::string(bits) + "'");
    }
    v = (v << 1) | static_cast<unsigned>(ch - '0');
  }
  return BitWord(v, static_cast<unsigned>(bits.size()));
}

std::string BitWord::to_string() const {
  std::string s(length_, '0');
  for (unsigned i = 0; i < length_; ++i) s[i] = bit(i) ? '1' : '0';
  return s;
}

unsigned hamming(BitWord a, BitWord b) {
  if (a.length() != b.length()) {
    throw InputError("hamming: word lengths differ (" + std::to_string(a.length()) + " vs " +
                     std::to_string(b.length()) + ")");
  }
  return static_cast<unsigned>(std::popcount(a.value() ^ b.value()));
}

}  // namespace echomod
