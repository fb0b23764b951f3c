#pragma once

#include <cmath>
#include <vector>

#include "echomod/channel.hpp"
#include "echomod/types.hpp"

namespace testing {

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

inline std::vector<echomod::IQSymbol> random_points(std::size_t n, echomod::Rng& rng,
                                                    double spread = 1.0) {
  std::vector<echomod::IQSymbol> out(n);
  for (auto& p : out) p = {spread * rng.normal(), spread * rng.normal()};
  return out;
}

inline std::vector<echomod::BitWord> random_words(std::size_t n, unsigned bits, echomod::Rng& rng) {
  std::vector<echomod::BitWord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(static_cast<unsigned>(rng.below(1u << bits)), bits);
  }
  return out;
}

}  // namespace testing
