#include <cmath>

#include "echomod/channel.hpp"

namespace echomod {

void awgn_apply_inplace(std::span<IQSymbol> symbols, double n0, Rng& rng) {
  if (!(n0 >= 0.0)) throw InputError("awgn: noise density must be non-negative");
  if (n0 == 0.0) return;
  const double sigma = std::sqrt(n0 / 2.0);
  for (auto& s : symbols) {
    const double ni = rng.normal();
    const double nq = rng.normal();
    s += IQSymbol{sigma * ni, sigma * nq};
  }
}

std::vector<IQSymbol> awgn_apply(std::span<const IQSymbol> symbols, const ChannelSpec& spec) {
  std::vector<IQSymbol> out(symbols.begin(), symbols.end());
  Rng rng(spec.seed);
  awgn_apply_inplace(out, spec.n0, rng);
  return out;
}

}  // namespace echomod
