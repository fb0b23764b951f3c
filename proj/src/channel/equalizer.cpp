#include <algorithm>
#include <cmath>
#include <string>

#include "echomod/channel.hpp"

namespace echomod {

DivergenceError::DivergenceError(std::size_t step, double magnitude)
    : NumericError("LMS equalizer diverged at step " + std::to_string(step) +
                   " (|e| = " + std::to_string(magnitude) + ")"),
      step_(step) {}

std::vector<IQSymbol> fir_apply(std::span<const IQSymbol> symbols, const MultipathSpec& mp) {
  if (mp.taps.empty()) throw InputError("fir_apply: channel needs at least one tap");
  std::vector<IQSymbol> out(symbols.size());
  for (std::size_t m = 0; m < symbols.size(); ++m) {
    IQSymbol acc{};
    const std::size_t span = std::min(mp.taps.size(), m + 1);
    for (std::size_t k = 0; k < span; ++k) acc += mp.taps[k] * symbols[m - k];
    out[m] = acc;
  }
  return out;
}

LmsResult lms_train(std::span<const IQSymbol> corrupted, std::span<const IQSymbol> reference,
                    std::size_t num_taps, double step_size) {
  if (corrupted.size() != reference.size()) {
    throw InputError("lms_train: corrupted and reference lengths differ");
  }
  if (num_taps < 1) throw InputError("lms_train: need at least one tap");
  if (!(step_size >= 0.0)) throw InputError("lms_train: step size must be non-negative");

  LmsResult res;
  res.state.weights.assign(num_taps, {0.0, 0.0});
  res.state.step_size = step_size;
  res.error_energy.reserve(corrupted.size());
  auto& w = res.state.weights;

  for (std::size_t m = 0; m < corrupted.size(); ++m) {
    const std::size_t span = std::min(num_taps, m + 1);
    IQSymbol y{};
    for (std::size_t k = 0; k < span; ++k) y += w[k] * corrupted[m - k];
    const IQSymbol e = y - reference[m];
    const double mag = std::abs(e);
    if (!(mag <= 1e6)) throw DivergenceError(m, mag);
    res.error_energy.push_back(std::norm(e));
    for (std::size_t k = 0; k < span; ++k) w[k] -= step_size * e * std::conj(corrupted[m - k]);
  }
  return res;
}

}  // namespace echomod
