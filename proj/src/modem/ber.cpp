#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include "echomod/modem.hpp"

namespace echomod {
namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Density of the received phase for a point at phase 0 with amplitude a,
// in units of the per-component noise standard deviation.
double phase_density(double phi, double a) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return std::exp(-0.5 * a * a) / (2.0 * std::numbers::pi) +
         a * c * inv_sqrt_2pi * std::exp(-0.5 * a * a * s * s) * standard_normal_cdf(a * c);
}

double integrate_simpson(double lo, double hi, double a, int intervals) {
  const double h = (hi - lo) / intervals;
  double sum = phase_density(lo, a) + phase_density(hi, a);
  for (int i = 1; i < intervals; ++i) {
    sum += phase_density(lo + i * h, a) * ((i % 2) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

double psk8_ber(double ebn0_linear) {
  const Constellation c = standard_constellation(Scheme::psk8);
  // Word sitting at each 45-degree sector, counter-clockwise from phase 0.
  std::array<unsigned, 8> word_at{};
  for (unsigned w = 0; w < 8; ++w) {
    const double ang = std::atan2(c.points()[w].imag(), c.points()[w].real());
    int k = static_cast<int>(std::lround(ang / (std::numbers::pi / 4)));
    word_at[static_cast<unsigned>((k + 8) % 8)] = w;
  }
  const double es_n0 = 3.0 * ebn0_linear;
  const double amplitude = std::sqrt(2.0 * es_n0);
  const double half = std::numbers::pi / 8;
  double ber = 0.0;
  for (int d = 1; d < 8; ++d) {
    const double centre = d * std::numbers::pi / 4;
    const double p = integrate_simpson(centre - half, centre + half, amplitude, 4096);
    double bits = 0.0;
    for (unsigned t = 0; t < 8; ++t) {
      bits += std::popcount(word_at[t] ^ word_at[(t + static_cast<unsigned>(d)) % 8]);
    }
    ber += p * bits / 8.0;
  }
  return ber / 3.0;
}

}  // namespace

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double theoretical_ber(Scheme s, double ebn0) {
  const double g = std::pow(10.0, ebn0 / 10.0);
  switch (s) {
    case Scheme::qpsk:
      return gaussian_q(std::sqrt(2.0 * g));
    case Scheme::psk8:
      return psk8_ber(g);
    case Scheme::qam16: {
      // Gray 4-PAM on each axis: distance to threshold sqrt(4/5 * Eb/N0) in sigma units.
      const double x = std::sqrt(0.8 * g);
      return 0.25 * (3.0 * gaussian_q(x) + 2.0 * gaussian_q(3.0 * x) - gaussian_q(5.0 * x));
    }
  }
  throw InputError("theoretical_ber: unknown scheme");
}

}  // namespace echomod
