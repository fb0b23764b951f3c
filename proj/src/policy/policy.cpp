#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "echomod/policy.hpp"

namespace echomod {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct Activations {
  std::vector<double> pre;  // W1 x + b1
  IQSymbol mu;
};

Activations forward(const PolicyState& s, BitWord word) {
  if (word.length() != s.bits()) {
    throw InputError("policy expects " + std::to_string(s.bits()) + "-bit words, got " +
                     std::to_string(word.length()));
  }
  Activations a;
  a.pre.resize(s.hidden());
  double re = 0.0;
  double im = 0.0;
  for (std::size_t h = 0; h < s.hidden(); ++h) {
    double z = s.b1(h);
    for (unsigned b = 0; b < s.bits(); ++b) z += s.w1(h, b) * word.bipolar(b);
    a.pre[h] = z;
    const double r = z > 0.0 ? z : 0.0;
    re += s.w2(0, h) * r;
    im += s.w2(1, h) * r;
  }
  a.mu = {re, im};
  return a;
}

// grad += scale * d(mu)/d(theta)^T * dmu, for the network parameters only.
void backprop_mean(const PolicyState& s, BitWord word, const Activations& a, double dmu_re,
                   double dmu_im, ParamVector& grad) {
  for (std::size_t h = 0; h < s.hidden(); ++h) {
    const double z = a.pre[h];
    if (!(z > 0.0)) continue;
    grad[s.w2_index(0, h)] += dmu_re * z;
    grad[s.w2_index(1, h)] += dmu_im * z;
    const double dz = s.w2(0, h) * dmu_re + s.w2(1, h) * dmu_im;
    grad[s.b1_index(h)] += dz;
    for (unsigned b = 0; b < s.bits(); ++b) grad[s.w1_index(h, b)] += dz * word.bipolar(b);
  }
}

}  // namespace

PolicyState::PolicyState(unsigned bits, std::size_t hidden, double log_sigma)
    : bits_(bits), hidden_(hidden) {
  if (bits < 1 || bits > kMaxBitsPerSymbol) throw InputError("policy: bits must be in [1, 4]");
  if (hidden < 1) throw InputError("policy: need at least one hidden unit");
  params_.assign(hidden * (bits + 3) + 2, 0.0);
  params_[log_sigma_index(0)] = log_sigma;
  params_[log_sigma_index(1)] = log_sigma;
  adam_m.assign(params_.size(), 0.0);
  adam_v.assign(params_.size(), 0.0);
}

PolicyState PolicyState::initialize(unsigned bits, const TxConfig& cfg, std::uint64_t seed) {
  PolicyState s(bits, cfg.hidden_units, cfg.initial_log_sigma);
  Rng rng(seed);
  for (std::size_t h = 0; h < s.hidden_; ++h) {
    for (unsigned b = 0; b < bits; ++b) s.w1(h, b) = 0.2 * rng.normal();
  }
  for (std::size_t h = 0; h < s.hidden_; ++h) s.b1(h) = 0.2 * rng.normal();
  for (int c = 0; c < 2; ++c) {
    for (std::size_t h = 0; h < s.hidden_; ++h) s.w2(c, h) = 0.5 * rng.normal();
  }
  return s;
}

PolicyState PolicyState::from_constellation(const Constellation& c, std::size_t hidden,
                                            double log_sigma) {
  if (hidden < c.order()) {
    throw InputError("from_constellation: need at least " + std::to_string(c.order()) +
                     " hidden units");
  }
  const unsigned bits = c.bits_per_symbol();
  PolicyState s(bits, hidden, log_sigma);
  // Unit w computes bipolar(w).x - (n - 1): 1 for word w, <= -1 for any other.
  for (std::size_t w = 0; w < c.order(); ++w) {
    const BitWord word = c.word(w);
    for (unsigned b = 0; b < bits; ++b) s.w1(w, b) = word.bipolar(b);
    s.b1(w) = -static_cast<double>(bits - 1);
    s.w2(0, w) = c.points()[w].real();
    s.w2(1, w) = c.points()[w].imag();
  }
  return s;
}

std::array<double, 2> PolicyState::sigma() const {
  return {std::max(std::exp(log_sigma(0)), kSigmaFloor),
          std::max(std::exp(log_sigma(1)), kSigmaFloor)};
}

IQSymbol forward_mean(const PolicyState& state, BitWord word) {
  return forward(state, word).mu;
}

namespace {

// Energy clamp seen from one state: y = scale * x with scale = 1/sqrt(E_max)
// when the loudest mean (word `loudest`) has E_max > 1.
struct Clamp {
  double scale = 1.0;
  double e_max = 0.0;
  unsigned loudest = 0;
  bool active = false;
};

Clamp clamp_of(const PolicyState& s, bool restrict_energy) {
  Clamp c;
  if (!restrict_energy) return c;
  const unsigned words = 1u << s.bits();
  for (unsigned w = 0; w < words; ++w) {
    const double e = energy(forward_mean(s, BitWord(w, s.bits())));
    if (e > c.e_max) {
      c.e_max = e;
      c.loudest = w;
    }
  }
  c.active = c.e_max > 1.0;
  if (c.active) c.scale = 1.0 / std::sqrt(c.e_max);
  return c;
}

// d(log scale)/d(mu_loudest) = -mu_loudest / E_max; pushes `coef` through it.
void backprop_scale(const PolicyState& s, const Clamp& c, double coef, ParamVector& grad) {
  if (!c.active || coef == 0.0) return;
  const BitWord w(c.loudest, s.bits());
  const Activations a = forward(s, w);
  const double k = -coef / c.e_max;
  backprop_mean(s, w, a, k * a.mu.real(), k * a.mu.imag(), grad);
}

}  // namespace

IQSymbol sample_symbol(const PolicyState& state, BitWord word, Rng& rng) {
  const IQSymbol mu = forward_mean(state, word);
  const auto sig = state.sigma();
  const double ni = rng.normal();
  const double nq = rng.normal();
  return {mu.real() + sig[0] * ni, mu.imag() + sig[1] * nq};
}

double log_prob(const PolicyState& state, BitWord word, IQSymbol y, bool restrict_energy) {
  const Clamp c = clamp_of(state, restrict_energy);
  const IQSymbol mu = forward_mean(state, word);
  const auto sig = state.sigma();
  const double zr = (y.real() / c.scale - mu.real()) / sig[0];
  const double zi = (y.imag() / c.scale - mu.imag()) / sig[1];
  return -0.5 * (zr * zr + zi * zi) - std::log(c.scale * sig[0]) - std::log(c.scale * sig[1]) -
         std::log(2.0 * std::numbers::pi);
}

ParamVector log_prob_grad(const PolicyState& state, BitWord word, IQSymbol y,
                          bool restrict_energy) {
  const Clamp c = clamp_of(state, restrict_energy);
  const Activations a = forward(state, word);
  const auto sig = state.sigma();
  const double xr = y.real() / c.scale;
  const double xi = y.imag() / c.scale;
  const double zr = (xr - a.mu.real()) / sig[0];
  const double zi = (xi - a.mu.imag()) / sig[1];
  ParamVector g(state.parameter_count(), 0.0);
  backprop_mean(state, word, a, zr / sig[0], zi / sig[1], g);
  g[state.log_sigma_index(0)] = zr * zr - 1.0;
  g[state.log_sigma_index(1)] = zi * zi - 1.0;
  backprop_scale(state, c, zr * xr / sig[0] + zi * xi / sig[1] - 2.0, g);
  return g;
}

double symbol_loss(BitWord word, BitWord echoed, IQSymbol tx_symbol, double lambda_p) {
  return static_cast<double>(hamming(word, echoed)) + lambda_p * energy(tx_symbol);
}

ParamVector reward_gradient(const PolicyState& state, std::span<const Experience> batch,
                            bool restrict_energy) {
  if (batch.empty()) throw InputError("reward_gradient: empty batch");
  const std::size_t words = std::size_t{1} << state.bits();
  const Clamp c = clamp_of(state, restrict_energy);
  const auto sig = state.sigma();

  // The score is linear in the standardized residual, so loss-weighted
  // residuals can be summed per word and pushed through the network once.
  std::vector<Activations> act(words);
  std::vector<bool> seen(words, false);
  std::vector<double> dmu_r(words, 0.0);
  std::vector<double> dmu_i(words, 0.0);
  ParamVector g(state.parameter_count(), 0.0);
  double dls_r = 0.0;
  double dls_i = 0.0;
  double dscale = 0.0;
  for (const auto& e : batch) {
    const unsigned w = e.word.value();
    if (!seen[w]) {
      act[w] = forward(state, e.word);
      seen[w] = true;
    }
    const double xr = e.symbol.real() / c.scale;
    const double xi = e.symbol.imag() / c.scale;
    const double zr = (xr - act[w].mu.real()) / sig[0];
    const double zi = (xi - act[w].mu.imag()) / sig[1];
    dmu_r[w] += e.loss * zr / sig[0];
    dmu_i[w] += e.loss * zi / sig[1];
    dls_r += e.loss * (zr * zr - 1.0);
    dls_i += e.loss * (zi * zi - 1.0);
    if (c.active) dscale += e.loss * (zr * xr / sig[0] + zi * xi / sig[1] - 2.0);
  }
  for (unsigned w = 0; w < words; ++w) {
    if (seen[w]) backprop_mean(state, BitWord(w, state.bits()), act[w], dmu_r[w], dmu_i[w], g);
  }
  g[state.log_sigma_index(0)] += dls_r;
  g[state.log_sigma_index(1)] += dls_i;
  backprop_scale(state, c, dscale, g);
  const double scale = -1.0 / static_cast<double>(batch.size());
  for (auto& v : g) v *= scale;
  return g;
}

void policy_gradient_step(PolicyState& state, std::span<const Experience> batch,
                          const TxConfig& cfg) {
  const ParamVector g = reward_gradient(state, batch, cfg.restrict_energy);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      std::ostringstream msg;
      msg << "non-finite policy gradient at parameter " << i << " (step " << state.step_count
          << ", sigma = " << state.sigma()[0] << "/" << state.sigma()[1] << ")";
      throw NumericError(msg.str());
    }
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(kBeta1, t);
  const double c2 = 1.0 - std::pow(kBeta2, t);
  auto params = state.params();
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.adam_m[i] = kBeta1 * state.adam_m[i] + (1.0 - kBeta1) * g[i];
    state.adam_v[i] = kBeta2 * state.adam_v[i] + (1.0 - kBeta2) * g[i] * g[i];
    const double m_hat = state.adam_m[i] / c1;
    const double v_hat = state.adam_v[i] / c2;
    params[i] += cfg.step_size * m_hat / (std::sqrt(v_hat) + kAdamEps);
  }
}

Constellation extract_means(const PolicyState& state) {
  const std::size_t words = std::size_t{1} << state.bits();
  std::vector<IQSymbol> pts(words);
  for (std::size_t w = 0; w < words; ++w) {
    pts[w] = forward_mean(state, BitWord(static_cast<unsigned>(w), state.bits()));
  }
  return Constellation(std::move(pts));
}

namespace {

double scale_for(const Constellation& means) {
  double e_max = 0.0;
  for (const auto& p : means.points()) e_max = std::max(e_max, energy(p));
  return e_max > 1.0 ? 1.0 / std::sqrt(e_max) : 1.0;
}

}  // namespace

double energy_scale(const PolicyState& state) { return scale_for(extract_means(state)); }

Constellation clamp_energy(const Constellation& c) {
  const double scale = scale_for(c);
  if (scale == 1.0) return c;
  std::vector<IQSymbol> pts(c.points().begin(), c.points().end());
  for (auto& p : pts) p *= scale;
  return Constellation(std::move(pts));
}

Constellation restricted_means(const PolicyState& state) {
  return clamp_energy(extract_means(state));
}

Transmission transmit(const PolicyState& state, std::span<const BitWord> words,
                      bool restrict_energy, Rng& rng) {
  Transmission tx;
  tx.samples.reserve(words.size());
  const Constellation means = extract_means(state);
  const auto sig = state.sigma();
  for (const auto& w : words) {
    const IQSymbol mu = means.point(w);
    const double ni = rng.normal();
    const double nq = rng.normal();
    tx.samples.emplace_back(mu.real() + sig[0] * ni, mu.imag() + sig[1] * nq);
  }
  tx.scale = restrict_energy ? scale_for(means) : 1.0;
  tx.symbols = tx.samples;
  if (tx.scale != 1.0) {
    for (auto& s : tx.symbols) s *= tx.scale;
  }
  return tx;
}

}  // namespace echomod
