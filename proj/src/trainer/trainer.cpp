#include <algorithm>

#include "echomod/trainer.hpp"

namespace echomod {
namespace {

enum StreamTag : std::uint64_t { kPreamble = 1, kInit = 2, kSingle = 3, kEcho = 4 };

void check(const TrainConfig& cfg) {
  if (cfg.bits_per_symbol < 1 || cfg.bits_per_symbol > kMaxBitsPerSymbol) {
    throw InputError("bits_per_symbol must be in [1, 4]");
  }
  if (cfg.preamble_length < 1) throw InputError("preamble_length must be at least 1");
  if (cfg.n0 < 0.0) throw InputError("n0 must be non-negative");
}

IterationRecord record(std::size_t it, int agent, double ber, const Transmission& tx,
                       const PolicyState& state) {
  const auto sig = state.sigma();
  return {it, agent, ber, mean_symbol_energy(tx.symbols), sig[0], sig[1]};
}

}  // namespace

std::vector<BitWord> generate_preamble(std::size_t length, unsigned bits, std::uint64_t seed) {
  if (length < 1) throw InputError("generate_preamble: length must be at least 1");
  Rng rng(seed);
  std::vector<BitWord> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    unsigned v = 0;
    for (unsigned b = 0; b < bits; ++b) v = (v << 1) | (rng.bit() ? 1u : 0u);
    out.emplace_back(v, bits);
  }
  return out;
}

std::uint64_t agent_init_seed(std::uint64_t run_seed, int agent) {
  return derive_seed(run_seed, {kInit, static_cast<std::uint64_t>(agent)});
}

Agent make_agent(const TrainConfig& cfg, int agent, std::span<const BitWord> preamble) {
  Agent a;
  a.tx = PolicyState::initialize(cfg.bits_per_symbol, cfg.tx, agent_init_seed(cfg.seed, agent));
  a.cfg = cfg.tx;
  a.rx_k = cfg.knn_k;
  a.preamble.assign(preamble.begin(), preamble.end());
  return a;
}

Constellation extract_scheme(const Agent& agent) {
  return agent.cfg.restrict_energy ? restricted_means(agent.tx) : extract_means(agent.tx);
}

RunMetrics train_single_agent(const Constellation& fixed_rx, const TrainConfig& cfg) {
  check(cfg);
  if (fixed_rx.bits_per_symbol() != cfg.bits_per_symbol) {
    throw InputError("train_single_agent: receiver order does not match bits_per_symbol");
  }
  const auto preamble =
      generate_preamble(cfg.preamble_length, cfg.bits_per_symbol, derive_seed(cfg.seed, {kPreamble}));
  Agent agent = make_agent(cfg, 1, preamble);
  const CoherentDemodulator demod(fixed_rx);

  RunMetrics m;
  std::vector<Experience> batch(preamble.size());
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    Rng rng(derive_seed(cfg.seed, {kSingle, it}));
    const Transmission tx = transmit(agent.tx, preamble, agent.cfg.restrict_energy, rng);
    std::vector<IQSymbol> rx = tx.symbols;
    awgn_apply_inplace(rx, cfg.n0, rng);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < preamble.size(); ++i) {
      const BitWord got = demod(rx[i]);
      errors += hamming(preamble[i], got);
      batch[i] = {preamble[i], tx.symbols[i],
                  symbol_loss(preamble[i], got, tx.symbols[i], agent.cfg.lambda_p)};
    }
    const double ber =
        static_cast<double>(errors) / static_cast<double>(preamble.size() * cfg.bits_per_symbol);
    m.records.push_back(record(it, 1, ber, tx, agent.tx));
    policy_gradient_step(agent.tx, batch, agent.cfg);
  }
  m.final_constellation = extract_scheme(agent);
  m.final_state = agent.tx;
  return m;
}

double EchoRound::ber() const {
  if (echoed.empty()) return 0.0;
  return static_cast<double>(bit_errors) /
         static_cast<double>(echoed.size() * echoed.front().length());
}

std::vector<Experience> EchoRound::experiences(std::span<const BitWord> preamble) const {
  std::vector<Experience> out(preamble.size());
  for (std::size_t i = 0; i < preamble.size(); ++i) {
    out[i] = {preamble[i], outbound.symbols[i], losses[i]};
  }
  return out;
}

EchoRound echo_round(const Agent& a1, const Agent& a2, double n0, Rng& rng) {
  const auto& b = a1.preamble;
  if (a2.preamble != b) throw InputError("echo_round: agents do not share the preamble");
  const std::size_t m = b.size();
  EchoRound r;

  r.outbound = transmit(a1.tx, b, a1.cfg.restrict_energy, rng);
  r.received_2 = r.outbound.symbols;
  awgn_apply_inplace(r.received_2, n0, rng);

  r.guess = knn_demod_loo(r.received_2, b, a2.rx_k);

  std::vector<BitWord> words(b);
  words.insert(words.end(), r.guess.begin(), r.guess.end());
  r.echo = transmit(a2.tx, words, a2.cfg.restrict_energy, rng);
  r.received_1 = r.echo.symbols;
  awgn_apply_inplace(r.received_1, n0, rng);

  const std::span<const IQSymbol> heard(r.received_1);
  const KnnReference ref(heard.first(m), b, a1.rx_k);
  r.echoed.reserve(m);
  r.losses.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const BitWord got = knn_demod(heard[m + i], ref);
    r.echoed.push_back(got);
    r.bit_errors += hamming(b[i], got);
    r.losses.push_back(symbol_loss(b[i], got, r.outbound.symbols[i], a1.cfg.lambda_p));
  }
  return r;
}

EchoResult train_echo(const TrainConfig& cfg) {
  check(cfg);
  const auto preamble =
      generate_preamble(cfg.preamble_length, cfg.bits_per_symbol, derive_seed(cfg.seed, {kPreamble}));
  Agent agents[2] = {make_agent(cfg, 1, preamble), make_agent(cfg, 2, preamble)};
  EchoResult out;
  RunMetrics* metrics[2] = {&out.agent1, &out.agent2};

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t me = 0; me < 2; ++me) {
      Agent& tx = agents[me];
      Rng rng(derive_seed(cfg.seed, {kEcho, it, me}));
      const EchoRound r = echo_round(tx, agents[1 - me], cfg.n0, rng);
      metrics[me]->records.push_back(record(it, static_cast<int>(me) + 1, r.ber(), r.outbound, tx.tx));
      policy_gradient_step(tx.tx, r.experiences(preamble), tx.cfg);
    }
  }
  for (std::size_t a = 0; a < 2; ++a) {
    metrics[a]->final_constellation = extract_scheme(agents[a]);
    metrics[a]->final_state = agents[a].tx;
  }
  return out;
}

std::vector<IterationRecord> merged_records(const EchoResult& r) {
  std::vector<IterationRecord> all(r.agent1.records);
  all.insert(all.end(), r.agent2.records.begin(), r.agent2.records.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.iteration < y.iteration || (x.iteration == y.iteration && x.agent < y.agent);
  });
  return all;
}

}  // namespace echomod
