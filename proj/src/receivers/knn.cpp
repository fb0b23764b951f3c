#include <array>
#include <limits>

#include "echomod/receivers.hpp"

namespace echomod {
namespace {

inline constexpr std::size_t kMaxNeighbors = 15;

// Indices of the k smallest distances, ordered by (distance, index).
struct Neighbors {
  std::array<double, kMaxNeighbors> d{};
  std::array<std::size_t, kMaxNeighbors> idx{};
  std::size_t size = 0;
};

void select_smallest(std::span<const double> dist, std::size_t k, Neighbors& out) {
  out.size = 0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    const double dj = dist[j];
    if (out.size == k && !(dj < out.d[k - 1])) continue;
    std::size_t pos = out.size < k ? out.size++ : k - 1;
    while (pos > 0 && dj < out.d[pos - 1]) {
      out.d[pos] = out.d[pos - 1];
      out.idx[pos] = out.idx[pos - 1];
      --pos;
    }
    out.d[pos] = dj;
    out.idx[pos] = j;
  }
}

BitWord vote(const Neighbors& nb, std::span<const BitWord> words) {
  const unsigned bits = words[nb.idx[0]].length();
  std::array<unsigned, kMaxBitsPerSymbol> ones{};
  for (std::size_t n = 0; n < nb.size; ++n) {
    const BitWord w = words[nb.idx[n]];
    for (unsigned b = 0; b < bits; ++b) ones[b] += static_cast<unsigned>(w.bit(b));
  }
  unsigned value = 0;
  for (unsigned b = 0; b < bits; ++b) value = (value << 1) | (2 * ones[b] > nb.size ? 1u : 0u);
  return BitWord(value, bits);
}

void check_k(std::size_t k, std::size_t available) {
  if (k == 0 || k % 2 == 0) throw InputError("kNN: k must be odd, got " + std::to_string(k));
  if (k > kMaxNeighbors) {
    throw InputError("kNN: k must not exceed " + std::to_string(kMaxNeighbors));
  }
  if (k > available) {
    throw InputError("kNN: k = " + std::to_string(k) + " exceeds the " +
                     std::to_string(available) + " available references");
  }
}

}  // namespace

KnnReference::KnnReference(std::span<const IQSymbol> symbols, std::span<const BitWord> words,
                           std::size_t k)
    : points_(symbols), words_(words.begin(), words.end()), k_(k) {
  if (symbols.size() != words.size()) {
    throw InputError("KnnReference: symbol and word counts differ");
  }
  check_k(k, symbols.size());
  for (const auto& w : words_) {
    if (w.length() != words_.front().length()) throw InputError("KnnReference: mixed word lengths");
  }
}

BitWord knn_demod(IQSymbol s, const KnnReference& ref) {
  std::vector<double> dist(ref.size());
  simd::squared_distances(ref.points(), s, dist);
  Neighbors nb;
  select_smallest(dist, ref.k(), nb);
  return vote(nb, ref.words());
}

std::vector<BitWord> knn_demod_loo(std::span<const IQSymbol> noisy_preamble,
                                   std::span<const BitWord> preamble_words, std::size_t k) {
  if (noisy_preamble.size() != preamble_words.size()) {
    throw InputError("knn_demod_loo: symbol and word counts differ");
  }
  if (noisy_preamble.empty()) return {};
  check_k(k, noisy_preamble.size() - 1);
  const simd::PointSet pts(noisy_preamble);
  std::vector<double> dist(pts.size());
  std::vector<BitWord> out;
  out.reserve(pts.size());
  Neighbors nb;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    simd::squared_distances(pts, pts.at(i), dist);
    dist[i] = std::numeric_limits<double>::infinity();
    select_smallest(dist, k, nb);
    out.push_back(vote(nb, preamble_words));
  }
  return out;
}

}  // namespace echomod
