#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "echomod/channel.hpp"
#include "echomod/modem.hpp"
#include "echomod/receivers.hpp"
#include "support.hpp"

using namespace echomod;

namespace {

std::vector<IQSymbol> blobs(const std::vector<IQSymbol>& centres, std::size_t per, double sigma,
                            Rng& rng, std::vector<int>* truth = nullptr) {
  std::vector<IQSymbol> out;
  for (std::size_t i = 0; i < per; ++i) {
    for (std::size_t c = 0; c < centres.size(); ++c) {
      out.push_back(centres[c] + IQSymbol{sigma * rng.normal(), sigma * rng.normal()});
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  return out;
}

const std::vector<IQSymbol> kCorners = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};

// Exhaustive kNN: full sort by (distance, index), per-bit majority.
BitWord knn_oracle(IQSymbol s, std::span<const IQSymbol> ref, std::span<const BitWord> words,
                   std::size_t k, std::size_t skip = SIZE_MAX) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < ref.size(); ++j) {
    if (j != skip) d.emplace_back(std::norm(ref[j] - s), j);
  }
  std::sort(d.begin(), d.end());
  const unsigned bits = words[0].length();
  unsigned v = 0;
  for (unsigned b = 0; b < bits; ++b) {
    std::size_t ones = 0;
    for (std::size_t n = 0; n < k; ++n) ones += words[d[n].second].bit(b);
    v = (v << 1) | (2 * ones > k ? 1u : 0u);
  }
  return BitWord(v, bits);
}

}  // namespace

TEST_CASE("farthest point init") {
  Rng rng(1);
  const auto pts = testing::random_points(50, rng);
  const auto one = farthest_point_init(pts, 1);
  for (const auto& p : pts) CHECK(energy(p) <= energy(one[0]));

  const std::vector<IQSymbol> square = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  auto seeds = farthest_point_init(square, 4);
  std::sort(seeds.begin(), seeds.end(), [](auto a, auto b) { return std::arg(a) < std::arg(b); });
  auto sorted = square;
  std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return std::arg(a) < std::arg(b); });
  CHECK(seeds == sorted);

  // Greedy criterion checked by brute force.
  const auto three = farthest_point_init(pts, 3);
  for (std::size_t s = 1; s < 3; ++s) {
    auto min_d = [&](IQSymbol p) {
      double m = 1e300;
      for (std::size_t c = 0; c < s; ++c) m = std::min(m, std::norm(p - three[c]));
      return m;
    };
    for (const auto& p : pts) CHECK(min_d(p) <= min_d(three[s]));
  }
  CHECK_THROWS_AS(farthest_point_init(square, 5), InputError);
}

TEST_CASE("lloyd basics") {
  const std::vector<IQSymbol> at = {{0, 0}, {0, 0}, {2, 1}, {2, 1}, {-1, 3}};
  const auto c = kmeans_lloyd(at, 3);
  CHECK(min_avg_distortion(c, at) == 0.0);
  for (const auto& p : at) CHECK(std::find(c.means.begin(), c.means.end(), p) != c.means.end());

  Rng rng(2);
  const auto pts = testing::random_points(101, rng);
  const auto one = kmeans_lloyd(pts, 1);
  IQSymbol centroid{};
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  CHECK(std::abs(one.means[0] - centroid) < 1e-12);
  CHECK_THROWS_AS(kmeans_lloyd(pts, 0), InputError);
}

TEST_CASE("lloyd recovers separated blobs") {
  Rng rng(3);
  const auto pts = blobs(kCorners, 50, 0.05, rng);
  const auto c = kmeans_lloyd(pts, 4);
  for (const auto& centre : kCorners) {
    double best = 1e9;
    for (const auto& m : c.means) best = std::min(best, std::abs(m - centre));
    CHECK(best < 0.05);
  }
  // Every sample sits with its nearest mean.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double own = std::norm(pts[i] - c.means[c.assignment[i]]);
    for (const auto& m : c.means) CHECK(own <= std::norm(pts[i] - m));
  }
}

TEST_CASE("lloyd distortion never increases") {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto pts = testing::random_points(300, rng);
    std::vector<double> trace;
    kmeans_lloyd(pts, 2 + t % 15, 50, &trace);
    REQUIRE(trace.size() >= 1);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] * (1 + 1e-12));
  }
}

TEST_CASE("min average distortion") {
  Clustering c;
  c.means = {{1, 0}};
  const std::vector<IQSymbol> two = {{0, 0}, {2, 0}};
  c.assignment = {0, 0};
  CHECK(min_avg_distortion(c, two) == doctest::Approx(0.5));

  Rng rng(5);
  const auto pts = testing::random_points(77, rng);
  const auto k = kmeans_lloyd(pts, 5);
  double sum = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const IQSymbol d = pts[i] - k.means[k.assignment[i]];
    sum += d.real() * d.real() + d.imag() * d.imag();
  }
  CHECK(min_avg_distortion(k, pts) == doctest::Approx(0.5 * sum / pts.size()));
  CHECK_THROWS_AS(min_avg_distortion(k, {}), InputError);
}

TEST_CASE("jump method") {
  Rng rng(6);
  const auto pts = blobs(kCorners, 60, 0.03, rng);
  const auto sel = jump_select_k(pts, 20);
  CHECK(sel.k == 4);
  CHECK(sel.curve.jump[0] == doctest::Approx(1.0 / sel.curve.distortion[0]));
  for (std::size_t k = 1; k < sel.curve.jump.size(); ++k) {
    CHECK(sel.curve.jump[k] ==
          doctest::Approx(1.0 / sel.curve.distortion[k] - 1.0 / sel.curve.distortion[k - 1]));
  }

  // Perfect fit stops the search.
  std::vector<IQSymbol> exact;
  for (int r = 0; r < 10; ++r) exact.insert(exact.end(), kCorners.begin(), kCorners.end());
  const auto perfect = jump_select_k(exact, 20);
  CHECK(perfect.k == 4);
  CHECK(perfect.curve.distortion.size() == 4);

  CHECK_THROWS_AS(jump_select_k(std::span(pts).first(10), 20), InputError);
}

TEST_CASE("jump method ignores input order") {
  Rng rng(7);
  const auto c = standard_constellation(Scheme::qam16);
  auto words = testing::random_words(400, 4, rng);
  auto pts = modulate(words, c);
  awgn_apply_inplace(pts, 0.02, rng);
  const auto a = jump_select_k(pts, 20);
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<IQSymbol> shuffled(pts.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = pts[perm[i]];
  const auto b = jump_select_k(shuffled, 20);
  CHECK(a.k == b.k);
  for (std::size_t k = 0; k < a.curve.distortion.size(); ++k) {
    CHECK(a.curve.distortion[k] == doctest::Approx(b.curve.distortion[k]).epsilon(1e-12));
  }
  CHECK(a.clustering.means == b.clustering.means);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK(b.clustering.assignment[i] == a.clustering.assignment[perm[i]]);
  }
}

TEST_CASE("jump method at high and low SNR") {
  const auto c = standard_constellation(Scheme::qam16);
  int found16 = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const auto words = testing::random_words(1000, 4, rng);
    auto pts = modulate(words, c);
    awgn_apply_inplace(pts, n0_for_ebn0(14.0, 5.0 / 9.0, 4), rng);
    found16 += jump_select_k(pts, 20).k == 16;
  }
  CHECK(found16 >= 4);

  Rng rng(200);
  const auto words = testing::random_words(1000, 4, rng);
  auto pts = modulate(words, c);
  awgn_apply_inplace(pts, n0_for_ebn0(1.2, 5.0 / 9.0, 4), rng);
  const auto k = jump_select_k(pts, 20).k;
  CHECK(k >= 2);
  CHECK(k <= 14);
}

TEST_CASE("cluster labelling") {
  const auto c = standard_constellation(Scheme::qam16);
  std::vector<BitWord> words;
  for (int r = 0; r < 3; ++r) {
    for (std::size_t w = 0; w < 16; ++w) words.push_back(c.word(w));
  }
  const auto pts = modulate(words, c);
  const auto cl = kmeans_lloyd(pts, 16);
  const auto demod = label_clusters(cl, words);
  for (std::size_t w = 0; w < 16; ++w) CHECK(demod(c.points()[w]) == c.word(w));

  Clustering one;
  one.means = {{0, 0}};
  one.assignment = {0, 0, 0, 0};
  const std::vector<BitWord> votes = {BitWord::parse("0000"), BitWord::parse("1111"),
                                      BitWord::parse("0000"), BitWord::parse("0000")};
  CHECK(label_clusters(one, votes).labels[0] == BitWord::parse("0000"));
  const std::vector<BitWord> tie = {BitWord::parse("1111"), BitWord::parse("0011"),
                                    BitWord::parse("0011"), BitWord::parse("1111")};
  CHECK(label_clusters(one, tie).labels[0] == BitWord::parse("0011"));

  Clustering empty;
  empty.means = {{0, 0}, {5, 0}, {0.5, 0}};
  empty.assignment = {0, 1, 1};
  const std::vector<BitWord> w3 = {BitWord::parse("01"), BitWord::parse("10"), BitWord::parse("10")};
  CHECK(label_clusters(empty, w3).labels[2] == BitWord::parse("01"));
}

TEST_CASE("cluster labelling matches an exhaustive count") {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto pts = testing::random_points(120, rng);
    const auto words = testing::random_words(120, 3, rng);
    const auto cl = kmeans_lloyd(pts, 6);
    const auto demod = label_clusters(cl, words);
    for (std::size_t c = 0; c < 6; ++c) {
      std::array<int, 8> count{};
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (cl.assignment[i] == static_cast<int>(c)) ++count[words[i].value()];
      }
      const auto best = std::max_element(count.begin(), count.end()) - count.begin();
      if (count[best] > 0) CHECK(demod.labels[c].value() == static_cast<unsigned>(best));
    }
  }
}

TEST_CASE("cluster demodulation on its own preamble beats chance") {
  const auto c = standard_constellation(Scheme::qam16);
  for (double n0 : {0.01, 0.1, 0.5, 2.0}) {
    Rng rng(10);
    const auto words = testing::random_words(500, 4, rng);
    auto pts = modulate(words, c);
    awgn_apply_inplace(pts, n0, rng);
    const auto sel = jump_select_k(pts, 20);
    const auto demod = label_clusters(sel.clustering, words);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) errors += hamming(words[i], demod(pts[i]));
    CHECK(static_cast<double>(errors) / (pts.size() * 4) <= 0.5);
  }
}

TEST_CASE("knn demodulation") {
  const std::vector<IQSymbol> ref = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
  const std::vector<BitWord> words = {BitWord::parse("0000"), BitWord::parse("0001"),
                                      BitWord::parse("0011"), BitWord::parse("1111")};
  CHECK(knn_demod({1, 0}, KnnReference(ref, words, 1)) == BitWord::parse("0001"));
  CHECK(knn_demod({0.1, 0.1}, KnnReference(ref, words, 3)) == BitWord::parse("0001"));
  CHECK_THROWS_AS(KnnReference(ref, words, 2), InputError);
  CHECK_THROWS_AS(KnnReference(ref, words, 5), InputError);
}

TEST_CASE("knn agrees with an exhaustive oracle") {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 5 + rng.below(40);
    const std::size_t k = t % 3 == 0 ? 1 : (t % 3 == 1 ? 3 : 5);
    // Half the instances use a coarse grid to force distance ties.
    std::vector<IQSymbol> pts(n);
    for (auto& p : pts) {
      p = t % 2 ? IQSymbol{rng.normal(), rng.normal()}
                : IQSymbol{static_cast<double>(rng.below(4)), static_cast<double>(rng.below(4))};
    }
    const auto words = testing::random_words(n, 4, rng);
    const IQSymbol q = t % 2 ? IQSymbol{rng.normal(), rng.normal()}
                             : IQSymbol{static_cast<double>(rng.below(4)), 1.0};
    CHECK(knn_demod(q, KnnReference(pts, words, k)) == knn_oracle(q, pts, words, k));
    if (k == 1) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < n; ++j) {
        if (std::norm(pts[j] - q) < std::norm(pts[best] - q)) best = j;
      }
      CHECK(knn_demod(q, KnnReference(pts, words, 1)) == words[best]);
    }
  }
}

TEST_CASE("leave-one-out knn") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto pts = testing::random_points(60, rng);
    const auto words = testing::random_words(60, 2, rng);
    const auto got = knn_demod_loo(pts, words, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(got[i] == knn_oracle(pts[i], pts, words, 3, i));
  }

  const auto c = standard_constellation(Scheme::qam16);
  std::vector<BitWord> words;
  for (int r = 0; r < 4; ++r) {
    for (std::size_t w = 0; w < 16; ++w) words.push_back(c.word(w));
  }
  CHECK(knn_demod_loo(modulate(words, c), words, 3) == words);

  // Pure noise carries no information.
  const auto noise_words = testing::random_words(512, 4, rng);
  const auto noise = testing::random_points(512, rng, 10.0);
  const auto guess = knn_demod_loo(noise, noise_words, 3);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < guess.size(); ++i) errors += hamming(guess[i], noise_words[i]);
  CHECK(std::abs(static_cast<double>(errors) / (512 * 4) - 0.5) < 0.05);

  CHECK_THROWS_AS(knn_demod_loo(std::span(noise).first(3), std::span(noise_words).first(3), 3), InputError);
}

TEST_CASE("leave-one-out knn is close to coherent demodulation") {
  const auto c = standard_constellation(Scheme::qam16);
  std::size_t knn_err = 0, coh_err = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(300 + s);
    const auto words = testing::random_words(512, 4, rng);
    auto rx = modulate(words, c);
    awgn_apply_inplace(rx, 0.01, rng);
    const auto guess = knn_demod_loo(rx, words, 3);
    for (std::size_t i = 0; i < rx.size(); ++i) {
      knn_err += hamming(words[i], guess[i]);
      coh_err += hamming(words[i], demod_coherent(rx[i], c));
    }
  }
  CHECK(coh_err > 0);
  CHECK(knn_err <= 2 * coh_err);
}
