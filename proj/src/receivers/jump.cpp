#include <algorithm>
#include <map>
#include <limits>

#include "echomod/receivers.hpp"

namespace echomod {

JumpSelection jump_select_k(std::span<const IQSymbol> points, std::size_t n_max, int iterations) {
  if (n_max < 1) throw InputError("jump_select_k: n_max must be at least 1");
  if (points.size() < n_max) {
    throw InputError("jump_select_k: need at least n_max = " + std::to_string(n_max) +
                     " points, got " + std::to_string(points.size()));
  }
  JumpSelection sel;
  double prev_inverse = 0.0;
  double best_jump = 0.0;
  for (std::size_t k = 1; k <= n_max; ++k) {
    Clustering c = kmeans_lloyd(points, k, iterations);
    const double d = min_avg_distortion(c, points);
    sel.curve.distortion.push_back(d);
    if (d == 0.0) {
      // Perfect fit: no further split can explain anything.
      sel.curve.jump.push_back(std::numeric_limits<double>::infinity());
      sel.k = k;
      sel.clustering = std::move(c);
      return sel;
    }
    const double inverse = 1.0 / d;
    const double jump = inverse - prev_inverse;
    prev_inverse = inverse;
    sel.curve.jump.push_back(jump);
    if (k == 1 || jump > best_jump) {
      best_jump = jump;
      sel.k = k;
      sel.clustering = std::move(c);
    }
  }
  return sel;
}

BitWord LabeledDemod::operator()(IQSymbol s) const {
  std::size_t best = 0;
  double best_d = std::norm(s - means[0]);
  for (std::size_t c = 1; c < means.size(); ++c) {
    const double d = std::norm(s - means[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return labels[best];
}

LabeledDemod label_clusters(const Clustering& clustering, std::span<const BitWord> words) {
  if (clustering.assignment.size() != words.size()) {
    throw InputError("label_clusters: assignment and preamble lengths differ");
  }
  if (words.empty()) throw InputError("label_clusters: empty preamble");
  const std::size_t k = clustering.k();
  const unsigned bits = words.front().length();

  std::vector<std::map<unsigned, std::size_t>> votes(k);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].length() != bits) throw InputError("label_clusters: mixed word lengths");
    ++votes[static_cast<std::size_t>(clustering.assignment[i])][words[i].value()];
  }

  LabeledDemod out;
  out.means = clustering.means;
  out.labels.resize(k);
  std::vector<bool> filled(k, false);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best_count = 0;
    // std::map iterates words in increasing order, so strict > keeps the smallest.
    for (const auto& [word, count] : votes[c]) {
      if (count > best_count) {
        best_count = count;
        out.labels[c] = BitWord(word, bits);
      }
    }
    filled[c] = best_count > 0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (filled[c]) continue;
    std::size_t donor = k;
    double best_d = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      if (!filled[o]) continue;
      const double d = std::norm(out.means[c] - out.means[o]);
      if (donor == k || d < best_d) {
        best_d = d;
        donor = o;
      }
    }
    out.labels[c] = out.labels[donor];
  }
  return out;
}

}  // namespace echomod
