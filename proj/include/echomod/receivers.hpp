#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "echomod/modem.hpp"
#include "echomod/simd.hpp"
#include "echomod/types.hpp"

namespace echomod {

// ---------------------------------------------------------------------------
// Clustering demodulator

struct Clustering {
  std::vector<IQSymbol> means;
  std::vector<int> assignment;  ///< sample index -> cluster index

  std::size_t k() const noexcept { return means.size(); }
};

/// Deterministic k-means seeding: the highest-energy point first, then
/// repeatedly the point whose distance to the nearest chosen seed is largest.
/// Ties are broken by comparing point coordinates, so the result depends only
/// on the set of points and not on their order.
std::vector<IQSymbol> farthest_point_init(std::span<const IQSymbol> points, std::size_t k);

/// Lloyd's algorithm from farthest_point_init. Stops after `iterations`
/// update/assign rounds or earlier once assignments stop changing. An empty
/// cluster is re-seeded at the sample farthest from its own mean.
///
/// If `trace` is given it receives the average distortion after the initial
/// assignment and after every round.
Clustering kmeans_lloyd(std::span<const IQSymbol> points, std::size_t k, int iterations = 50,
                        std::vector<double>* trace = nullptr);

/// Half the mean squared distance from each sample to its assigned mean.
double min_avg_distortion(const Clustering& clustering, std::span<const IQSymbol> points);

struct DistortionCurve {
  std::vector<double> distortion;  ///< distortion[k-1] = d(k)
  std::vector<double> jump;        ///< jump[k-1] = 1/d(k) - 1/d(k-1), with 1/d(0) = 0
};

struct JumpSelection {
  std::size_t k = 0;
  DistortionCurve curve;
  Clustering clustering;  ///< the Lloyd result for the selected k
};

/// Cluster-count selection by the jump method over k = 1..n_max. If some
/// d(k) is zero for k < n_max the data is fit perfectly and that k is returned.
JumpSelection jump_select_k(std::span<const IQSymbol> points, std::size_t n_max = 20,
                            int iterations = 50);

/// Cluster means with one bit word per cluster.
struct LabeledDemod {
  std::vector<IQSymbol> means;
  std::vector<BitWord> labels;

  /// Label of the nearest mean (smallest cluster index on ties).
  BitWord operator()(IQSymbol s) const;
};

/// Labels every cluster with the most frequent preamble word among its
/// members (smallest word on ties). Empty clusters borrow the label of the
/// nearest non-empty cluster.
LabeledDemod label_clusters(const Clustering& clustering, std::span<const BitWord> preamble_words);

// ---------------------------------------------------------------------------
// Preamble-referenced kNN demodulator

class KnnReference {
 public:
  /// k must be odd and no larger than the number of reference symbols.
  KnnReference(std::span<const IQSymbol> symbols, std::span<const BitWord> words, std::size_t k);

  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return points_.size(); }
  const simd::PointSet& points() const noexcept { return points_; }
  std::span<const BitWord> words() const noexcept { return words_; }

 private:
  simd::PointSet points_;
  std::vector<BitWord> words_;
  std::size_t k_;
};

/// Per-bit majority vote over the k nearest reference symbols. Among equally
/// distant references the lower index wins.
BitWord knn_demod(IQSymbol s, const KnnReference& ref);

/// Demodulates every preamble position against all other positions.
std::vector<BitWord> knn_demod_loo(std::span<const IQSymbol> noisy_preamble,
                                   std::span<const BitWord> preamble_words, std::size_t k);

}  // namespace echomod
