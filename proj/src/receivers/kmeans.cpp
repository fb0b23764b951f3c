#include <algorithm>
#include <limits>
#include <numeric>

#include "echomod/receivers.hpp"

namespace echomod {
namespace {

// Total order on points used for every tie-break.
bool coord_less(IQSymbol a, IQSymbol b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Assigns every sample to its nearest mean; returns true if anything moved.
bool assign(const simd::PointSet& pts, std::span<const IQSymbol> means, std::vector<int>& idx,
            std::vector<double>& dist) {
  std::vector<int> fresh(pts.size(), 0);
  std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < means.size(); ++c) {
    simd::relax_nearest(pts, means[c], static_cast<int>(c), dist, fresh);
  }
  const bool changed = fresh != idx;
  idx.swap(fresh);
  return changed;
}

double half_mean(const std::vector<double>& dist) {
  double sum = 0.0;
  for (double d : dist) sum += d;
  return 0.5 * sum / static_cast<double>(dist.size());
}

}  // namespace

std::vector<IQSymbol> farthest_point_init(std::span<const IQSymbol> points, std::size_t k) {
  if (k == 0) throw InputError("farthest_point_init: k must be at least 1");
  if (points.size() < k) {
    throw InputError("farthest_point_init: " + std::to_string(points.size()) +
                     " points cannot seed " + std::to_string(k) + " clusters");
  }
  std::vector<IQSymbol> seeds;
  seeds.reserve(k);

  std::size_t first = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double e = energy(points[i]);
    const double best = energy(points[first]);
    if (e > best || (e == best && coord_less(points[i], points[first]))) first = i;
  }
  seeds.push_back(points[first]);

  const simd::PointSet pts(points);
  std::vector<double> min_d(points.size());
  simd::squared_distances(pts, seeds.back(), min_d);
  std::vector<double> d(points.size());
  while (seeds.size() < k) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (min_d[i] > min_d[pick] ||
          (min_d[i] == min_d[pick] && coord_less(points[i], points[pick]))) {
        pick = i;
      }
    }
    seeds.push_back(points[pick]);
    simd::squared_distances(pts, seeds.back(), d);
    for (std::size_t i = 0; i < d.size(); ++i) min_d[i] = std::min(min_d[i], d[i]);
  }
  return seeds;
}

Clustering kmeans_lloyd(std::span<const IQSymbol> points, std::size_t k, int iterations,
                        std::vector<double>* trace) {
  if (k == 0) throw InputError("kmeans_lloyd: k must be at least 1");
  if (points.size() < k) throw InputError("kmeans_lloyd: fewer points than clusters");

  // Work on a canonically ordered copy so the outcome is independent of the
  // input order (centroid sums would otherwise round differently).
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return coord_less(points[a], points[b]); });
  std::vector<IQSymbol> sorted(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = points[order[i]];
  const simd::PointSet pts(sorted);

  std::vector<IQSymbol> means = farthest_point_init(sorted, k);
  std::vector<int> idx(sorted.size(), -1);
  std::vector<double> dist(sorted.size());
  assign(pts, means, idx, dist);
  if (trace) trace->assign(1, half_mean(dist));

  for (int it = 0; it < iterations; ++it) {
    std::vector<IQSymbol> sum(k, {0.0, 0.0});
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      sum[static_cast<std::size_t>(idx[i])] += sorted[i];
      ++count[static_cast<std::size_t>(idx[i])];
    }
    bool any_empty = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) {
        means[c] = sum[c] / static_cast<double>(count[c]);
      } else {
        any_empty = true;
      }
    }
    if (any_empty) {
      // An empty cluster takes over the sample worst served by its own mean.
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        dist[i] = std::norm(sorted[i] - means[static_cast<std::size_t>(idx[i])]);
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (count[c] > 0) continue;
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        means[c] = sorted[far];
        dist[far] = 0.0;
      }
    }
    const bool changed = assign(pts, means, idx, dist);
    if (trace) trace->push_back(half_mean(dist));
    if (!changed) break;
  }

  Clustering out;
  out.means = std::move(means);
  out.assignment.resize(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) out.assignment[order[i]] = idx[i];
  return out;
}

double min_avg_distortion(const Clustering& clustering, std::span<const IQSymbol> points) {
  if (points.empty()) throw InputError("min_avg_distortion: no points");
  if (clustering.assignment.size() != points.size()) {
    throw InputError("min_avg_distortion: assignment does not cover the points");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += std::norm(points[i] - clustering.means[static_cast<std::size_t>(clustering.assignment[i])]);
  }
  return 0.5 * sum / static_cast<double>(points.size());
}

}  // namespace echomod
