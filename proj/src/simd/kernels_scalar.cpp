#include "kernels_internal.hpp"

namespace echomod::simd::detail {
namespace {

inline double sq_dist(double ar, double ai, double br, double bi) {
  const double dr = ar - br;
  const double di = ai - bi;
  return dr * dr + di * di;
}

void squared_distances(const double* re, const double* im, std::size_t n, double q_re,
                       double q_im, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = sq_dist(re[j], im[j], q_re, q_im);
}

std::size_t nearest(const double* re, const double* im, std::size_t n, double q_re,
                    double q_im) {
  std::size_t best = 0;
  double best_d = sq_dist(re[0], im[0], q_re, q_im);
  for (std::size_t j = 1; j < n; ++j) {
    const double d = sq_dist(re[j], im[j], q_re, q_im);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

void relax_nearest(const double* re, const double* im, std::size_t n, double c_re,
                   double c_im, int label, double* best_d, int* best_idx) {
  for (std::size_t j = 0; j < n; ++j) {
    const double d = sq_dist(re[j], im[j], c_re, c_im);
    if (d < best_d[j]) {
      best_d[j] = d;
      best_idx[j] = label;
    }
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{&squared_distances, &nearest, &relax_nearest};
  return k;
}

}  // namespace echomod::simd::detail
