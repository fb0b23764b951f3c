// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <limits>

#include "kernels_internal.hpp"

namespace echomod::simd::detail {
namespace {

inline __m256d sq_dist4(const double* re, const double* im, __m256d qr, __m256d qi) {
  const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(re), qr);
  const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(im), qi);
  return _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
}

inline double sq_dist(double ar, double ai, double br, double bi) {
  const double dr = ar - br;
  const double di = ai - bi;
  return dr * dr + di * di;
}

void squared_distances(const double* re, const double* im, std::size_t n, double q_re,
                       double q_im, double* out) {
  const __m256d qr = _mm256_set1_pd(q_re);
  const __m256d qi = _mm256_set1_pd(q_im);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, sq_dist4(re + j, im + j, qr, qi));
  for (; j < n; ++j) out[j] = sq_dist(re[j], im[j], q_re, q_im);
}

std::size_t nearest(const double* re, const double* im, std::size_t n, double q_re,
                    double q_im) {
  std::size_t j = 0;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  bool found = false;
  if (n >= 4) {
    const __m256d qr = _mm256_set1_pd(q_re);
    const __m256d qi = _mm256_set1_pd(q_im);
    const __m256d step = _mm256_set1_pd(4.0);
    __m256d lane_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    __m256d lane_best_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d lane_best_idx = _mm256_set1_pd(-1.0);
    for (; j + 4 <= n; j += 4) {
      const __m256d d = sq_dist4(re + j, im + j, qr, qi);
      const __m256d lt = _mm256_cmp_pd(d, lane_best_d, _CMP_LT_OQ);
      lane_best_d = _mm256_blendv_pd(lane_best_d, d, lt);
      lane_best_idx = _mm256_blendv_pd(lane_best_idx, lane_idx, lt);
      lane_idx = _mm256_add_pd(lane_idx, step);
    }
    alignas(32) double ds[4];
    alignas(32) double is[4];
    _mm256_store_pd(ds, lane_best_d);
    _mm256_store_pd(is, lane_best_idx);
    for (int l = 0; l < 4; ++l) {
      if (is[l] < 0.0) continue;
      const auto idx = static_cast<std::size_t>(is[l]);
      if (!found || ds[l] < best_d || (ds[l] == best_d && idx < best)) {
        best_d = ds[l];
        best = idx;
        found = true;
      }
    }
  }
  for (; j < n; ++j) {
    const double d = sq_dist(re[j], im[j], q_re, q_im);
    if (!found || d < best_d) {
      best_d = d;
      best = j;
      found = true;
    }
  }
  return best;
}

void relax_nearest(const double* re, const double* im, std::size_t n, double c_re,
                   double c_im, int label, double* best_d, int* best_idx) {
  const __m256d cr = _mm256_set1_pd(c_re);
  const __m256d ci = _mm256_set1_pd(c_im);
  const __m128i lab = _mm_set1_epi32(label);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = sq_dist4(re + j, im + j, cr, ci);
    const __m256d cur = _mm256_loadu_pd(best_d + j);
    const __m256d lt = _mm256_cmp_pd(d, cur, _CMP_LT_OQ);
    _mm256_storeu_pd(best_d + j, _mm256_blendv_pd(cur, d, lt));
    // Narrow the 64-bit lane mask to four 32-bit lanes for the label blend.
    const __m256i mask64 = _mm256_castpd_si256(lt);
    const __m128i mask32 = _mm_castps_si128(_mm_shuffle_ps(
        _mm_castsi128_ps(_mm256_castsi256_si128(mask64)),
        _mm_castsi128_ps(_mm256_extracti128_si256(mask64, 1)), _MM_SHUFFLE(2, 0, 2, 0)));
    auto* idx_ptr = reinterpret_cast<__m128i*>(best_idx + j);
    const __m128i old_idx = _mm_loadu_si128(idx_ptr);
    _mm_storeu_si128(idx_ptr, _mm_blendv_epi8(old_idx, lab, mask32));
  }
  for (; j < n; ++j) {
    const double d = sq_dist(re[j], im[j], c_re, c_im);
    if (d < best_d[j]) {
      best_d[j] = d;
      best_idx[j] = label;
    }
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{&squared_distances, &nearest, &relax_nearest};
  return k;
}

}  // namespace echomod::simd::detail
