#include <arm_neon.h>

#include <limits>

#include "kernels_internal.hpp"

namespace echomod::simd::detail {
namespace {

inline float64x2_t sq_dist2(const double* re, const double* im, float64x2_t qr,
                            float64x2_t qi) {
  const float64x2_t dr = vsubq_f64(vld1q_f64(re), qr);
  const float64x2_t di = vsubq_f64(vld1q_f64(im), qi);
  // vmulq + vaddq rather than vfmaq: must round like the scalar path.
  return vaddq_f64(vmulq_f64(dr, dr), vmulq_f64(di, di));
}

inline double sq_dist(double ar, double ai, double br, double bi) {
  const double dr = ar - br;
  const double di = ai - bi;
  return dr * dr + di * di;
}

void squared_distances(const double* re, const double* im, std::size_t n, double q_re,
                       double q_im, double* out) {
  const float64x2_t qr = vdupq_n_f64(q_re);
  const float64x2_t qi = vdupq_n_f64(q_im);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(out + j, sq_dist2(re + j, im + j, qr, qi));
  for (; j < n; ++j) out[j] = sq_dist(re[j], im[j], q_re, q_im);
}

std::size_t nearest(const double* re, const double* im, std::size_t n, double q_re,
                    double q_im) {
  std::size_t j = 0;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  bool found = false;
  if (n >= 2) {
    const float64x2_t qr = vdupq_n_f64(q_re);
    const float64x2_t qi = vdupq_n_f64(q_im);
    const float64x2_t step = vdupq_n_f64(2.0);
    const double init_idx[2] = {0.0, 1.0};
    float64x2_t lane_idx = vld1q_f64(init_idx);
    float64x2_t lane_best_d = vdupq_n_f64(std::numeric_limits<double>::infinity());
    float64x2_t lane_best_idx = vdupq_n_f64(-1.0);
    for (; j + 2 <= n; j += 2) {
      const float64x2_t d = sq_dist2(re + j, im + j, qr, qi);
      const uint64x2_t lt = vcltq_f64(d, lane_best_d);
      lane_best_d = vbslq_f64(lt, d, lane_best_d);
      lane_best_idx = vbslq_f64(lt, lane_idx, lane_best_idx);
      lane_idx = vaddq_f64(lane_idx, step);
    }
    double ds[2];
    double is[2];
    vst1q_f64(ds, lane_best_d);
    vst1q_f64(is, lane_best_idx);
    for (int l = 0; l < 2; ++l) {
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
  const float64x2_t cr = vdupq_n_f64(c_re);
  const float64x2_t ci = vdupq_n_f64(c_im);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t d = sq_dist2(re + j, im + j, cr, ci);
    const float64x2_t cur = vld1q_f64(best_d + j);
    const uint64x2_t lt = vcltq_f64(d, cur);
    vst1q_f64(best_d + j, vbslq_f64(lt, d, cur));
    if (vgetq_lane_u64(lt, 0)) best_idx[j] = label;
    if (vgetq_lane_u64(lt, 1)) best_idx[j + 1] = label;
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

const Kernels& neon_kernels() {
  static const Kernels k{&squared_distances, &nearest, &relax_nearest};
  return k;
}

}  // namespace echomod::simd::detail
