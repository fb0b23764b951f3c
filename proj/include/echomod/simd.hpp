#pragma once

// Distance kernels behind every nearest-point search in the library.
//
// Each kernel has a portable scalar reference and vector variants (AVX2 on
// x86-64, NEON on aarch64). The variant is chosen once at startup from the
// CPU's capabilities and can be pinned for testing. All variants evaluate
// dx*dx + dy*dy with the same operation order and without fused
// multiply-add, so they produce bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "echomod/types.hpp"

namespace echomod::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Best variant supported by this build and CPU.
Isa best_isa();
/// Variant currently used by the dispatching entry points.
Isa active_isa();
/// Pins the variant; throws InputError if it is not supported here.
void force_isa(Isa isa);
bool isa_supported(Isa isa);

/// Structure-of-arrays copy of a set of complex points.
struct PointSet {
  std::vector<double> re;
  std::vector<double> im;

  PointSet() = default;
  explicit PointSet(std::span<const IQSymbol> points);

  std::size_t size() const noexcept { return re.size(); }
  IQSymbol at(std::size_t i) const { return {re[i], im[i]}; }
  void push_back(IQSymbol s) {
    re.push_back(s.real());
    im.push_back(s.imag());
  }
};

/// Function table for one instruction-set variant.
struct Kernels {
  /// out[j] = |p_j - q|^2 for every point p_j.
  void (*squared_distances)(const double* re, const double* im, std::size_t n,
                            double q_re, double q_im, double* out);
  /// Index of the point closest to q; ties go to the smallest index. n >= 1.
  std::size_t (*nearest)(const double* re, const double* im, std::size_t n,
                         double q_re, double q_im);
  /// For each point j: if |p_j - c|^2 < best_d[j], set best_d[j] and
  /// best_idx[j] = label. Strict comparison keeps earlier labels on ties.
  void (*relax_nearest)(const double* re, const double* im, std::size_t n,
                        double c_re, double c_im, int label, double* best_d,
                        int* best_idx);
};

const Kernels& kernels(Isa isa);
const Kernels& active_kernels();

// Dispatching convenience wrappers.
void squared_distances(const PointSet& points, IQSymbol q, std::span<double> out);
std::size_t nearest(const PointSet& points, IQSymbol q);
void relax_nearest(const PointSet& points, IQSymbol c, int label, std::span<double> best_d,
                   std::span<int> best_idx);

}  // namespace echomod::simd
