#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace echomod::simd {
namespace {

Isa detect() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
  return Isa::scalar;
#elif defined(__aarch64__)
  return Isa::neon;
#else
  return Isa::scalar;
#endif
}

// ECHOMOD_ISA=scalar pins the reference kernels for the whole process.
Isa initial_isa() {
  const Isa best = detect();
  if (const char* env = std::getenv("ECHOMOD_ISA")) {
    const std::string v = env;
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && best == Isa::avx2) return Isa::avx2;
    if (v == "neon" && best == Isa::neon) return Isa::neon;
  }
  return best;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

Isa best_isa() {
  static const Isa isa = detect();
  return isa;
}

bool isa_supported(Isa isa) { return isa == Isa::scalar || isa == best_isa(); }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InputError("instruction set '" + std::string(isa_name(isa)) +
                     "' is not available on this machine");
  }
  active().store(isa, std::memory_order_relaxed);
}

const Kernels& kernels(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2:
      if (isa_supported(isa)) return detail::avx2_kernels();
      break;
#endif
#if defined(__aarch64__)
    case Isa::neon:
      return detail::neon_kernels();
#endif
    default:
      break;
  }
  if (isa != Isa::scalar) {
    throw InputError("no kernels for instruction set '" + std::string(isa_name(isa)) + "'");
  }
  return detail::scalar_kernels();
}

const Kernels& active_kernels() { return kernels(active_isa()); }

PointSet::PointSet(std::span<const IQSymbol> points) {
  re.reserve(points.size());
  im.reserve(points.size());
  for (const auto& p : points) push_back(p);
}

void squared_distances(const PointSet& points, IQSymbol q, std::span<double> out) {
  if (out.size() != points.size()) throw InputError("squared_distances: output size mismatch");
  if (points.size() == 0) return;
  active_kernels().squared_distances(points.re.data(), points.im.data(), points.size(),
                                     q.real(), q.imag(), out.data());
}

std::size_t nearest(const PointSet& points, IQSymbol q) {
  if (points.size() == 0) throw InputError("nearest: empty point set");
  return active_kernels().nearest(points.re.data(), points.im.data(), points.size(), q.real(),
                                  q.imag());
}

void relax_nearest(const PointSet& points, IQSymbol c, int label, std::span<double> best_d,
                   std::span<int> best_idx) {
  if (best_d.size() != points.size() || best_idx.size() != points.size()) {
    throw InputError("relax_nearest: output size mismatch");
  }
  if (points.size() == 0) return;
  active_kernels().relax_nearest(points.re.data(), points.im.data(), points.size(), c.real(),
                                 c.imag(), label, best_d.data(), best_idx.data());
}

}  // namespace echomod::simd
