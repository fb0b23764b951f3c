#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "echomod/format.hpp"
#include "echomod/harness.hpp"

namespace echomod {

CurvePoint aggregate(double ebn0_db, std::span<const double> per_seed_ber, std::uint64_t errors) {
  CurvePoint p;
  p.ebn0_db = ebn0_db;
  p.n = per_seed_ber.size();
  p.no_errors = errors == 0;
  if (p.n == 0) return p;
  double sum = 0.0;
  for (double b : per_seed_ber) sum += b;
  p.ber = sum / static_cast<double>(p.n);
  if (p.n > 1) {
    double ss = 0.0;
    for (double b : per_seed_ber) ss += (b - p.ber) * (b - p.ber);
    p.ber_std = std::sqrt(ss / static_cast<double>(p.n - 1));
  }
  return p;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "ebn0_db,ber,ber_std,n,flag\n";
  for (const auto& p : curve) {
    out << format_double(p.ebn0_db) << ',' << format_double(p.ber) << ','
        << (p.ber_std ? format_double(*p.ber_std) : "") << ',' << p.n << ','
        << (p.no_errors ? "no_errors" : "") << '\n';
  }
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  std::iota(out.begin(), out.end(), base);
  return out;
}

std::size_t count_clusters(const Constellation& c, double radius) {
  const auto pts = c.points();
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t groups = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (std::abs(pts[i] - pts[j]) > radius) continue;
      const auto a = root(i);
      const auto b = root(j);
      if (a != b) {
        parent[a] = b;
        --groups;
      }
    }
  }
  return groups;
}

std::size_t distinguishable_clusters(const Constellation& c) {
  return count_clusters(c, 0.1 * std::sqrt(mean_symbol_energy(c)));
}

double gray_neighbor_fraction(const Constellation& c) {
  const auto pts = c.points();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::size_t nn = i == 0 ? 1 : 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i && std::norm(pts[j] - pts[i]) < std::norm(pts[nn] - pts[i])) nn = j;
    }
    hits += hamming(c.word(i), c.word(nn)) == 1;
  }
  return static_cast<double>(hits) / static_cast<double>(pts.size());
}

}  // namespace echomod
