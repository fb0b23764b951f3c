#include <doctest.h>

#include "echomod/channel.hpp"
#include "support.hpp"

using namespace echomod;

TEST_CASE("awgn with zero noise is the identity") {
  Rng rng(1);
  const auto x = testing::random_points(100, rng);
  CHECK(awgn_apply(x, {0.0, 5}) == x);
}

TEST_CASE("awgn per-component variance is n0/2") {
  const std::vector<IQSymbol> zeros(100'000);
  const auto y = awgn_apply(zeros, {0.04, 11});
  double si = 0, sq = 0, siq = 0, mi = 0, mq = 0;
  for (const auto& s : y) {
    mi += s.real();
    mq += s.imag();
  }
  mi /= y.size();
  mq /= y.size();
  for (const auto& s : y) {
    si += (s.real() - mi) * (s.real() - mi);
    sq += (s.imag() - mq) * (s.imag() - mq);
    siq += (s.real() - mi) * (s.imag() - mq);
  }
  const double n = static_cast<double>(y.size());
  CHECK(std::abs(si / n - 0.02) < 0.001);
  CHECK(std::abs(sq / n - 0.02) < 0.001);
  // Covariance standard error is about 0.02 / sqrt(n).
  CHECK(std::abs(siq / n) < 3 * 0.02 / std::sqrt(n));
}

TEST_CASE("awgn is reproducible and adds n0 of energy") {
  Rng rng(2);
  const auto x = testing::random_points(50'000, rng, 0.5);
  const auto a = awgn_apply(x, {0.1, 42});
  const auto b = awgn_apply(x, {0.1, 42});
  CHECK(a == b);
  CHECK(awgn_apply(x, {0.1, 43}) != a);
  double ein = 0, eout = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ein += energy(x[i]);
    eout += energy(a[i]);
  }
  CHECK(std::abs((eout - ein) / x.size() - 0.1) < 0.005);

  // Position p always receives the p-th noise pair.
  const std::vector<IQSymbol> head(x.begin(), x.begin() + 10);
  const auto h = awgn_apply(head, {0.1, 42});
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == a[i]);
}

TEST_CASE("rng streams") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.below(7) < 7);
  }
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));

  Rng g(17);
  double s = 0, s2 = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("fir filter") {
  Rng rng(4);
  const auto x = testing::random_points(64, rng);
  CHECK(fir_apply(x, {{1.0}}) == x);
  const auto d = fir_apply(x, {{0.0, 1.0}});
  CHECK(d[0] == IQSymbol{});
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(d[i] == x[i - 1]);

  const MultipathSpec mp{{{0.9, 0.1}, {0.3, -0.2}, {-0.1, 0.05}}};
  const auto y = fir_apply(x, mp);
  for (std::size_t m = 0; m < x.size(); ++m) {
    std::complex<double> acc{};
    for (std::size_t k = 0; k < mp.taps.size(); ++k) {
      if (m >= k) acc += mp.taps[k] * x[m - k];
    }
    CHECK(std::abs(y[m] - acc) < 1e-12);
  }
  CHECK_THROWS_AS(fir_apply(x, {{}}), InputError);
}

TEST_CASE("lms equalizer") {
  Rng rng(8);
  std::vector<IQSymbol> ref(4000);
  for (auto& s : ref) s = {rng.bit() ? 0.7 : -0.7, rng.bit() ? 0.7 : -0.7};

  SUBCASE("identity channel converges to a unit tap") {
    const auto r = lms_train(ref, ref, 4, 0.01);
    CHECK(r.error_energy.back() < 1e-4);
    CHECK(std::abs(r.state.weights[0] - std::complex<double>(1.0)) < 1e-2);
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(r.state.weights[k]) < 1e-2);
  }
  SUBCASE("zero step leaves weights untouched") {
    const auto r = lms_train(ref, ref, 3, 0.0);
    for (const auto& w : r.state.weights) CHECK(w == std::complex<double>{});
    for (std::size_t m = 0; m < ref.size(); ++m) CHECK(r.error_energy[m] == doctest::Approx(energy(ref[m])));
  }
  SUBCASE("two-tap channel improves over training") {
    const auto x = fir_apply(ref, {{1.0, 0.5}});
    const auto r = lms_train(x, ref, 6, 0.01);
    const std::size_t tenth = ref.size() / 10;
    double first = 0, last = 0;
    for (std::size_t i = 0; i < tenth; ++i) {
      first += r.error_energy[i];
      last += r.error_energy[ref.size() - 1 - i];
    }
    CHECK(last < first);

    // Least-squares slope of the error trace is not positive.
    const double n = static_cast<double>(r.error_energy.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < r.error_energy.size(); ++i) {
      sx += i;
      sy += r.error_energy[i];
      sxy += i * r.error_energy[i];
      sxx += static_cast<double>(i) * i;
    }
    CHECK((n * sxy - sx * sy) / (n * sxx - sx * sx) <= 0.0);
  }
  SUBCASE("divergence is reported with its step") {
    const auto x = fir_apply(ref, {{1.0, 0.5}});
    try {
      lms_train(x, ref, 8, 50.0);
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.step() < ref.size());
    }
  }
  CHECK_THROWS_AS(lms_train(ref, std::span(ref).first(10), 2, 0.01), InputError);
  CHECK_THROWS_AS(lms_train(ref, ref, 0, 0.01), InputError);
}
