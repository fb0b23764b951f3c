#include <doctest.h>

#include <sstream>

#include "echomod/channel.hpp"
#include "echomod/modem.hpp"
#include "support.hpp"

using namespace echomod;

namespace {

const double kA = 1.0 / std::sqrt(2.0);

void check_point(IQSymbol got, double i, double q) {
  CHECK(got.real() == doctest::Approx(i).epsilon(1e-12));
  CHECK(got.imag() == doctest::Approx(q).epsilon(1e-12));
}

}  // namespace

TEST_CASE("bit words") {
  const BitWord w = BitWord::parse("0110");
  CHECK(w.value() == 6);
  CHECK(w.length() == 4);
  CHECK(w.bit(0) == 0);
  CHECK(w.bit(1) == 1);
  CHECK(w.bipolar(0) == -1.0);
  CHECK(w.bipolar(2) == 1.0);
  CHECK(w.to_string() == "0110");
  CHECK_THROWS_AS(BitWord::parse("012"), InputError);
  CHECK_THROWS_AS(BitWord::parse("10101"), InputError);
  CHECK_THROWS_AS(BitWord(4, 2), InputError);
}

TEST_CASE("hamming distance") {
  CHECK(hamming(BitWord::parse("0011"), BitWord::parse("1010")) == 2);
  CHECK(hamming(BitWord::parse("0000"), BitWord::parse("1111")) == 4);
  for (unsigned v = 0; v < 16; ++v) CHECK(hamming(BitWord(v, 4), BitWord(v, 4)) == 0);
  CHECK_THROWS_AS(hamming(BitWord::parse("01"), BitWord::parse("011")), InputError);
}

TEST_CASE("standard constellation coordinates") {
  const auto qpsk = standard_constellation(Scheme::qpsk);
  check_point(qpsk.point(BitWord::parse("00")), -kA, -kA);
  check_point(qpsk.point(BitWord::parse("11")), kA, kA);

  const auto qam = standard_constellation(Scheme::qam16);
  check_point(qam.point(BitWord::parse("0000")), -kA, kA);

  const auto psk = standard_constellation(Scheme::psk8);
  check_point(psk.point(BitWord::parse("111")), 1.0, 0.0);
  for (const auto& p : psk.points()) CHECK(std::abs(p) == doctest::Approx(1.0));

  const double b = 1.0 / (3.0 * std::sqrt(2.0));
  for (const auto& p : qam.points()) {
    for (double c : {p.real(), p.imag()}) {
      CHECK((std::abs(std::abs(c) - kA) < 1e-12 || std::abs(std::abs(c) - b) < 1e-12));
    }
  }
}

TEST_CASE("standard constellations are Gray coded") {
  for (Scheme s : {Scheme::qpsk, Scheme::psk8, Scheme::qam16}) {
    const auto c = standard_constellation(s);
    double dmin = 1e9;
    for (std::size_t i = 0; i < c.order(); ++i) {
      for (std::size_t j = i + 1; j < c.order(); ++j) dmin = std::min(dmin, std::abs(c.points()[i] - c.points()[j]));
    }
    for (std::size_t i = 0; i < c.order(); ++i) {
      for (std::size_t j = i + 1; j < c.order(); ++j) {
        if (std::abs(c.points()[i] - c.points()[j]) < dmin * (1 + 1e-9)) {
          CHECK(hamming(c.word(i), c.word(j)) == 1);
        }
      }
    }
  }
}

TEST_CASE("modulate") {
  const auto qpsk = standard_constellation(Scheme::qpsk);
  const std::vector<BitWord> words = {BitWord::parse("00"), BitWord::parse("11")};
  const auto syms = modulate(words, qpsk);
  REQUIRE(syms.size() == 2);
  check_point(syms[0], -kA, -kA);
  check_point(syms[1], kA, kA);
  CHECK(modulate({}, qpsk).empty());
  const std::vector<BitWord> same(5, BitWord::parse("01"));
  for (const auto& s : modulate(same, qpsk)) CHECK(s == qpsk.point(BitWord::parse("01")));
  const std::vector<BitWord> wrong = {BitWord::parse("010")};
  CHECK_THROWS_AS(modulate(wrong, qpsk), InputError);
}

TEST_CASE("coherent demodulation") {
  const auto qpsk = standard_constellation(Scheme::qpsk);
  CHECK(demod_coherent({0.6, 0.9}, qpsk) == BitWord::parse("11"));

  for (Scheme s : {Scheme::qpsk, Scheme::psk8, Scheme::qam16}) {
    const auto c = standard_constellation(s);
    for (std::size_t w = 0; w < c.order(); ++w) CHECK(demod_coherent(c.points()[w], c) == c.word(w));
  }

  // Exhaustive scan with smallest-word tie-break.
  Rng rng(7);
  for (Scheme s : {Scheme::qpsk, Scheme::psk8, Scheme::qam16}) {
    const auto c = standard_constellation(s);
    const CoherentDemodulator fast(c);
    for (int t = 0; t < 2000; ++t) {
      const IQSymbol q{rng.normal(), rng.normal()};
      std::size_t best = 0;
      for (std::size_t w = 1; w < c.order(); ++w) {
        if (std::norm(q - c.points()[w]) < std::norm(q - c.points()[best])) best = w;
      }
      CHECK(demod_coherent(q, c) == c.word(best));
      CHECK(fast(q) == c.word(best));
    }
  }
  // Exact tie between 00 and 01 at the origin of the imaginary axis.
  CHECK(demod_coherent({-kA, 0.0}, qpsk) == BitWord::parse("00"));
}

TEST_CASE("mean symbol energy") {
  CHECK(mean_symbol_energy(standard_constellation(Scheme::qpsk)) == doctest::Approx(1.0));
  CHECK(mean_symbol_energy(standard_constellation(Scheme::psk8)) == doctest::Approx(1.0));
  CHECK(mean_symbol_energy(standard_constellation(Scheme::qam16)) == doctest::Approx(5.0 / 9.0));
}

TEST_CASE("Eb/N0 conversion table for 16-QAM") {
  const auto qam = standard_constellation(Scheme::qam16);
  const double n0[] = {0.01, 0.04, 0.09, 0.16};
  const double db[] = {11.43, 5.41, 1.88, -0.61};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ebn0_db(n0[i], qam) - db[i]) < 0.005 + 1e-9);
  double prev = 1e9;
  for (double n = 0.001; n < 1.0; n *= 1.3) {
    const double d = ebn0_db(n, qam);
    CHECK(d < prev);
    prev = d;
    CHECK(n0_for_ebn0(d, 5.0 / 9.0, 4) == doctest::Approx(n).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ebn0_db(0.0, qam), InputError);
  CHECK_THROWS_AS(ebn0_db(-1.0, qam), InputError);
}

TEST_CASE("closed-form BER against reference curve values") {
  struct Row { Scheme s; double db; double ber; };
  const Row rows[] = {
      {Scheme::qpsk, 0, 0.0786496},   {Scheme::qpsk, 4, 0.0125008},
      {Scheme::qpsk, 6, 0.00238829},  {Scheme::qpsk, 8, 1.90908e-4},
      {Scheme::psk8, 4, 0.0458949},   {Scheme::psk8, 8, 0.00618106},
      {Scheme::psk8, 10, 1.011e-3},   {Scheme::qam16, 4, 0.0586237},
      {Scheme::qam16, 6, 0.0278713},  {Scheme::qam16, 8, 0.00924721},
      {Scheme::qam16, 10, 0.00175415},
  };
  for (const auto& r : rows) {
    CAPTURE(r.db);
    CHECK(testing::rel_close(theoretical_ber(r.s, r.db), r.ber, 2e-3));
  }
  CHECK(gaussian_q(0.0) == doctest::Approx(0.5));
  CHECK(gaussian_q(1.0) == doctest::Approx(0.158655253931457).epsilon(1e-12));
}

TEST_CASE("closed-form BER agrees with Monte Carlo") {
  for (Scheme s : {Scheme::qpsk, Scheme::psk8, Scheme::qam16}) {
    const auto c = standard_constellation(s);
    const CoherentDemodulator demod(c);
    const unsigned bits = c.bits_per_symbol();
    for (double db = 0; db <= 10; db += 2) {
      const double expect = theoretical_ber(s, db);
      if (expect < 1e-4) continue;
      const std::size_t n = 1'000'000;
      Rng rng(derive_seed(99, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(db)}));
      std::vector<BitWord> words = testing::random_words(n, bits, rng);
      std::vector<IQSymbol> rx = modulate(words, c);
      awgn_apply_inplace(rx, n0_for_ebn0(db, mean_symbol_energy(c), bits), rng);
      std::uint64_t errors = 0;
      for (std::size_t i = 0; i < n; ++i) errors += hamming(words[i], demod(rx[i]));
      const double ber = static_cast<double>(errors) / static_cast<double>(n * bits);
      CAPTURE(db);
      CHECK(testing::rel_close(ber, expect, 0.10));
    }
  }
}

TEST_CASE("constellation dump round trip") {
  Rng rng(3);
  std::vector<IQSymbol> pts = testing::random_points(16, rng);
  const Constellation c(pts);
  const std::string text = to_dump(c);
  CHECK(text.substr(0, 5) == "0000,");
  const Constellation back = parse_dump(text);
  CHECK(back == c);
  CHECK(to_dump(back) == text);
}

TEST_CASE("constellation dump errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_dump(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("00,1,0\n01,0,1\n10,x,0\n11,0,0\n") == 3);
  CHECK(line_of("00,1,0\n01,0,1\n01,0,0\n11,0,0\n") == 3);
  CHECK(line_of("00,1,0\n011,0,1\n") == 2);
  CHECK(line_of("# comment\n\n00,1\n") == 3);
  CHECK(line_of("00,1,0\n01,0,1\n10,0,nan\n11,0,0\n") == 3);
  CHECK(line_of("00,1,0\n01,0,1\n") == 2);
  CHECK(line_of("") == 0 + 0);  // empty input: reported at line 0
  CHECK_THROWS_AS(parse_dump(""), ParseError);
  CHECK_NOTHROW(parse_dump("# learned\n0,1,0\n1,-1,0\n"));
}

TEST_CASE("constellation validation") {
  CHECK_THROWS_AS(Constellation(std::vector<IQSymbol>(3)), InputError);
  CHECK_THROWS_AS(Constellation(std::vector<IQSymbol>(32)), InputError);
  CHECK_THROWS_AS(parse_scheme("64qam"), InputError);
  CHECK(parse_scheme("QAM16") == Scheme::qam16);
}
