#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tbma/errors.hpp"
#include "tbma/modem.hpp"

using namespace tbma;

namespace {

// Direct evaluation of the tone formula, independent of the ToneFamily table.
double tone_oracle(int m, int n, int big_n, double amp) {
  return amp * std::sqrt(2.0 / big_n) *
         std::cos(std::numbers::pi * (2.0 * m + 1.0) * n / (2.0 * big_n));
}

}  // namespace

TEST_CASE("tone table matches the closed form") {
  for (int big_n : {2, 5, 32}) {
    const ToneFamily fam(big_n, 1.7);
    for (int m = 0; m < big_n; ++m) {
      for (int n = 0; n < big_n; ++n) {
        CHECK(fam.at(m, n) == doctest::Approx(tone_oracle(m, n, big_n, 1.7)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("mfsk_modulate examples") {
  const ToneFamily fam2(2);
  const auto w = mfsk_modulate(0, fam2);
  REQUIRE(w.size() == 2);
  CHECK(w.samples[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.samples[1] == doctest::Approx(0.70710678118654752).epsilon(1e-14));
  CHECK(w.amplitude == 1.0);

  const ToneFamily fam(16, 2.0);
  for (int m = 0; m < 16; ++m) {
    CHECK(mfsk_modulate(m, fam).samples[0] ==
          doctest::Approx(2.0 * std::sqrt(2.0 / 16)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(mfsk_modulate(16, fam), IndexError);
  CHECK_THROWS_AS(mfsk_modulate(-1, fam), IndexError);
}

TEST_CASE("waveform energy is A^2 (1 + 1/N) and the amplitude bound holds") {
  for (int big_n : {2, 8, 32, 256}) {
    for (double amp : {1.0, 0.5}) {
      const ToneFamily fam(big_n, amp);
      const double bound = amp * std::sqrt(2.0 / big_n);
      for (int m = 0; m < big_n; ++m) {
        double energy = 0.0;
        for (int n = 0; n < big_n; ++n) {
          const double z = tone_oracle(m, n, big_n, amp);
          energy += z * z;
          CHECK(std::abs(fam.at(m, n)) <= bound + 1e-15);
        }
        CHECK(energy == doctest::Approx(amp * amp * (1.0 + 1.0 / big_n)).epsilon(1e-12));
      }
      // Mean per-sample power used by the channel calibration.
      CHECK(fam.sample_power() ==
            doctest::Approx(amp * amp * (1.0 + 1.0 / big_n) / big_n).epsilon(1e-14));
    }
  }
}

TEST_CASE("Gram matrices: half-weighted identity, unweighted I + ones/N") {
  for (int big_n : {2, 8, 32, 256}) {
    const ToneFamily fam(big_n);
    double worst_weighted = 0.0;
    double worst_plain = 0.0;
    for (int a = 0; a < big_n; ++a) {
      for (int b = 0; b < big_n; ++b) {
        double weighted = 0.0;
        double plain = 0.0;
        for (int n = 0; n < big_n; ++n) {
          const double p = fam.at(a, n) * fam.at(b, n);
          plain += p;
          weighted += (n == 0 ? 0.5 : 1.0) * p;
        }
        const double eye = a == b ? 1.0 : 0.0;
        worst_weighted = std::max(worst_weighted, std::abs(weighted - eye));
        worst_plain = std::max(worst_plain, std::abs(plain - eye - 1.0 / big_n));
      }
    }
    CAPTURE(big_n);
    CHECK(worst_weighted < 1e-9);
    CHECK(worst_plain < 1e-9);
  }
}

TEST_CASE("mfsk_modulate is injective") {
  for (int big_n : {2, 3, 64, 1024}) {
    const ToneFamily fam(big_n);
    // Neighbouring levels are the closest pair; the tone at n = 1 differs by
    // a strictly positive amount for every m.
    for (int m = 0; m + 1 < big_n; ++m) {
      double max_diff = 0.0;
      for (int n = 0; n < big_n; ++n) {
        max_diff = std::max(max_diff, std::abs(fam.at(m, n) - fam.at(m + 1, n)));
      }
      CHECK(max_diff > 1e-12);
    }
  }
}

TEST_CASE("dsb_modulate") {
  const auto zero = dsb_modulate(0.0, 32, 8);
  for (double s : zero.samples) CHECK(s == 0.0);
  const auto one = dsb_modulate(1.0, 32, 8);
  CHECK(one.samples[0] == 1.0);
  CHECK(dsb_demodulate(one.samples, 8) == doctest::Approx(1.0).epsilon(1e-13));

  const auto neg = dsb_modulate(-0.5, 32, 8);
  const auto env = envelope_power(neg.samples, {Scheme::Dsb, 32, 1.0, 8});
  for (double p : env) CHECK(std::sqrt(p) == doctest::Approx(0.5).epsilon(1e-13));

  CHECK_THROWS_AS(dsb_modulate(std::nan(""), 32, 8), InputDomainError);
  CHECK_THROWS_AS(dsb_modulate(1.0, 32, 16), ConfigError);
  CHECK_THROWS_AS(dsb_modulate(1.0, 32, 0), ConfigError);
  CHECK_THROWS_AS(dsb_modulate(1.0, 1, 1), ConfigError);
}

TEST_CASE("dsb envelope agrees with an analytic-signal oracle") {
  // For a real passband symbol v cos(w n) the analytic signal is
  // v exp(i w n); build it from the sine quadrature and compare magnitudes.
  const int len = 64;
  const int c = 5;
  for (double v : {-2.0, -0.5, 0.3, 1.0}) {
    const auto w = dsb_modulate(v, len, c);
    const auto env = envelope_power(w.samples, {Scheme::Dsb, len, 1.0, c});
    for (int n = 0; n < len; ++n) {
      const double q = v * std::sin(2.0 * std::numbers::pi * c * n / len);
      const double mag2 = w.samples[n] * w.samples[n] + q * q;
      CHECK(env[n] == doctest::Approx(mag2).epsilon(1e-12));
    }
  }
}

TEST_CASE("envelope_power") {
  const ToneFamily fam(32);
  const auto w = mfsk_modulate(5, fam);
  const auto env = envelope_power(w.samples, {Scheme::Mfsk, 32, 1.0, 8});
  REQUIRE(env.size() == 32);
  for (double p : env) CHECK(p == 1.0 / 16.0);

  std::vector<double> stream;
  for (double v : {1.0, 2.0}) {
    const auto s = dsb_modulate(v, 16, 4);
    stream.insert(stream.end(), s.samples.begin(), s.samples.end());
  }
  const auto dsb_env = envelope_power(stream, {Scheme::Dsb, 16, 1.0, 4});
  for (int n = 0; n < 16; ++n) CHECK(dsb_env[n] == doctest::Approx(1.0).epsilon(1e-13));
  for (int n = 16; n < 32; ++n) CHECK(dsb_env[n] == doctest::Approx(4.0).epsilon(1e-13));

  stream.pop_back();
  CHECK_THROWS_AS(envelope_power(stream, {Scheme::Dsb, 16, 1.0, 4}), FramingError);
}

TEST_CASE("papr") {
  CHECK(papr_db(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
  CHECK(papr_db(std::vector<double>{1.0, 0.0}) == doctest::Approx(10.0 * std::log10(2.0)));
  CHECK_THROWS_AS(papr_db(std::vector<double>{0.0, 0.0}), DegenerateInputError);
  CHECK_THROWS_AS(papr_db(std::vector<double>{}), DegenerateInputError);
  CHECK_THROWS_AS(papr_db(std::vector<double>{1.0, -1.0}), InputDomainError);

  // Constant-amplitude DSB stream.
  std::vector<double> stream;
  for (int i = 0; i < 3; ++i) {
    const auto s = dsb_modulate(1.0, 16, 4);
    stream.insert(stream.end(), s.samples.begin(), s.samples.end());
  }
  CHECK(papr_db(envelope_power(stream, {Scheme::Dsb, 16, 1.0, 4})) == 0.0);
}

TEST_CASE("papr: MFSK streams are 0 dB, scaling does not change papr") {
  std::mt19937_64 rng(3);
  for (int big_n : {4, 32, 256}) {
    const ToneFamily fam(big_n);
    std::uniform_int_distribution<int> level(0, big_n - 1);
    std::vector<double> stream;
    for (int s = 0; s < 200; ++s) {
      const auto w = mfsk_modulate(level(rng), fam);
      stream.insert(stream.end(), w.samples.begin(), w.samples.end());
    }
    CHECK(papr_db(envelope_power(stream, {Scheme::Mfsk, big_n, 1.0, 1})) == 0.0);
  }
  std::vector<double> powers{0.3, 1.2, 0.7, 2.2};
  const double base = papr_db(powers);
  for (double& p : powers) p *= 17.0;
  CHECK(papr_db(powers) == doctest::Approx(base).epsilon(1e-12));
}
