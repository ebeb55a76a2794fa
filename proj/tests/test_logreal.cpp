#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "logperm/logreal.hpp"

using namespace logperm;

namespace {

// Bit-exact comparison of doubles (including -inf vs -inf).
bool same_bits(double a, double b) {
  std::uint64_t ua, ub;
  std::memcpy(&ua, &a, 8);
  std::memcpy(&ub, &b, 8);
  return ua == ub;
}

}  // namespace

TEST_CASE("LogReal construction and accessors") {
  auto z = LogReal::zero();
  CHECK(z.is_zero());
  CHECK(z.log() == kNegInf);
  CHECK(z.linear() == 0.0);

  auto one = LogReal::one();
  CHECK(one.log() == 0.0);
  CHECK(one.linear() == 1.0);

  auto x = LogReal::from_linear(2.5);
  CHECK(x.log() == doctest::Approx(std::log(2.5)).epsilon(1e-15));

  CHECK(LogReal::from_linear(0.0).is_zero());
  CHECK_THROWS_AS(LogReal::from_linear(-1.0), NumericError);
  CHECK_THROWS_AS(LogReal::from_log(std::nan("")), NumericError);
  CHECK_THROWS_AS(LogReal::from_log(HUGE_VAL), NumericError);
}

TEST_CASE("LogReal multiply and pow") {
  auto a = LogReal::from_linear(3.0);
  auto b = LogReal::from_linear(4.0);
  CHECK((a * b).log() == doctest::Approx(std::log(12.0)).epsilon(1e-15));
  CHECK((a * LogReal::zero()).is_zero());
  CHECK((LogReal::zero() * a).is_zero());
  CHECK(a.pow(3).log() == doctest::Approx(3 * std::log(3.0)).epsilon(1e-15));
  CHECK(LogReal::zero().pow(5).is_zero());
  CHECK(LogReal::zero().pow(0).log() == 0.0);  // empty product
}

TEST_CASE("log_add basic identities") {
  // log(1 + 1) = log 2
  CHECK(log_add_raw(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // Adding zero is the identity.
  CHECK(same_bits(log_add_raw(kNegInf, 3.25), 3.25));
  CHECK(same_bits(log_add_raw(3.25, kNegInf), 3.25));
  CHECK(log_add_raw(kNegInf, kNegInf) == kNegInf);
  // Huge magnitude gap: the small term vanishes entirely, no overflow.
  CHECK(log_add_raw(10000.0, 0.0) == 10000.0);
  CHECK(log_add_raw(0.0, 10000.0) == 10000.0);
  CHECK(log_add_raw(-10000.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("log_add is commutative bit-for-bit") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> mag(-700.0, 700.0);
  for (int i = 0; i < 10000; ++i) {
    double a = mag(gen), b = mag(gen);
    CHECK(same_bits(log_add_raw(a, b), log_add_raw(b, a)));
  }
}

TEST_CASE("log_sum matches frozen small-value oracle") {
  // sum = e^0 + e^-50 + e^-100.  e^-50 = 1.9287498479639178e-22, so the
  // result must sit that far above 0 rather than collapsing to the max.
  std::vector<double> v{0.0, -50.0, -100.0};
  double r = log_sum_raw(v);
  CHECK(r > 0.0);
  CHECK(r == doctest::Approx(1.9287498479639178e-22).epsilon(1e-12));
}

TEST_CASE("log_sum edge cases and max-dominance") {
  std::vector<double> empty;
  CHECK(log_sum_raw(empty) == kNegInf);
  std::vector<double> allz{kNegInf, kNegInf};
  CHECK(log_sum_raw(allz) == kNegInf);
  std::vector<double> single{-3.5};
  CHECK(log_sum_raw(single) == -3.5);

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> mag(-600.0, 600.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + gen() % 40);
    for (auto& x : v) x = mag(gen);
    double m = *std::max_element(v.begin(), v.end());
    double s = log_sum_raw(v);
    CHECK(s >= m);  // a sum of positives is at least its largest term
    double n = std::log(static_cast<double>(v.size()));
    CHECK(s <= m + n + 1e-12);
  }
}

TEST_CASE("log_add chains agree with log_sum") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mag(-100.0, 100.0);
  for (int rep = 0; rep < 10000; ++rep) {
    double a = mag(gen), b = mag(gen), c = mag(gen);
    std::vector<double> v{a, b, c};
    double chained = log_add_raw(log_add_raw(a, b), c);
    double summed = log_sum_raw(v);
    CHECK(std::fabs(chained - summed) <=
          1e-12 * std::max(1.0, std::fabs(summed)));
  }
}

TEST_CASE("log_sum is permutation-stable") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(50);
    for (auto& x : v) x = mag(gen);
    double base = log_sum_raw(v);
    for (int sh = 0; sh < 10; ++sh) {
      std::shuffle(v.begin(), v.end(), gen);
      double again = log_sum_raw(v);
      CHECK(std::fabs(again - base) <= 1e-9 * std::max(1.0, std::fabs(base)));
    }
  }
}

TEST_CASE("KahanSum compensates catastrophic cancellation") {
  // Classic Neumaier case: naive and plain-Kahan summation both return 0.
  KahanSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.total() == 2.0);
}

TEST_CASE("signed accumulation: exact cancellation and simple differences") {
  {
    std::vector<SignedLogReal> terms{{+1, 2.5}, {-1, 2.5}};
    auto r = signed_accumulate(terms);
    CHECK(r.sign == 0);
    CHECK(r.logmag == kNegInf);
  }
  {
    // 5 - 3 = 2
    std::vector<SignedLogReal> terms{{+1, std::log(5.0)}, {-1, std::log(3.0)}};
    auto r = signed_accumulate(terms);
    CHECK(r.sign == +1);
    CHECK(r.logmag == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  {
    // -7 + 4 = -3
    std::vector<SignedLogReal> terms{{-1, std::log(7.0)}, {+1, std::log(4.0)}};
    auto r = signed_accumulate(terms);
    CHECK(r.sign == -1);
    CHECK(r.logmag == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
  {
    std::vector<SignedLogReal> terms;
    auto r = signed_accumulate(terms);
    CHECK(r.sign == 0);
  }
}

TEST_CASE("signed accumulation: alternating factorial series for 1/e") {
  // sum_{k=0}^{20} (-1)^k / k!  ==  e^{-1} up to ~1/21! < 2e-20.
  std::vector<SignedLogReal> terms;
  for (int k = 0; k <= 20; ++k) {
    terms.push_back({(k % 2 == 0) ? +1 : -1, -std::lgamma(k + 1.0)});
  }
  auto r = signed_accumulate(terms);
  CHECK(r.sign == +1);
  CHECK(r.logmag == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("signed accumulation matches extended-precision oracle") {
  // Random signed terms; long double (64-bit mantissa) linear sum is the
  // oracle.  Only judge cases where the accumulator's accuracy contract
  // applies: |result| >= 1e-7 * largest |term|.
  std::mt19937_64 gen(31415);
  std::uniform_real_distribution<double> mag(-30.0, 30.0);
  int judged = 0;
  for (int rep = 0; rep < 400; ++rep) {
    std::size_t n = 2 + gen() % 60;
    std::vector<SignedLogReal> terms(n);
    double maxmag = kNegInf;
    for (auto& t : terms) {
      t.sign = (gen() & 1) ? +1 : -1;
      t.logmag = mag(gen);
      maxmag = std::max(maxmag, t.logmag);
    }
    long double acc = 0.0L;
    for (const auto& t : terms) {
      acc += static_cast<long double>(t.sign) * std::exp(static_cast<long double>(t.logmag) - maxmag);
    }
    auto r = signed_accumulate(terms);
    long double absacc = acc < 0 ? -acc : acc;
    if (absacc < 1e-7L) continue;  // outside the accuracy contract
    ++judged;
    int want_sign = acc > 0 ? +1 : -1;
    double want_log = static_cast<double>(std::log(absacc)) + maxmag;
    CHECK(r.sign == want_sign);
    CHECK(std::fabs(r.logmag - want_log) <= 1e-9 * std::max(1.0, std::fabs(want_log)));
  }
  CHECK(judged > 300);  // the contract regime must dominate the sample
}

TEST_CASE("signed accumulation is permutation-stable") {
  std::mt19937_64 gen(555);
  std::uniform_real_distribution<double> mag(-40.0, 40.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<SignedLogReal> terms(30);
    for (auto& t : terms) {
      t.sign = (gen() & 1) ? +1 : -1;
      t.logmag = mag(gen);
    }
    auto base = signed_accumulate(terms);
    if (base.sign == 0 || base.logmag < mag.a()) continue;
    for (int sh = 0; sh < 8; ++sh) {
      std::shuffle(terms.begin(), terms.end(), gen);
      auto again = signed_accumulate(terms);
      CHECK(again.sign == base.sign);
      CHECK(std::fabs(again.logmag - base.logmag) <=
            1e-9 * std::max(1.0, std::fabs(base.logmag)));
    }
  }
}

TEST_CASE("SignedAccumulator streaming matches two-pass helper") {
  std::mt19937_64 gen(8080);
  std::uniform_real_distribution<double> mag(-200.0, 200.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<SignedLogReal> terms(25);
    for (auto& t : terms) {
      t.sign = (gen() & 1) ? +1 : -1;
      t.logmag = mag(gen);
    }
    SignedAccumulator acc;
    for (const auto& t : terms) acc.add(t.sign, t.logmag);
    auto streamed = acc.total();
    auto batch = signed_accumulate(terms);
    CHECK(streamed.sign == batch.sign);
    if (streamed.sign != 0) {
      CHECK(std::fabs(streamed.logmag - batch.logmag) <=
            1e-9 * std::max(1.0, std::fabs(batch.logmag)));
    }
  }
}

TEST_CASE("SignedLogReal normalizes and converts") {
  SignedLogReal a(+1, kNegInf);
  CHECK(a.sign == 0);
  auto b = SignedLogReal::from_linear(-2.0);
  CHECK(b.sign == -1);
  CHECK(b.logmag == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  auto c = SignedLogReal::from_linear(0.0);
  CHECK(c.sign == 0);
}
