#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "schnapsen/stats.hpp"
#include "test_util.hpp"

namespace schnapsen::test {

TEST_SUITE("stats") {

TEST_CASE("normal_cdf: reference values to 1e-7") {
  // References computed independently from the error function at double
  // precision; the in-repo approximation is documented to 7.5e-8.
  const struct { double z, phi; } pins[] = {
      {0.0, 0.5},
      {0.5, 0.69146246127401312},
      {-0.5, 0.30853753872598688},
      {1.0, 0.84134474606854293},
      {-1.0, 0.15865525393145707},
      {1.96, 0.97500210485177963},
      {-1.96, 0.024997895148220428},
      {2.58, 0.99505998424222941},
      {-2.58, 0.0049400157577706438},
      {4.0, 0.99996832875816688},
      {-4.0, 3.1671241833119979e-05},
  };
  for (const auto& pin : pins) {
    INFO("z = ", pin.z);
    CHECK(std::abs(normal_cdf(pin.z) - pin.phi) <= 1e-7);
  }
}

TEST_CASE("normal_cdf: monotone, complementary, saturating") {
  double prev = -1.0;
  for (double z = -6.0; z <= 6.0; z += 0.125) {
    const double phi = normal_cdf(z);
    CHECK(phi > 0.0 - 1e-12);
    CHECK(phi < 1.0 + 1e-12);
    CHECK(phi >= prev - 1e-9);  // nondecreasing up to approximation jitter
    prev = phi;
  }
  for (const double z : {0.3, 1.7, 2.2, 3.9}) {
    CHECK(std::abs(normal_cdf(z) + normal_cdf(-z) - 1.0) <= 1e-15);
  }
  CHECK(normal_cdf(100.0) == 1.0);
  CHECK(normal_cdf(-100.0) == 0.0);
}

TEST_CASE("z_test: exact null at (5000, 10000)") {
  const ZResult r = z_test(5000, 10000);
  CHECK(r.p_hat == 0.5);
  CHECK(r.se == 0.005);  // sqrt(0.25/10000) lands on the literal exactly
  CHECK(r.z == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(r.verdict == Verdict::Equal);
}

TEST_CASE("z_test: pinned 57.21% and 49.00% rows") {
  const ZResult better = z_test(5721, 10000);
  CHECK(std::abs(better.z - 14.42) <= 0.01);
  CHECK(std::abs(better.z - 14.42000000000001) <= 1e-9);
  CHECK(better.p_value < 1e-12);
  CHECK(better.verdict == Verdict::Better);

  const ZResult worse = z_test(4900, 10000);
  CHECK(std::abs(worse.z - (-2.0)) <= 1e-9);
  CHECK(std::abs(worse.p_value - 0.04550026389635842) <= 2e-7);
  CHECK(worse.verdict == Verdict::Worse);
}

TEST_CASE("z_test: alpha boundary is strict") {
  // n=10,000: wins=5098 puts z at 1.96 (p just under 0.05), 5097 at 1.94.
  CHECK(z_test(5098, 10000).verdict == Verdict::Better);
  CHECK(z_test(5098, 10000).p_value < 0.05);
  CHECK(z_test(5097, 10000).verdict == Verdict::Equal);
  CHECK(z_test(5097, 10000).p_value > 0.05);
  CHECK(z_test(10000 - 5098, 10000).verdict == Verdict::Worse);
}

TEST_CASE("z_test: mirror symmetry between w and n-w") {
  const long ns[] = {1, 7, 100, 10000};
  for (const long n : ns) {
    for (long w = 0; w <= n; w += (n < 10 ? 1 : n / 7)) {
      const ZResult a = z_test(w, n);
      const ZResult b = z_test(n - w, n);
      CHECK(std::abs(a.z + b.z) <= 1e-9);
      CHECK(std::abs(a.p_value - b.p_value) <= 1e-9);
      CHECK(std::abs(a.p_hat + b.p_hat - 1.0) <= 1e-15);
      const bool swapped =
          (a.verdict == Verdict::Better && b.verdict == Verdict::Worse) ||
          (a.verdict == Verdict::Worse && b.verdict == Verdict::Better) ||
          (a.verdict == Verdict::Equal && b.verdict == Verdict::Equal);
      CHECK(swapped);
    }
  }
}

TEST_CASE("z_test: extremes and input validation") {
  const ZResult sweep = z_test(10000, 10000);
  CHECK(sweep.p_hat == 1.0);
  CHECK(sweep.p_value == 0.0);
  CHECK(sweep.verdict == Verdict::Better);

  const ZResult single = z_test(0, 1);
  CHECK(single.z == doctest::Approx(-1.0));
  CHECK(single.verdict == Verdict::Equal);  // one game proves nothing

  CHECK_THROWS_AS(z_test(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(z_test(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(z_test(11, 10), std::invalid_argument);
}

TEST_CASE("verdict letters") {
  CHECK(verdict_letter(Verdict::Better) == 'B');
  CHECK(verdict_letter(Verdict::Worse) == 'W');
  CHECK(verdict_letter(Verdict::Equal) == 'E');
}

}  // TEST_SUITE

}  // namespace schnapsen::test
