#pragma once

#include <cstdint>

namespace schnapsen {

// Standard normal CDF via the Abramowitz & Stegun 26.2.17 rational
// approximation, implemented in-repo so results are reproducible to
// |error| <= 7.5e-8 independent of the platform math library.
double normal_cdf(double z);

enum class Verdict { Better, Worse, Equal };

char verdict_letter(Verdict v);  // 'B', 'W', 'E'

struct ZResult {
  double p_hat = 0.0;    // wins / n
  double se = 0.0;       // sqrt(0.25 / n), the null-hypothesis standard error
  double z = 0.0;        // (p_hat - 0.5) / se
  double p_value = 1.0;  // two-tailed: 2 (1 - Phi(|z|)), clamped into [0, 1]
  Verdict verdict = Verdict::Equal;
};

// One-sample two-tailed Z-test of a win count against the 50% null at
// alpha = 0.05. Throws std::invalid_argument when n < 1 or wins is outside
// [0, n].
ZResult z_test(std::int64_t wins, std::int64_t n);

}  // namespace schnapsen
