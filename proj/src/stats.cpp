#include "schnapsen/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace schnapsen {

double normal_cdf(double z) {
  if (z == 0.0) return 0.5;  // exact, and keeps 2*(1 - Phi(0)) at exactly 1
  if (z < 0.0) return 1.0 - normal_cdf(-z);
  // Abramowitz & Stegun, Handbook of Mathematical Functions, eq. 26.2.17.
  constexpr double p = 0.2316419;
  constexpr double b1 = 0.319381530;
  constexpr double b2 = -0.356563782;
  constexpr double b3 = 1.781477937;
  constexpr double b4 = -1.821255978;
  constexpr double b5 = 1.330274429;
  const double t = 1.0 / (1.0 + p * z);
  const double density =
      std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
  const double poly = t * (b1 + t * (b2 + t * (b3 + t * (b4 + t * b5))));
  return 1.0 - density * poly;
}

char verdict_letter(Verdict v) {
  switch (v) {
    case Verdict::Better: return 'B';
    case Verdict::Worse: return 'W';
    case Verdict::Equal: return 'E';
  }
  return '?';
}

ZResult z_test(std::int64_t wins, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("z_test needs at least one game");
  if (wins < 0 || wins > n)
    throw std::invalid_argument("win count outside [0, n]");
  ZResult r;
  r.p_hat = static_cast<double>(wins) / static_cast<double>(n);
  r.se = std::sqrt(0.25 / static_cast<double>(n));
  r.z = (r.p_hat - 0.5) / r.se;
  const double two_tailed = 2.0 * (1.0 - normal_cdf(std::abs(r.z)));
  r.p_value = two_tailed < 0.0 ? 0.0 : (two_tailed > 1.0 ? 1.0 : two_tailed);
  if (r.p_hat > 0.5 && r.p_value < 0.05)
    r.verdict = Verdict::Better;
  else if (r.p_hat < 0.5 && r.p_value < 0.05)
    r.verdict = Verdict::Worse;
  else
    r.verdict = Verdict::Equal;
  return r;
}

}  // namespace schnapsen
