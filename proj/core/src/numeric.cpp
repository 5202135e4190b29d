#include "adaprod/numeric.hpp"

#include <cmath>

namespace adaprod {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// log(erf(c) - erf(g)) for c > g >= 0, via erfcx to dodge the
// cancellation once both erf values saturate.
double log_erf_gap(double c, double g) {
  if (g == 0.0) return std::log(std::erf(c));
  double a = erfcx(g);
  double b = std::exp(g * g - c * c) * erfcx(c);
  return -g * g + std::log(a - b);
}
}  // namespace

double erfcx(double x) {
  if (x < 15.0) return std::exp(x * x + std::log(std::erfc(x)));
  // Asymptotic tail: erfcx(x) ~ (1/(x sqrt(pi))) (1 - q + 3q^2 - 15q^3 + ...)
  double q = 1.0 / (2.0 * x * x);
  double series = 1.0 + q * (-1.0 + q * (3.0 + q * (-15.0 + q * 105.0)));
  return series / (x * kSqrtPi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double clamped_gaussian_mean(double mu, double sigma) {
  if (sigma <= 0.0) return std::min(1.0, std::max(0.0, mu));
  const double a = (0.0 - mu) / sigma;
  const double b = (1.0 - mu) / sigma;
  const double sqrt_2pi = 2.5066282746310002;
  const double phi_a = std::exp(-0.5 * a * a) / sqrt_2pi;
  const double phi_b = std::exp(-0.5 * b * b) / sqrt_2pi;
  return (1.0 - normal_cdf(b)) + mu * (normal_cdf(b) - normal_cdf(a)) +
         sigma * (phi_a - phi_b);
}

double log_rate_integral(double R, double V) {
  if (V < 1e-12) {
    // int 2 e^{eta R} = 2 (e^{R/2} - 1) / R
    if (std::abs(R) < 1e-8) return std::log1p(R / 4.0);
    if (R > 0.0)
      return std::log(2.0 / R) + R / 2.0 + std::log(-std::expm1(-R / 2.0));
    return std::log(2.0 / -R) + std::log(-std::expm1(R / 2.0));
  }
  const double mu = R / (2.0 * V);
  if (mu > 0.5) {
    // Flip eta -> 1/2 - eta; the reflected integral peaks below zero.
    return R / 2.0 - V / 4.0 + log_rate_integral(V - R, V);
  }
  const double root_v = std::sqrt(V);
  const double c = root_v * (0.5 - mu);
  const double d = root_v * mu;
  const double prefix = std::log(kSqrtPi / root_v);
  if (d >= 0.0) {
    // Peak inside [0, 1/2]: both erf arguments non-negative.
    return prefix + d * d + std::log(std::erf(c) + std::erf(d));
  }
  // Peak left of zero: difference of erf values, g = |d| < c.
  return prefix + d * d + log_erf_gap(c, -d);
}

}  // namespace adaprod
