#pragma once

namespace adaprod {

/// Scaled complementary error function exp(x^2) * erfc(x) for x >= 0.
double erfcx(double x);

/// Standard normal cdf.
double normal_cdf(double x);

/// E[clamp(mu + sigma * Z, 0, 1)] for Z standard normal.
double clamped_gaussian_mean(double mu, double sigma);

/// log of the evidence integral int_0^{1/2} 2 exp(eta R - eta^2 V) d eta,
/// evaluated in closed form through erf/erfcx so that large R and V do
/// not overflow. V >= 0.
double log_rate_integral(double R, double V);

}  // namespace adaprod
