#include "fbq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fbq {

double normal_sample(std::mt19937_64& rng, double mean, double stddev) {
  double u1 = uniform_double(rng);
  double u2 = uniform_double(rng);
  while (u1 <= 0.0) u1 = uniform_double(rng);  // guard log(0)
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

namespace {

std::int64_t poisson_inversion(std::mt19937_64& rng, double mean) {
  // Sequential search on the CDF; fine for mean <= ~10.
  double p = std::exp(-mean);
  double cdf = p;
  double u = uniform_double(rng);
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (k > 2000) break;  // cdf has saturated numerically
  }
  return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS. Valid for mean >= 10.
std::int64_t poisson_ptrs(std::mt19937_64& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = uniform_double(rng) - 0.5;
    double v = uniform_double(rng);
    double us = 0.5 - std::abs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace

std::int64_t poisson_sample(std::mt19937_64& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson_sample: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(rng, mean);
  return poisson_ptrs(rng, mean);
}

}  // namespace fbq
