#include "aamec/rng.hpp"

#include <cmath>

namespace aamec::rng {

namespace {

std::uint64_t poisson_inversion(Stream& stream, double lambda) {
  // Knuth-style sequential search on the CDF, numerically stable form.
  const double l = std::exp(-lambda);
  double p = 1.0;
  std::uint64_t k = 0;
  do {
    ++k;
    p *= stream.next_double();
  } while (p > l);
  return k - 1;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS. Exact for lambda >= ~10.
std::uint64_t poisson_ptrs(Stream& stream, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = stream.next_double() - 0.5;
    const double v = stream.next_double();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * loglam - lambda - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t poisson(Stream& stream, double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda <= 30.0) return poisson_inversion(stream, lambda);
  return poisson_ptrs(stream, lambda);
}

}  // namespace aamec::rng
