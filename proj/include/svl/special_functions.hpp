#pragma once

#include <cmath>
#include <stdexcept>

// log-gamma, digamma and trigamma for x > 0, accurate to ~1e-13 relative
// over [1e-3, 1e3]. Self-contained so the numeric core has no external
// math dependency.

namespace svl {

// Lanczos approximation, g = 7, 9 terms.
// https://en.wikipedia.org/wiki/Lanczos_approximation
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
  static const double c[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  double a = c[0];
  for (int k = 1; k < 9; ++k) a += c[k] / (x - 1.0 + k);
  const double t = x + 6.5;
  return 0.91893853320467274178  // ln sqrt(2 pi)
         + (x - 0.5) * std::log(t) - t + std::log(a);
}

// Upward recurrence to x >= 12, then the Bernoulli asymptotic series.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  // B_2/(2 x^2) + B_4/(4 x^4) + ... through B_14
  const double series =
      r * (1.0 / 12.0 +
           r * (-1.0 / 120.0 +
                r * (1.0 / 252.0 +
                     r * (-1.0 / 240.0 +
                          r * (1.0 / 132.0 +
                               r * (-691.0 / 32760.0 + r * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 / x - series;
}

inline double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: requires x > 0");
  double acc = 0.0;
  while (x < 12.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  // 1/x + 1/(2x^2) + B_2/x^3 + B_4/x^5 + ... through B_14
  const double series =
      1.0 / 6.0 +
      r * (-1.0 / 30.0 +
           r * (1.0 / 42.0 +
                r * (-1.0 / 30.0 +
                     r * (5.0 / 66.0 +
                          r * (-691.0 / 2730.0 + r * (7.0 / 6.0))))));
  return acc + 1.0 / x + 0.5 * r + series * r / x;
}

}  // namespace svl
