#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Chain diagnostics: biased-normalization autocorrelations, effective sample
// size via Geyer's initial positive sequence, and type-7 sample quantiles.

namespace svl {

namespace detail {

// Treat rounding-level variance around the mean as a constant series.
inline bool degenerate_variance(double g0, double mean, std::size_t n) {
  return g0 <= 1e-24 * static_cast<double>(n) * (mean * mean + 1.0);
}

}  // namespace detail

// acf[k] = (1/n) sum_{t<n-k} (x_t - m)(x_{t+k} - m) / gamma_0, k = 0..max_lag.
inline std::vector<double> acf(const std::vector<double>& x,
                               std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("acf: need at least two points");
  if (max_lag >= n) max_lag = n - 1;
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(n);
  std::vector<double> out(max_lag + 1, 0.0);
  double g0 = 0.0;
  for (double v : x) g0 += (v - m) * (v - m);
  if (detail::degenerate_variance(g0, m, n)) {
    out[0] = 1.0;
    return out;  // constant series: define acf as delta at lag 0
  }
  out[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - m) * (x[t + k] - m);
    out[k] = c / g0;
  }
  return out;
}

// Integrated autocorrelation time tau = -1 + 2 sum_m Gamma_m over the initial
// positive sequence of pair sums Gamma_m = rho_{2m} + rho_{2m+1}; ESS = n/tau.
// Constant series report n. Anticorrelated chains can exceed n.
inline double ess(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return static_cast<double>(n);
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(n);
  double g0 = 0.0;
  for (double v : x) g0 += (v - m) * (v - m);
  if (detail::degenerate_variance(g0, m, n)) return static_cast<double>(n);
  auto rho = [&](std::size_t k) {
    if (k >= n) return 0.0;
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - m) * (x[t + k] - m);
    return c / g0;
  };
  double tau = -1.0;
  for (std::size_t pair = 0; 2 * pair < n; ++pair) {
    const double gamma = rho(2 * pair) + rho(2 * pair + 1);
    if (gamma <= 0.0) break;
    tau += 2.0 * gamma;
  }
  if (tau < 1e-8) tau = 1e-8;
  return static_cast<double>(n) / tau;
}

// Type-7 quantile (R default) on an already sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("quantile: empty");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p");
  if (n == 1) return sorted[0];
  const double idx = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

inline double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  return quantile_sorted(x, p);
}

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double ess = 0.0;
};

inline ParamSummary summarize(const std::vector<double>& draws) {
  const std::size_t n = draws.size();
  if (n == 0) throw std::invalid_argument("summarize: empty");
  ParamSummary s;
  for (double v : draws) s.mean += v;
  s.mean /= static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : draws) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  std::vector<double> sorted(draws);
  std::sort(sorted.begin(), sorted.end());
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q95 = quantile_sorted(sorted, 0.95);
  s.ess = n >= 2 ? ess(draws) : static_cast<double>(n);
  return s;
}

}  // namespace svl
