#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "svl/rng.hpp"
#include "svl/tridiag.hpp"

// Metropolis-adjusted Langevin kernels. A target exposes
//   value_and_gradient(x) -> {log density, gradient}
// and, for the manifold variant, metric(x) -> SymTridiag | DenseSPD.
//
// The manifold step uses the position-dependent metric in both proposal
// moments (constant-curvature form): mean x + (eps^2/2) G^{-1}(x) grad,
// covariance eps^2 G^{-1}(x), with the forward and reverse densities each
// evaluated under the metric at their own starting point.
//
// Non-finite proposals are rejected. Both kernels consume the same RNG
// pattern (dim normals, then one uniform), and with an identity metric the
// manifold step reproduces the MALA trajectory draw for draw.

namespace svl {

struct StepResult {
  std::vector<double> point;
  bool accepted = false;
  double log_alpha = 0.0;
  double accept_prob = 0.0;  // min(1, exp(log_alpha)), 0 for non-finite
};

namespace detail {

inline double acceptance_probability(double log_alpha) {
  if (std::isnan(log_alpha)) return 0.0;
  return std::exp(std::min(0.0, log_alpha));
}

}  // namespace detail

template <class Target>
StepResult mala_step(Target&& target, const std::vector<double>& x, double eps,
                     Rng& rng) {
  const std::size_t d = x.size();
  std::vector<double> z(d);
  for (auto& v : z) v = rng.normal();
  const double u = rng.uniform();
  if (!(eps > 0.0)) return {x, true, 0.0, 1.0};  // frozen block: stay put

  auto [lp, g] = target.value_and_gradient(x);
  const double half = 0.5 * eps * eps;
  std::vector<double> mu(d), prop(d);
  for (std::size_t i = 0; i < d; ++i) {
    mu[i] = x[i] + half * g[i];
    prop[i] = mu[i] + eps * z[i];
  }
  auto [lpp, gp] = target.value_and_gradient(prop);
  double log_alpha;
  if (!std::isfinite(lpp)) {
    log_alpha = -std::numeric_limits<double>::infinity();
  } else {
    double qf_fwd = 0.0, qf_rev = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double df = prop[i] - mu[i];
      qf_fwd += df * df;
      const double dr = x[i] - (prop[i] + half * gp[i]);
      qf_rev += dr * dr;
    }
    log_alpha = (lpp - lp) + (qf_fwd - qf_rev) / (2.0 * eps * eps);
  }
  const double ap = detail::acceptance_probability(log_alpha);
  if (std::log(u) < log_alpha) return {std::move(prop), true, log_alpha, ap};
  return {x, false, log_alpha, ap};
}

template <class Target>
StepResult mmala_step(Target&& target, const std::vector<double>& x, double eps,
                      Rng& rng, long* jitter_events = nullptr) {
  const std::size_t d = x.size();
  std::vector<double> z(d);
  for (auto& v : z) v = rng.normal();
  const double u = rng.uniform();
  if (!(eps > 0.0)) return {x, true, 0.0, 1.0};

  auto [lp, g] = target.value_and_gradient(x);
  auto gcur = target.metric(x);
  auto ccur = factor_with_jitter(gcur, jitter_events);
  if (!ccur) return {x, false, -std::numeric_limits<double>::infinity(), 0.0};

  const double half = 0.5 * eps * eps;
  const std::vector<double> v = ccur->solve(g);
  std::vector<double> mu(d), prop(d);
  const std::vector<double> w = ccur->solve_lt(z);
  for (std::size_t i = 0; i < d; ++i) {
    mu[i] = x[i] + half * v[i];
    prop[i] = mu[i] + eps * w[i];
  }

  auto [lpp, gp] = target.value_and_gradient(prop);
  double log_alpha = -std::numeric_limits<double>::infinity();
  if (std::isfinite(lpp)) {
    auto gprop = target.metric(prop);
    auto cprop = factor_with_jitter(gprop, jitter_events);
    if (cprop) {
      const std::vector<double> vp = cprop->solve(gp);
      std::vector<double> dfwd(d), drev(d);
      for (std::size_t i = 0; i < d; ++i) {
        dfwd[i] = prop[i] - mu[i];
        drev[i] = x[i] - (prop[i] + half * vp[i]);
      }
      const double qf_fwd = quad_form(gcur, dfwd);
      const double qf_rev = quad_form(gprop, drev);
      log_alpha = (lpp - lp) + 0.5 * (cprop->logdet() - ccur->logdet()) +
                  (qf_fwd - qf_rev) / (2.0 * eps * eps);
    }
  }
  const double ap = detail::acceptance_probability(log_alpha);
  if (std::log(u) < log_alpha) return {std::move(prop), true, log_alpha, ap};
  return {x, false, log_alpha, ap};
}

// Robbins-Monro tuning of the step size toward a target acceptance rate,
// on the log scale with gain c/k^0.66. Frozen once burn-in ends so the
// sampling phase uses a fixed kernel.
class StepSizeTuner {
 public:
  StepSizeTuner(double eps0, double target_rate)
      : log_eps_(std::log(eps0)), target_(target_rate) {}

  double update(double accept_prob) {
    if (!frozen_) {
      ++k_;
      const double gain = 1.0 / std::pow(static_cast<double>(k_), 0.66);
      log_eps_ += gain * (accept_prob - target_);
      if (log_eps_ < kLogMin) log_eps_ = kLogMin;
      if (log_eps_ > kLogMax) log_eps_ = kLogMax;
    }
    return eps();
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  double eps() const { return std::exp(log_eps_); }
  long steps() const { return k_; }

 private:
  static constexpr double kLogMin = -18.4;  // ~1e-8
  static constexpr double kLogMax = 6.9;    // ~1e3
  double log_eps_;
  double target_;
  long k_ = 0;
  bool frozen_ = false;
};

// One Robbins-Monro update driven by the mean of a window of acceptance
// probabilities. k is the tuning step counter.
inline double adapt_step_size(double eps, const std::vector<double>& history,
                              double target_rate, long k) {
  if (history.empty() || k < 1) return eps;
  double mean = 0.0;
  for (double a : history) mean += a;
  mean /= static_cast<double>(history.size());
  const double gain = 1.0 / std::pow(static_cast<double>(k), 0.66);
  return eps * std::exp(gain * (mean - target_rate));
}

}  // namespace svl
