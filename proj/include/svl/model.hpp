#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "svl/distributions.hpp"
#include "svl/rng.hpp"

// The stochastic volatility model
//   y_t = beta exp(h_t/2) eps_t,   h_t = phi h_{t-1} + eta_t,
//   eta_t ~ N(0, sigma^2),         h_1 ~ N(0, sigma^2/(1-phi^2)),
// with eps_t Gaussian, GED(nu) or Student-t(nu), all unit variance.
//
// Parameter blocks are sampled on the unconstrained scale
//   delta = ln beta, gamma = ln sigma, alpha = atanh phi,
//   p = ln nu (GED) or p = ln(nu - 4) (Student-t).

namespace svl {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ModelParams {
  double beta = 1.0;
  double phi = 0.0;
  double sigma = 1.0;
  ErrorFamily family;

  bool valid() const {
    if (!(beta > 0.0) || !(sigma > 0.0) || !(std::fabs(phi) < 1.0)) return false;
    if (!std::isfinite(beta) || !std::isfinite(sigma) || !std::isfinite(phi))
      return false;
    if (family.tag != ErrorTag::Gaussian && !std::isfinite(family.nu))
      return false;
    if (family.tag == ErrorTag::Ged && !(family.nu > 0.0)) return false;
    if (family.tag == ErrorTag::StudentT && !(family.nu > 2.0)) return false;
    return true;
  }
};

// Unconstrained coordinates. `p` is unused when dim() == 3.
struct TransformedParams {
  double delta = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double p = 0.0;

  std::vector<double> as_vector(int dim) const {
    if (dim == 3) return {delta, gamma, alpha};
    return {delta, gamma, alpha, p};
  }

  static TransformedParams from_vector(const std::vector<double>& v) {
    TransformedParams xi;
    if (v.size() != 3 && v.size() != 4)
      throw std::invalid_argument("TransformedParams: expected dim 3 or 4");
    xi.delta = v[0];
    xi.gamma = v[1];
    xi.alpha = v[2];
    if (v.size() == 4) xi.p = v[3];
    return xi;
  }
};

inline TransformedParams to_unconstrained(const ModelParams& th) {
  if (!th.valid()) throw std::domain_error("to_unconstrained: invalid params");
  TransformedParams xi;
  xi.delta = std::log(th.beta);
  xi.gamma = std::log(th.sigma);
  xi.alpha = std::atanh(th.phi);
  if (th.family.tag == ErrorTag::Ged) xi.p = std::log(th.family.nu);
  if (th.family.tag == ErrorTag::StudentT) xi.p = std::log(th.family.nu - 4.0);
  return xi;
}

inline ModelParams from_unconstrained(const TransformedParams& xi,
                                      ErrorTag tag) {
  ModelParams th;
  th.beta = std::exp(xi.delta);
  th.sigma = std::exp(xi.gamma);
  th.phi = std::tanh(xi.alpha);
  switch (tag) {
    case ErrorTag::Gaussian: th.family = ErrorFamily::gaussian(); break;
    case ErrorTag::Ged:
      th.family.tag = ErrorTag::Ged;
      th.family.nu = std::exp(xi.p);
      break;
    case ErrorTag::StudentT:
      th.family.tag = ErrorTag::StudentT;
      th.family.nu = std::exp(xi.p) + 4.0;
      break;
  }
  return th;
}

// ln |d theta / d xi| = ln beta + ln sigma + ln(1 - phi^2) + ln(d nu/d p).
// With the transforms above, ln(d nu/d p) = p for GED and Student-t alike.
inline double log_jacobian(const TransformedParams& xi, ErrorTag tag) {
  const double phi = std::tanh(xi.alpha);
  double j = xi.delta + xi.gamma + std::log1p(-phi * phi);
  if (tag != ErrorTag::Gaussian) j += xi.p;
  return j;
}

// Log prior density on the natural scale (unnormalized):
//   beta ~ Exp(1); sigma^2 ~ inverse-chi-squared(10, 0.05), expressed in
//   sigma as -1/(4 sigma^2) - 11 ln sigma; (phi+1)/2 ~ Beta(20, 1.5);
//   GED: ln f(nu) = -4/nu - 3 ln nu; Student-t: nu - 4 ~ Exp(1/3).
// Returns -inf off the support.
inline double log_prior(const ModelParams& th) {
  if (!th.valid()) return kNegInf;
  double lp = -th.beta - 0.25 / (th.sigma * th.sigma) - 11.0 * std::log(th.sigma) +
              19.0 * std::log(0.5 * (1.0 + th.phi)) +
              0.5 * std::log(0.5 * (1.0 - th.phi));
  if (th.family.tag == ErrorTag::Ged)
    lp += -4.0 / th.family.nu - 3.0 * std::log(th.family.nu);
  if (th.family.tag == ErrorTag::StudentT) {
    if (th.family.nu < 4.0) return kNegInf;
    lp += std::log(1.0 / 3.0) - (th.family.nu - 4.0) / 3.0;
  }
  return std::isfinite(lp) ? lp : kNegInf;
}

// ln f(y, h | theta): Gaussian AR(1) for h (stationary start) plus the
// observation terms ln f_eps(eps_t) - h_t/2 - ln beta, eps_t = y_t e^{-h_t/2}/beta.
inline double log_joint(const std::vector<double>& y,
                        const std::vector<double>& h, const ModelParams& th) {
  const std::size_t n = y.size();
  if (h.size() != n) throw std::invalid_argument("log_joint: y/h size mismatch");
  if (n == 0) throw std::invalid_argument("log_joint: empty series");
  if (!th.valid()) return kNegInf;
  const double s2 = th.sigma * th.sigma;
  const double om = 1.0 - th.phi * th.phi;

  double lp = -0.5 * kLnTwoPi + 0.5 * std::log(om / s2) -
              0.5 * om * h[0] * h[0] / s2;
  for (std::size_t t = 1; t < n; ++t) {
    const double d = h[t] - th.phi * h[t - 1];
    lp += -0.5 * kLnTwoPi - std::log(th.sigma) - 0.5 * d * d / s2;
  }
  const double lbeta = std::log(th.beta);
  for (std::size_t t = 0; t < n; ++t) {
    const double eps = y[t] * std::exp(-0.5 * h[t]) / th.beta;
    lp += error_logpdf(th.family, eps) - 0.5 * h[t] - lbeta;
  }
  return std::isfinite(lp) ? lp : kNegInf;
}

// Target density of the parameter block on the unconstrained scale:
// log_joint + log_prior + the change-of-variable terms for beta, phi and nu
// (the sigma term is already part of the -11 ln sigma in the prior).
inline double param_log_target(const std::vector<double>& y,
                               const std::vector<double>& h,
                               const TransformedParams& xi, ErrorTag tag) {
  const ModelParams th = from_unconstrained(xi, tag);
  if (!th.valid()) return kNegInf;
  const double phi = th.phi;
  double corr = xi.delta + std::log1p(-phi * phi);
  if (tag != ErrorTag::Gaussian) corr += xi.p;
  const double v = log_joint(y, h, th) + log_prior(th) + corr;
  return std::isfinite(v) ? v : kNegInf;
}

struct Simulation {
  std::vector<double> y;
  std::vector<double> h;
};

inline Simulation simulate(const ModelParams& th, std::size_t n, Rng& rng) {
  if (!th.valid()) throw std::domain_error("simulate: invalid params");
  if (n == 0) throw std::invalid_argument("simulate: n must be positive");
  Simulation sim;
  sim.h.resize(n);
  sim.y.resize(n);
  sim.h[0] = th.sigma / std::sqrt(1.0 - th.phi * th.phi) * rng.normal();
  for (std::size_t t = 1; t < n; ++t)
    sim.h[t] = th.phi * sim.h[t - 1] + th.sigma * rng.normal();
  for (std::size_t t = 0; t < n; ++t)
    sim.y[t] = th.beta * std::exp(0.5 * sim.h[t]) * sample_error(th.family, rng);
  return sim;
}

}  // namespace svl
