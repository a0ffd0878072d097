#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "svl/model.hpp"
#include "svl/tridiag.hpp"

// Analytic gradients of the log joint density with respect to the latent
// volatilities and the transformed parameters, and the expected-curvature
// metrics used by the manifold proposal. The volatility metric is
// tridiagonal; the parameter metric is dense of dimension 3 or 4.

namespace svl {

// Observation score for h_i: d/dh_i of [ln f_eps(eps_i) - h_i/2].
inline double obs_score(const ErrorFamily& fam, double eps) {
  switch (fam.tag) {
    case ErrorTag::Gaussian:
      return -0.5 + 0.5 * eps * eps;
    case ErrorTag::Ged: {
      const double w = std::pow(std::fabs(eps / ged_lambda(fam.nu)), fam.nu);
      return -0.5 + 0.25 * fam.nu * w;
    }
    case ErrorTag::StudentT: {
      const double u = eps * eps / (fam.nu - 2.0);
      return -0.5 + 0.5 * (fam.nu + 1.0) * u / (1.0 + u);
    }
  }
  throw std::logic_error("obs_score: bad tag");
}

// -E(d^2/dh_i^2) of the observation term, a constant per family.
inline double obs_curvature(const ErrorFamily& fam) {
  switch (fam.tag) {
    case ErrorTag::Gaussian: return 0.5;
    case ErrorTag::Ged: return 0.25 * fam.nu;
    case ErrorTag::StudentT: return 0.5 * fam.nu / (fam.nu + 3.0);
  }
  throw std::logic_error("obs_curvature: bad tag");
}

// Gradient of ln f(y,h|theta) in h. The AR(1) part couples neighbours only:
//   r_1 = (h_1 - phi h_2)/s2, r_n = (h_n - phi h_{n-1})/s2,
//   r_i = ((h_i - phi h_{i-1}) - phi (h_{i+1} - phi h_i))/s2.
inline std::vector<double> grad_h(const std::vector<double>& y,
                                  const std::vector<double>& h,
                                  const ModelParams& th) {
  const std::size_t n = y.size();
  if (h.size() != n || n == 0)
    throw std::invalid_argument("grad_h: bad sizes");
  const double s2 = th.sigma * th.sigma;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = y[i] * std::exp(-0.5 * h[i]) / th.beta;
    g[i] = obs_score(th.family, eps);
  }
  if (n == 1) {
    g[0] -= (1.0 - th.phi * th.phi) * h[0] / s2;
    return g;
  }
  g[0] -= (h[0] - th.phi * h[1]) / s2;
  for (std::size_t i = 1; i + 1 < n; ++i)
    g[i] -= ((h[i] - th.phi * h[i - 1]) - th.phi * (h[i + 1] - th.phi * h[i])) / s2;
  g[n - 1] -= (h[n - 1] - th.phi * h[n - 2]) / s2;
  return g;
}

// Expected-curvature metric for the volatility block, tridiagonal:
// diag c + 1/s2 at both ends, c + (1+phi^2)/s2 inside, off-diagonal -phi/s2,
// where c is the observation curvature.
inline SymTridiag metric_h(std::size_t n, const ModelParams& th) {
  if (n < 2) throw std::invalid_argument("metric_h: requires n >= 2");
  const double s2 = th.sigma * th.sigma;
  const double c = obs_curvature(th.family);
  SymTridiag g;
  g.diag.assign(n, c + (1.0 + th.phi * th.phi) / s2);
  g.diag.front() = c + 1.0 / s2;
  g.diag.back() = c + 1.0 / s2;
  g.off.assign(n - 1, -th.phi / s2);
  return g;
}

namespace detail {

// K(nu) = nu (nu/lambda) dlambda/dnu = ln2 - psi(1/nu)/2 + (3/2) psi(3/nu).
inline double ged_kappa(double nu) {
  return kLn2 - 0.5 * digamma(1.0 / nu) + 1.5 * digamma(3.0 / nu);
}

}  // namespace detail

// Gradient in xi = (delta, gamma, alpha [, p]) of ln f(y,h|theta(xi)).
inline std::vector<double> grad_theta_likelihood(const std::vector<double>& y,
                                                 const std::vector<double>& h,
                                                 const TransformedParams& xi,
                                                 ErrorTag tag) {
  const ModelParams th = from_unconstrained(xi, tag);
  const std::size_t n = y.size();
  if (h.size() != n || n == 0)
    throw std::invalid_argument("grad_theta_likelihood: bad sizes");
  const double s2 = th.sigma * th.sigma;
  const double om = 1.0 - th.phi * th.phi;
  const double nn = static_cast<double>(n);

  // AR(1) sums shared by every family.
  double sq = om * h[0] * h[0];           // (1-phi^2) h_1^2 + sum (h_t - phi h_{t-1})^2
  double cross = 0.0;                     // sum h_{t-1} (h_t - phi h_{t-1})
  for (std::size_t t = 1; t < n; ++t) {
    const double d = h[t] - th.phi * h[t - 1];
    sq += d * d;
    cross += h[t - 1] * d;
  }
  const double dgamma = -nn + sq / s2;
  const double dalpha = -th.phi + th.phi * om * h[0] * h[0] / s2 + om * cross / s2;

  std::vector<double> g;
  switch (tag) {
    case ErrorTag::Gaussian: {
      double se2 = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double eps = y[t] * std::exp(-0.5 * h[t]) / th.beta;
        se2 += eps * eps;
      }
      g = {-nn + se2, dgamma, dalpha};
      break;
    }
    case ErrorTag::Ged: {
      const double nu = th.family.nu;
      const double lam = ged_lambda(nu);
      const double kap = detail::ged_kappa(nu);
      double sw = 0.0, swl = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double eps = y[t] * std::exp(-0.5 * h[t]) / th.beta;
        const double w = std::pow(std::fabs(eps / lam), nu);
        sw += w;
        if (w > 0.0) swl += w * (std::log(w) - kap);  // w ln w -> 0 as w -> 0
      }
      const double ddelta = -nn + 0.5 * nu * sw;
      const double dp = nn / nu * (nu - kap + digamma(1.0 / nu) + kLn2) - 0.5 * swl;
      g = {ddelta, dgamma, dalpha, dp};
      break;
    }
    case ErrorTag::StudentT: {
      const double nu = th.family.nu;
      double sc = 0.0, sl = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double eps = y[t] * std::exp(-0.5 * h[t]) / th.beta;
        const double u = eps * eps / (nu - 2.0);
        sc += u / (1.0 + u);
        sl += std::log1p(u);
      }
      const double ddelta = -nn + (nu + 1.0) * sc;
      const double dp =
          0.5 * (nu - 4.0) *
          (nn * (digamma(0.5 * (nu + 1.0)) - digamma(0.5 * nu) - 1.0 / (nu - 2.0)) +
           (nu + 1.0) / (nu - 2.0) * sc - sl);
      g = {ddelta, dgamma, dalpha, dp};
      break;
    }
  }
  return g;
}

// Gradient in xi of [log_prior(theta(xi)) + delta + ln(1-phi^2) (+ p)],
// i.e. the prior plus the change-of-variable terms of param_log_target.
inline std::vector<double> grad_theta_prior(const TransformedParams& xi,
                                            ErrorTag tag) {
  const ModelParams th = from_unconstrained(xi, tag);
  const double ddelta = -th.beta + 1.0;
  const double dgamma = 0.5 / (th.sigma * th.sigma) - 11.0;
  const double dalpha =
      19.0 * (1.0 - th.phi) - 0.5 * (1.0 + th.phi) - 2.0 * th.phi;
  switch (tag) {
    case ErrorTag::Gaussian:
      return {ddelta, dgamma, dalpha};
    case ErrorTag::Ged:
      return {ddelta, dgamma, dalpha, 4.0 / th.family.nu - 3.0 + 1.0};
    case ErrorTag::StudentT:
      return {ddelta, dgamma, dalpha, -(th.family.nu - 4.0) / 3.0 + 1.0};
  }
  throw std::logic_error("grad_theta_prior: bad tag");
}

// Gradient of param_log_target in xi.
inline std::vector<double> grad_theta(const std::vector<double>& y,
                                      const std::vector<double>& h,
                                      const TransformedParams& xi,
                                      ErrorTag tag) {
  std::vector<double> g = grad_theta_likelihood(y, h, xi, tag);
  const std::vector<double> gp = grad_theta_prior(xi, tag);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += gp[i];
  return g;
}

// Expected information of ln f(y,h|theta(xi)) under the model, per family.
// Entries not listed below vanish. The (p,p) entry for the GED comes from
// the variance of the p-score: with s = 1/nu, K as above and
// A = psi(1+s) + ln2 - K,
//   G_pp = n s [ (1+s) psi_1(1+s) + (A+1)^2 - 1 ],
// which also gives G_dp = -n (A+1). Both were checked against a Monte Carlo
// Fisher estimate, as were all other entries.
inline DenseSPD metric_theta_likelihood(const TransformedParams& xi,
                                        ErrorTag tag, std::size_t n) {
  if (n == 0) throw std::invalid_argument("metric_theta_likelihood: n == 0");
  const ModelParams th = from_unconstrained(xi, tag);
  const double nn = static_cast<double>(n);
  const double phi = th.phi;
  const std::size_t d = (tag == ErrorTag::Gaussian) ? 3 : 4;
  DenseSPD g = DenseSPD::zero(d);
  g.at(1, 1) = 2.0 * nn;
  g.at(1, 2) = g.at(2, 1) = 2.0 * phi;
  g.at(2, 2) = 2.0 * phi * phi + (nn - 1.0) * (1.0 - phi * phi);
  switch (tag) {
    case ErrorTag::Gaussian:
      g.at(0, 0) = 2.0 * nn;
      break;
    case ErrorTag::Ged: {
      const double nu = th.family.nu;
      const double s = 1.0 / nu;
      const double a1 = digamma(1.0 + s) + kLn2 - detail::ged_kappa(nu) + 1.0;
      g.at(0, 0) = nn * nu;
      g.at(0, 3) = g.at(3, 0) = -nn * a1;
      g.at(3, 3) = nn * s * ((1.0 + s) * trigamma(1.0 + s) + a1 * a1 - 1.0);
      break;
    }
    case ErrorTag::StudentT: {
      const double nu = th.family.nu;
      g.at(0, 0) = 2.0 * nn * nu / (nu + 3.0);
      g.at(0, 3) = g.at(3, 0) =
          6.0 * nn * (nu - 4.0) / ((nu - 2.0) * (nu + 1.0) * (nu + 3.0));
      const double r = (nu - 4.0) / (nu - 2.0);
      g.at(3, 3) = -0.5 * nn * r * r *
                   ((nu - 3.0) * (nu + 4.0) / ((nu + 1.0) * (nu + 3.0)) +
                    0.5 * (nu - 2.0) * (nu - 2.0) *
                        (trigamma(0.5 * (nu + 1.0)) - trigamma(0.5 * nu)));
      break;
    }
  }
  return g;
}

// Full parameter metric: likelihood information plus prior curvature
//   gamma: 1/sigma^2,  alpha: (39/2)(1-phi^2),
//   p: 4/nu (GED) or (nu-4)/3 (Student-t).
inline DenseSPD metric_theta(const TransformedParams& xi, ErrorTag tag,
                             std::size_t n) {
  DenseSPD g = metric_theta_likelihood(xi, tag, n);
  const ModelParams th = from_unconstrained(xi, tag);
  g.at(1, 1) += 1.0 / (th.sigma * th.sigma);
  g.at(2, 2) += 19.5 * (1.0 - th.phi * th.phi);
  if (tag == ErrorTag::Ged) g.at(3, 3) += 4.0 / th.family.nu;
  if (tag == ErrorTag::StudentT) g.at(3, 3) += (th.family.nu - 4.0) / 3.0;
  return g;
}

}  // namespace svl
