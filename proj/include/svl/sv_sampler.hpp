#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "svl/diagnostics.hpp"
#include "svl/geometry.hpp"
#include "svl/model.hpp"
#include "svl/quantile_sketch.hpp"
#include "svl/rng.hpp"
#include "svl/samplers.hpp"

// Two-block sampler for the stochastic volatility model: MALA on the latent
// volatilities given parameters, then a manifold step (or plain MALA when
// full_mala is set) on the transformed parameters given the volatilities.
// Both step sizes adapt toward 0.574 acceptance during burn-in and are frozen
// afterwards, so kept draws come from fixed kernels.

namespace svl {

struct McmcConfig {
  long n_iter = 20000;
  long burn_in = 10000;
  long thin = 1;
  std::uint64_t seed = 1;
  double eps_vol = 0.05;   // initial step size, volatility block
  double eps_par = 0.5;    // initial step size, parameter block
  double target_accept = 0.574;
  bool adapt = true;
  bool full_mala = false;  // plain MALA on the parameter block
  bool store_h = false;    // keep every h path (memory heavy)

  void validate() const {
    if (n_iter < 1) throw std::invalid_argument("mcmc: n_iter < 1");
    if (burn_in < 0 || burn_in >= n_iter)
      throw std::invalid_argument("mcmc: need 0 <= burn_in < n_iter");
    if (thin < 1) throw std::invalid_argument("mcmc: thin < 1");
    if (!(eps_vol > 0.0) || !(eps_par > 0.0))
      throw std::invalid_argument("mcmc: step sizes must be positive");
    if (!(target_accept > 0.0 && target_accept < 1.0))
      throw std::invalid_argument("mcmc: target_accept in (0,1)");
  }
};

struct ChainOutput {
  std::vector<std::string> param_names;        // beta, phi, sigma [, nu]
  std::vector<std::vector<double>> draws;      // kept x dim, natural scale
  std::vector<unsigned char> accept_vol;       // per kept draw
  std::vector<unsigned char> accept_par;
  double accept_rate_vol = 0.0;                // post-burn-in fractions
  double accept_rate_par = 0.0;
  long jitter_events = 0;
  std::vector<double> h_last;                  // h_n per kept draw
  std::vector<std::vector<double>> h_full;     // kept x n if store_h
  std::vector<double> h_mean;                  // per-t posterior mean
  std::vector<double> h_median;                // per-t streaming median
  std::vector<double> h_state;                 // final h (warm starts)
  TransformedParams xi_state;                  // final parameter state
  double eps_vol = 0.0;                        // final step sizes
  double eps_par = 0.0;

  std::size_t kept() const { return draws.size(); }
};

namespace detail {

struct VolTarget {
  const std::vector<double>* y;
  ModelParams th;

  std::pair<double, std::vector<double>> value_and_gradient(
      const std::vector<double>& h) const {
    const double lp = log_joint(*y, h, th);
    if (!std::isfinite(lp)) return {kNegInf, std::vector<double>(h.size(), 0.0)};
    return {lp, grad_h(*y, h, th)};
  }
};

struct ParamTarget {
  const std::vector<double>* y;
  const std::vector<double>* h;
  ErrorTag tag;

  std::pair<double, std::vector<double>> value_and_gradient(
      const std::vector<double>& v) const {
    const TransformedParams xi = TransformedParams::from_vector(v);
    const double lp = param_log_target(*y, *h, xi, tag);
    if (!std::isfinite(lp)) return {kNegInf, std::vector<double>(v.size(), 0.0)};
    return {lp, grad_theta(*y, *h, xi, tag)};
  }

  DenseSPD metric(const std::vector<double>& v) const {
    return metric_theta(TransformedParams::from_vector(v), tag, y->size());
  }
};

}  // namespace detail

struct SweepResult {
  bool vol_accepted = false;
  bool par_accepted = false;
  double vol_accept_prob = 0.0;
  double par_accept_prob = 0.0;
};

// One full sweep, updating h and xi in place. The RNG pattern is fixed:
// n normals + 1 uniform for the volatility block, then dim normals +
// 1 uniform for the parameter block.
inline SweepResult hybrid_sweep(const std::vector<double>& y,
                                std::vector<double>& h, TransformedParams& xi,
                                ErrorTag tag, double eps_vol, double eps_par,
                                bool full_mala, Rng& rng,
                                long* jitter_events) {
  SweepResult res;
  detail::VolTarget vol{&y, from_unconstrained(xi, tag)};
  StepResult vs = mala_step(vol, h, eps_vol, rng);
  res.vol_accepted = vs.accepted;
  res.vol_accept_prob = vs.accept_prob;
  h = std::move(vs.point);

  detail::ParamTarget par{&y, &h, tag};
  const int dim = tag == ErrorTag::Gaussian ? 3 : 4;
  const std::vector<double> x = xi.as_vector(dim);
  StepResult ps = full_mala ? mala_step(par, x, eps_par, rng)
                            : mmala_step(par, x, eps_par, rng, jitter_events);
  res.par_accepted = ps.accepted;
  res.par_accept_prob = ps.accept_prob;
  xi = TransformedParams::from_vector(ps.point);
  return res;
}

// Prior medians, used to start chains when no initial value is given.
inline ModelParams default_init(ErrorTag tag) {
  ModelParams th;
  th.beta = 0.6931;
  th.phi = 0.8880;
  th.sigma = 0.2313;
  switch (tag) {
    case ErrorTag::Gaussian: th.family = ErrorFamily::gaussian(); break;
    case ErrorTag::Ged: th.family = ErrorFamily::ged(2.3830); break;
    case ErrorTag::StudentT: th.family = ErrorFamily::student_t(6.0794); break;
  }
  return th;
}

// Crude volatility path init: ln((y_t^2 + c)/beta^2) with a small data-scaled
// floor c, roughly centering h_t at its conditional scale.
inline std::vector<double> default_h_init(const std::vector<double>& y,
                                          double beta) {
  double my2 = 0.0;
  for (double v : y) my2 += v * v;
  my2 /= static_cast<double>(y.size());
  const double c = 1e-8 + 1e-4 * my2;
  std::vector<double> h(y.size());
  for (std::size_t t = 0; t < y.size(); ++t)
    h[t] = std::log((y[t] * y[t] + c) / (beta * beta));
  return h;
}

inline ChainOutput run_chain(const std::vector<double>& y,
                             const ModelParams& init,
                             std::vector<double> h_init,
                             const McmcConfig& cfg) {
  cfg.validate();
  const std::size_t n = y.size();
  if (n < 2) throw std::invalid_argument("run_chain: need n >= 2");
  if (!init.valid()) throw std::domain_error("run_chain: invalid init");
  if (!h_init.empty() && h_init.size() != n)
    throw std::invalid_argument("run_chain: h_init size mismatch");

  const ErrorTag tag = init.family.tag;
  std::vector<double> h =
      h_init.empty() ? default_h_init(y, init.beta) : std::move(h_init);
  TransformedParams xi = to_unconstrained(init);

  Rng rng(cfg.seed);
  StepSizeTuner tune_vol(cfg.eps_vol, cfg.target_accept);
  StepSizeTuner tune_par(cfg.eps_par, cfg.target_accept);
  if (!cfg.adapt || cfg.burn_in == 0) {
    tune_vol.freeze();
    tune_par.freeze();
  }

  ChainOutput out;
  out.param_names = {"beta", "phi", "sigma"};
  if (tag != ErrorTag::Gaussian) out.param_names.push_back("nu");
  const long kept = (cfg.n_iter - cfg.burn_in) / cfg.thin;
  out.draws.reserve(kept);
  out.accept_vol.reserve(kept);
  out.accept_par.reserve(kept);
  out.h_last.reserve(kept);
  out.h_mean.assign(n, 0.0);
  std::vector<P2Quantile> med(n, P2Quantile(0.5));

  long acc_vol = 0, acc_par = 0, post = 0;
  for (long iter = 1; iter <= cfg.n_iter; ++iter) {
    const SweepResult sw =
        hybrid_sweep(y, h, xi, tag, tune_vol.eps(), tune_par.eps(),
                     cfg.full_mala, rng, &out.jitter_events);
    if (iter <= cfg.burn_in) {
      tune_vol.update(sw.vol_accept_prob);
      tune_par.update(sw.par_accept_prob);
      if (iter == cfg.burn_in) {
        tune_vol.freeze();
        tune_par.freeze();
      }
    } else {
      ++post;
      acc_vol += sw.vol_accepted ? 1 : 0;
      acc_par += sw.par_accepted ? 1 : 0;
      if ((iter - cfg.burn_in) % cfg.thin == 0) {
        const ModelParams th = from_unconstrained(xi, tag);
        std::vector<double> row = {th.beta, th.phi, th.sigma};
        if (tag != ErrorTag::Gaussian) row.push_back(th.family.nu);
        out.draws.push_back(std::move(row));
        out.accept_vol.push_back(sw.vol_accepted ? 1 : 0);
        out.accept_par.push_back(sw.par_accepted ? 1 : 0);
        out.h_last.push_back(h[n - 1]);
        for (std::size_t t = 0; t < n; ++t) {
          out.h_mean[t] += h[t];
          med[t].add(h[t]);
        }
        if (cfg.store_h) out.h_full.push_back(h);
      }
    }
  }
  if (!out.draws.empty()) {
    for (double& v : out.h_mean) v /= static_cast<double>(out.draws.size());
    out.h_median.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.h_median[t] = med[t].value();
  } else {
    out.h_mean.clear();
  }
  if (post > 0) {
    out.accept_rate_vol = static_cast<double>(acc_vol) / static_cast<double>(post);
    out.accept_rate_par = static_cast<double>(acc_par) / static_cast<double>(post);
  }
  out.h_state = std::move(h);
  out.xi_state = xi;
  out.eps_vol = tune_vol.eps();
  out.eps_par = tune_par.eps();
  return out;
}

}  // namespace svl
