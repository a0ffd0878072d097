#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "svl/diagnostics.hpp"
#include "svl/model.hpp"
#include "svl/rng.hpp"
#include "svl/sv_sampler.hpp"

// One-step-ahead predictive Value-at-Risk and a rolling backtest.
//
// For each kept posterior draw j the volatility is propagated one step,
// h' = phi_j h_n_j + sigma_j z, then L predictive returns
// beta_j exp(h'/2) eps are drawn and the VaR of that draw is the negated
// lower-tail (1-level) sample quantile. The forecast is the average over j.

namespace svl {

struct VarForecast {
  double level = 0.99;
  double var_point = 0.0;
  std::size_t j_draws = 0;
  std::size_t l_draws = 0;
};

inline VarForecast var_one_step(const ChainOutput& chain, ErrorTag tag,
                                double level, std::size_t l_draws, Rng& rng) {
  const std::size_t j_draws = chain.draws.size();
  if (j_draws == 0) throw std::invalid_argument("var_one_step: empty chain");
  if (chain.h_last.size() != j_draws)
    throw std::invalid_argument("var_one_step: h_last/draws mismatch");
  if (!(level > 0.5 && level < 1.0))
    throw std::invalid_argument("var_one_step: level must be in (0.5, 1)");
  if (l_draws < 1) throw std::invalid_argument("var_one_step: l_draws < 1");

  std::vector<double> rets(l_draws);
  double acc = 0.0;
  for (std::size_t j = 0; j < j_draws; ++j) {
    const std::vector<double>& row = chain.draws[j];
    ErrorFamily fam;
    switch (tag) {
      case ErrorTag::Gaussian: fam = ErrorFamily::gaussian(); break;
      case ErrorTag::Ged: fam = ErrorFamily::ged(row.at(3)); break;
      case ErrorTag::StudentT: fam = ErrorFamily::student_t(row.at(3)); break;
    }
    const double h_next = row[1] * chain.h_last[j] + row[2] * rng.normal();
    const double scale = row[0] * std::exp(0.5 * h_next);
    for (std::size_t k = 0; k < l_draws; ++k)
      rets[k] = scale * sample_error(fam, rng);
    acc += -quantile(rets, 1.0 - level);
  }
  VarForecast fc;
  fc.level = level;
  fc.var_point = acc / static_cast<double>(j_draws);
  fc.j_draws = j_draws;
  fc.l_draws = l_draws;
  return fc;
}

struct BacktestWindow {
  std::size_t index = 0;  // position in y of the forecasted return
  double ret = 0.0;
  double var_point = std::numeric_limits<double>::quiet_NaN();
  bool exceeded = false;
  bool ok = false;
};

struct VarBacktest {
  double level = 0.99;
  std::vector<BacktestWindow> windows;
  long exceedance_count = 0;
  long failures = 0;
};

struct BacktestConfig {
  std::size_t window = 252;  // number of one-step-ahead forecasts
  double level = 0.99;
  std::size_t l_draws = 1000;
  McmcConfig first_fit;      // cold fit of the initial prefix
  McmcConfig warm_fit;       // shorter refits of the growing windows
  bool warm_start = true;
  std::uint64_t seed = 1;
};

// Fit on y_1..y_{n-K+i}, forecast the return at n-K+i (0-based), i = 0..K-1.
// Warm starts reuse the previous window's posterior means and final h path,
// padded by one step of the fitted AR(1). A failed window fit is recorded
// and skipped; the forecast chain continues from the last good state.
inline VarBacktest rolling_backtest(const std::vector<double>& y,
                                    const ModelParams& init,
                                    const BacktestConfig& bt) {
  const std::size_t n = y.size();
  if (bt.window == 0) throw std::invalid_argument("rolling_backtest: window 0");
  if (n <= bt.window)
    throw std::invalid_argument("rolling_backtest: series shorter than window");
  if (!init.valid()) throw std::domain_error("rolling_backtest: invalid init");
  const ErrorTag tag = init.family.tag;

  VarBacktest out;
  out.level = bt.level;
  out.windows.reserve(bt.window);

  ModelParams warm_theta = init;
  std::vector<double> warm_h;  // empty = default data-driven init
  bool have_warm = false;

  for (std::size_t i = 0; i < bt.window; ++i) {
    const std::size_t m = n - bt.window + i;  // fit length
    const std::vector<double> fit(y.begin(), y.begin() + m);

    McmcConfig cfg = (bt.warm_start && have_warm) ? bt.warm_fit : bt.first_fit;
    cfg.seed = substream_seed(bt.seed, 2 * i);
    const ModelParams start = (bt.warm_start && have_warm) ? warm_theta : init;
    std::vector<double> h0 = (bt.warm_start && have_warm)
                                 ? warm_h
                                 : std::vector<double>{};

    BacktestWindow w;
    w.index = m;
    w.ret = y[m];
    try {
      const ChainOutput chain = run_chain(fit, start, std::move(h0), cfg);
      if (chain.draws.empty()) throw std::runtime_error("no kept draws");
      Rng vrng(substream_seed(bt.seed, 2 * i + 1));
      const VarForecast fc = var_one_step(chain, tag, bt.level, bt.l_draws, vrng);
      w.var_point = fc.var_point;
      w.exceeded = w.ret < -fc.var_point;
      w.ok = true;

      if (bt.warm_start) {
        ModelParams th = start;  // carries the family tag
        double mb = 0.0, mp = 0.0, ms = 0.0, mn = 0.0;
        for (const auto& row : chain.draws) {
          mb += row[0];
          mp += row[1];
          ms += row[2];
          if (row.size() > 3) mn += row[3];
        }
        const double k = static_cast<double>(chain.draws.size());
        th.beta = mb / k;
        th.phi = mp / k;
        th.sigma = ms / k;
        if (tag != ErrorTag::Gaussian) th.family.nu = mn / k;
        if (th.valid()) warm_theta = th;
        warm_h = chain.h_state;
        warm_h.push_back(warm_theta.phi * warm_h.back());
        have_warm = true;
      }
    } catch (const std::exception&) {
      ++out.failures;
      if (!warm_h.empty()) warm_h.push_back(warm_theta.phi * warm_h.back());
    }
    if (w.ok && w.exceeded) ++out.exceedance_count;
    out.windows.push_back(w);
  }
  return out;
}

}  // namespace svl
