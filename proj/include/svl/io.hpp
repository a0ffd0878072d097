#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "svl/diagnostics.hpp"
#include "svl/monte_carlo.hpp"
#include "svl/sv_sampler.hpp"
#include "svl/var.hpp"

// File formats: return/price series CSV in, chain/summary/VaR/plot data out.
// Doubles are written with 17 significant digits so that reading a file back
// reproduces the in-memory values bitwise.

namespace svl {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline bool parse_double(const std::string& s, double* out) {
  const char* p = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(p, &end);
  if (end == p) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  *out = v;
  return true;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

enum class SeriesKind { Prices, Returns };

// One or two columns (optional leading date), optional header row.  When a
// header names a value column (y/return/returns/value/price/close) that
// column is used, so files written by the simulator load directly.
// Prices become percent log-returns 100 (ln P_t - ln P_{t-1}).
inline std::vector<double> load_series(const std::string& path,
                                       SeriesKind kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<double> vals;
  std::string line;
  long row = 0;
  bool first_data = true;
  std::size_t named_col = std::string::npos;
  while (std::getline(in, line)) {
    ++row;
    std::string t = line;
    t.erase(0, t.find_first_not_of(" \t"));
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> cells = detail::split_csv(line);
    const std::size_t use_col =
        named_col != std::string::npos ? named_col : cells.size() - 1;
    if (named_col == std::string::npos && cells.size() > 2 && !first_data)
      throw DataError(path + ": row " + std::to_string(row) +
                      ": expected 1 or 2 columns");
    if (use_col >= cells.size())
      throw DataError(path + ": row " + std::to_string(row) +
                      ": too few columns");
    double v = 0.0;
    const bool ok = detail::parse_double(cells[use_col], &v);
    if (!ok) {
      if (first_data) {
        first_data = false;  // header row: look for a named value column
        for (std::size_t j = 0; j < cells.size(); ++j) {
          std::string name = cells[j];
          for (char& c : name) c = static_cast<char>(std::tolower(
              static_cast<unsigned char>(c)));
          name.erase(0, name.find_first_not_of(" \t"));
          name.erase(name.find_last_not_of(" \t") + 1);
          if (name == "y" || name == "return" || name == "returns" ||
              name == "value" || name == "price" || name == "close") {
            named_col = j;
            break;
          }
        }
        if (named_col == std::string::npos && cells.size() > 2)
          throw DataError(path + ": cannot identify a value column in header");
        continue;
      }
      throw DataError(path + ": row " + std::to_string(row) +
                      ": non-numeric value '" + cells[use_col] + "'");
    }
    if (first_data && cells.size() > 2)
      throw DataError(path + ": row " + std::to_string(row) +
                      ": expected 1 or 2 columns");
    if (std::isnan(v))
      throw DataError(path + ": row " + std::to_string(row) + ": NaN value");
    first_data = false;
    vals.push_back(v);
  }
  if (vals.size() < 2)
    throw DataError(path + ": need at least two data rows");
  if (kind == SeriesKind::Returns) return vals;
  std::vector<double> rets(vals.size() - 1);
  for (std::size_t t = 1; t < vals.size(); ++t) {
    if (!(vals[t] > 0.0) || !(vals[t - 1] > 0.0))
      throw DataError(path + ": non-positive price at row " +
                      std::to_string(t + 1));
    rets[t - 1] = 100.0 * (std::log(vals[t]) - std::log(vals[t - 1]));
  }
  return rets;
}

inline std::vector<double> demean(std::vector<double> y) {
  double m = 0.0;
  for (double v : y) m += v;
  m /= static_cast<double>(y.size());
  for (double& v : y) v -= m;
  return y;
}

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;        // sample, divisor n-1
  double skewness = 0.0;  // population moment ratio
  double kurtosis = 0.0;  // raw (normal = 3), matching common report tables
};

inline DescriptiveStats describe(const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 2) throw std::invalid_argument("describe: need n >= 2");
  DescriptiveStats s;
  s.n = n;
  for (double v : y) s.mean += v;
  s.mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : y) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  s.sd = std::sqrt(m2 / static_cast<double>(n - 1));
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  } else {
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

// --- chain CSV ---------------------------------------------------------
// Header iter,beta,phi,sigma,nu,accept_vol,accept_par; nu written as 0 for
// the Gaussian family; iter is the absolute iteration of the kept draw.

inline void write_chain_csv(const std::string& path, const ChainOutput& chain,
                            long burn_in, long thin) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "iter,beta,phi,sigma,nu,accept_vol,accept_par\n";
  const bool has_nu = chain.param_names.size() == 4;
  for (std::size_t i = 0; i < chain.draws.size(); ++i) {
    const auto& row = chain.draws[i];
    out << burn_in + static_cast<long>(i + 1) * thin << ','
        << format_g17(row[0]) << ',' << format_g17(row[1]) << ','
        << format_g17(row[2]) << ',' << format_g17(has_nu ? row[3] : 0.0)
        << ',' << int(chain.accept_vol[i]) << ',' << int(chain.accept_par[i])
        << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

struct ChainCsv {
  std::vector<long> iters;
  std::vector<std::vector<double>> draws;  // beta,phi,sigma,nu
  std::vector<unsigned char> accept_vol, accept_par;
};

inline ChainCsv read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw DataError(path + ": empty chain file");
  if (detail::split_csv(line).size() != 7)
    throw DataError(path + ": unexpected chain header");
  ChainCsv c;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split_csv(line);
    if (cells.size() != 7)
      throw DataError(path + ": row " + std::to_string(row) +
                      ": expected 7 columns");
    double vals[7];
    for (int j = 0; j < 7; ++j)
      if (!detail::parse_double(cells[j], &vals[j]))
        throw DataError(path + ": row " + std::to_string(row) +
                        ": non-numeric cell '" + cells[j] + "'");
    c.iters.push_back(static_cast<long>(vals[0]));
    c.draws.push_back({vals[1], vals[2], vals[3], vals[4]});
    c.accept_vol.push_back(vals[5] != 0.0);
    c.accept_par.push_back(vals[6] != 0.0);
  }
  return c;
}

// --- posterior summary JSON ----------------------------------------------
// {params: {name: {mean,sd,q05,q50,q95,ess}}, acceptance: {vol,par},
//  config echo, seed}.  Key order is stable for byte-identical reruns.

inline nlohmann::ordered_json summary_json(const ChainOutput& chain,
                                           const McmcConfig& cfg,
                                           const std::string& errors) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json params;
  for (std::size_t k = 0; k < chain.param_names.size(); ++k) {
    std::vector<double> col;
    col.reserve(chain.draws.size());
    for (const auto& row : chain.draws) col.push_back(row[k]);
    const ParamSummary s = summarize(col);
    nlohmann::ordered_json p;
    p["mean"] = s.mean;
    p["sd"] = s.sd;
    p["q05"] = s.q05;
    p["q50"] = s.q50;
    p["q95"] = s.q95;
    p["ess"] = s.ess;
    params[chain.param_names[k]] = p;
  }
  j["params"] = params;
  j["acceptance"] = {{"vol", chain.accept_rate_vol},
                     {"par", chain.accept_rate_par}};
  j["config"] = {{"errors", errors},
                 {"iters", cfg.n_iter},
                 {"burnin", cfg.burn_in},
                 {"thin", cfg.thin},
                 {"eps_vol", chain.eps_vol},
                 {"eps_par", chain.eps_par},
                 {"full_mala", cfg.full_mala},
                 {"adapt", cfg.adapt}};
  j["seed"] = cfg.seed;
  return j;
}

inline void write_summary_json(const std::string& path,
                               const ChainOutput& chain,
                               const McmcConfig& cfg,
                               const std::string& errors) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << summary_json(chain, cfg, errors).dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

// --- simulated series CSV ----------------------------------------------

inline void write_simulation_csv(const std::string& path,
                                 const Simulation& sim) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "t,y,h\n";
  for (std::size_t t = 0; t < sim.y.size(); ++t)
    out << t + 1 << ',' << format_g17(sim.y[t]) << ',' << format_g17(sim.h[t])
        << '\n';
  if (!out) throw DataError("write failed: " + path);
}

// --- VaR backtest CSV ---------------------------------------------------

inline void write_backtest_csv(const std::string& path,
                               const VarBacktest& bt) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "index,return,var,exceeded\n";
  for (const auto& w : bt.windows)
    out << w.index << ',' << format_g17(w.ret) << ','
        << format_g17(w.var_point) << ',' << (w.exceeded ? 1 : 0) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

// --- MC result CSV ------------------------------------------------------

inline void write_mc_csv(const std::string& path, const McResult& res,
                         const std::string& family,
                         const std::string& scheme) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "family,scheme,param,truth,bias,smse,reps,failures\n";
  for (std::size_t j = 0; j < res.param_names.size(); ++j)
    out << family << ',' << scheme << ',' << res.param_names[j] << ','
        << format_g17(res.truth[j]) << ',' << format_g17(res.bias[j]) << ','
        << format_g17(res.smse[j]) << ',' << res.estimates.size() << ','
        << res.failures << '\n';
  if (!out) throw DataError("write failed: " + path);
}

// --- plot-ready data ----------------------------------------------------

inline void write_acf_csv(const std::string& path, const ChainOutput& chain,
                          std::size_t max_lag) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  const std::size_t dim = chain.param_names.size();
  std::vector<std::vector<double>> acfs(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> col;
    col.reserve(chain.draws.size());
    for (const auto& row : chain.draws) col.push_back(row[j]);
    acfs[j] = acf(col, max_lag);
  }
  out << "lag";
  for (const auto& name : chain.param_names) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < acfs[0].size(); ++k) {
    out << k;
    for (std::size_t j = 0; j < dim; ++j) out << ',' << format_g17(acfs[j][k]);
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

inline void write_trace_csv(const std::string& path, const ChainOutput& chain,
                            std::size_t max_points) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "draw";
  for (const auto& name : chain.param_names) out << ',' << name;
  out << '\n';
  const std::size_t kept = chain.draws.size();
  const std::size_t stride = kept > max_points ? (kept + max_points - 1) / max_points : 1;
  for (std::size_t i = 0; i < kept; i += stride) {
    out << i + 1;
    for (double v : chain.draws[i]) out << ',' << format_g17(v);
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

// Gaussian kernel density on a regular grid, Silverman bandwidth.
inline void write_density_csv(const std::string& path,
                              const ChainOutput& chain,
                              std::size_t grid_points = 200) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "param,value,density\n";
  for (std::size_t j = 0; j < chain.param_names.size(); ++j) {
    std::vector<double> col;
    col.reserve(chain.draws.size());
    for (const auto& row : chain.draws) col.push_back(row[j]);
    const ParamSummary s = summarize(col);
    std::vector<double> sorted(col);
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(s.sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = s.sd > 0.0 ? s.sd : 1e-8;
    const double bw =
        0.9 * spread * std::pow(static_cast<double>(col.size()), -0.2);
    const double lo = sorted.front() - 3.0 * bw;
    const double hi = sorted.back() + 3.0 * bw;
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    for (std::size_t g = 0; g < grid_points; ++g) {
      const double x = lo + step * static_cast<double>(g);
      double dens = 0.0;
      for (double v : col) {
        const double z = (x - v) / bw;
        dens += std::exp(-0.5 * z * z);
      }
      dens /= static_cast<double>(col.size()) * bw * std::sqrt(2.0 * 3.141592653589793);
      out << chain.param_names[j] << ',' << format_g17(x) << ','
          << format_g17(dens) << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

// Per-time volatility path: posterior mean/median of h_t and exp(median/2).
inline void write_volpath_csv(const std::string& path,
                              const std::vector<double>& y,
                              const ChainOutput& chain) {
  if (chain.h_mean.size() != y.size() || chain.h_median.size() != y.size())
    throw std::invalid_argument("write_volpath_csv: h summaries missing");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "t,y,h_mean,h_median,vol\n";
  for (std::size_t t = 0; t < y.size(); ++t)
    out << t + 1 << ',' << format_g17(y[t]) << ',' << format_g17(chain.h_mean[t])
        << ',' << format_g17(chain.h_median[t]) << ','
        << format_g17(std::exp(0.5 * chain.h_median[t])) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace svl
