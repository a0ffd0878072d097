// sv: simulate, fit, and stress stochastic volatility models from the shell.
//
// Subcommands: simulate | fit | mc | var-backtest | describe.
// Every long flag can also be given in a flat key=value config file passed
// with --config; explicit flags win over config values, unknown keys fail.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svl/io.hpp"
#include "svl/model.hpp"
#include "svl/monte_carlo.hpp"
#include "svl/rng.hpp"
#include "svl/sv_sampler.hpp"
#include "svl/var.hpp"

namespace {

// Flat key=value config; each key mirrors a long flag (without dashes).
// Values given on the command line win; unknown or duplicate keys fail.
class KvConfig {
 public:
  KvConfig() = default;

  explicit KvConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
      ++row;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config row " + std::to_string(row) +
                                    ": expected key=value");
      const std::string key = trim(t.substr(0, eq));
      if (key.empty())
        throw std::invalid_argument("config row " + std::to_string(row) +
                                    ": empty key");
      if (kv_.count(key))
        throw std::invalid_argument("config: duplicate key '" + key + "'");
      kv_[key] = trim(t.substr(eq + 1));
    }
  }

  template <class T>
  void take(const CLI::App* cmd, const std::string& flag, T& var) {
    const auto it = kv_.find(flag);
    if (it == kv_.end()) return;
    used_.insert(flag);
    if (cmd->count("--" + flag) > 0) return;  // command line wins
    parse_value(flag, it->second, var);
  }

  void finish() const {
    for (const auto& [key, val] : kv_)
      if (!used_.count(key))
        throw std::invalid_argument("config: unknown key '" + key + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static void parse_value(const std::string& key, const std::string& val,
                          bool& var) {
    if (val == "true" || val == "1") var = true;
    else if (val == "false" || val == "0") var = false;
    else throw std::invalid_argument("config key '" + key +
                                     "': expected true|false");
  }

  static void parse_value(const std::string& key, const std::string& val,
                          std::string& var) {
    if (val.empty())
      throw std::invalid_argument("config key '" + key + "': empty value");
    var = val;
  }

  template <class T>
  static void parse_value(const std::string& key, const std::string& val,
                          T& var) {
    std::istringstream is(val);
    is >> var;
    if (is.fail() || !is.eof())
      throw std::invalid_argument("config key '" + key +
                                  "': bad value '" + val + "'");
  }

  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

svl::ErrorTag parse_errors(const std::string& s) {
  if (s == "gaussian") return svl::ErrorTag::Gaussian;
  if (s == "ged") return svl::ErrorTag::Ged;
  if (s == "t") return svl::ErrorTag::StudentT;
  throw std::invalid_argument("unknown error family '" + s +
                              "' (expected gaussian|ged|t)");
}

double resolve_nu(svl::ErrorTag tag, double nu_flag) {
  if (std::isfinite(nu_flag)) return nu_flag;
  switch (tag) {
    case svl::ErrorTag::Ged: return 2.0;
    case svl::ErrorTag::StudentT: return 8.0;
    default: return 0.0;
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

struct ChainFlags {
  long iters = 20000;
  long burnin = 10000;
  long thin = 1;
  std::uint64_t seed = 1;
  double eps_vol = 0.05;
  double eps_par = 0.5;
  double target_accept = 0.574;
  bool no_adapt = false;
  bool full_mala = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--iters", iters, "total MCMC iterations");
    cmd->add_option("--burnin", burnin, "burn-in iterations discarded");
    cmd->add_option("--thin", thin, "keep every thin-th draw");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--eps-vol", eps_vol, "initial step size, volatility block");
    cmd->add_option("--eps-par", eps_par, "initial step size, parameter block");
    cmd->add_option("--target-accept", target_accept,
                    "acceptance rate targeted during adaptation");
    cmd->add_flag("--no-adapt", no_adapt, "disable step-size adaptation");
    cmd->add_flag("--full-mala", full_mala,
                  "use plain MALA for the parameter block too");
  }

  void apply(const CLI::App* cmd, KvConfig& cf) {
    cf.take(cmd, "iters", iters);
    cf.take(cmd, "burnin", burnin);
    cf.take(cmd, "thin", thin);
    cf.take(cmd, "seed", seed);
    cf.take(cmd, "eps-vol", eps_vol);
    cf.take(cmd, "eps-par", eps_par);
    cf.take(cmd, "target-accept", target_accept);
    cf.take(cmd, "no-adapt", no_adapt);
    cf.take(cmd, "full-mala", full_mala);
  }

  svl::McmcConfig config() const {
    svl::McmcConfig cfg;
    cfg.n_iter = iters;
    cfg.burn_in = burnin;
    cfg.thin = thin;
    cfg.seed = seed;
    cfg.eps_vol = eps_vol;
    cfg.eps_par = eps_par;
    cfg.target_accept = target_accept;
    cfg.adapt = !no_adapt;
    cfg.full_mala = full_mala;
    return cfg;
  }
};

int cmd_simulate(const std::string& errors, double beta, double phi,
                 double sigma, double nu_flag, long n, std::uint64_t seed,
                 const std::string& out) {
  const svl::ErrorTag tag = parse_errors(errors);
  svl::ModelParams params;
  params.beta = beta;
  params.phi = phi;
  params.sigma = sigma;
  params.family = svl::ErrorFamily{tag, resolve_nu(tag, nu_flag)};
  if (!params.valid())
    throw std::invalid_argument("invalid model parameters for simulate");
  if (n < 2) throw std::invalid_argument("simulate: need --n >= 2");
  svl::Rng rng(seed);
  const svl::Simulation sim = svl::simulate(params, static_cast<std::size_t>(n), rng);
  svl::write_simulation_csv(out, sim);
  std::printf("wrote %s (%ld observations)\n", out.c_str(), n);
  return 0;
}

int cmd_fit(const std::string& data_path, bool prices, bool no_demean,
            const std::string& errors, const ChainFlags& flags,
            const std::string& outdir) {
  const svl::ErrorTag tag = parse_errors(errors);
  std::vector<double> y = svl::load_series(
      data_path, prices ? svl::SeriesKind::Prices : svl::SeriesKind::Returns);
  if (!no_demean) y = svl::demean(y);
  const svl::McmcConfig cfg = flags.config();
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw svl::DataError("cannot create output directory " + outdir);
  const svl::ChainOutput chain = svl::run_chain(y, svl::default_init(tag), {}, cfg);

  svl::write_chain_csv(join_path(outdir, "chain.csv"), chain, cfg.burn_in, cfg.thin);
  svl::write_summary_json(join_path(outdir, "summary.json"), chain, cfg, errors);
  const std::size_t max_lag = std::min<std::size_t>(100, chain.kept() - 1);
  svl::write_acf_csv(join_path(outdir, "acf.csv"), chain, max_lag);
  svl::write_trace_csv(join_path(outdir, "trace.csv"), chain, 2000);
  svl::write_density_csv(join_path(outdir, "density.csv"), chain);
  svl::write_volpath_csv(join_path(outdir, "volpath.csv"), y, chain);

  std::printf("%s\n", svl::summary_json(chain, cfg, errors).dump(2).c_str());
  std::fprintf(stderr,
               "wrote chain.csv summary.json acf.csv trace.csv density.csv "
               "volpath.csv in %s\n", outdir.c_str());
  return 0;
}

int cmd_mc(const std::string& errors, double beta, double phi, double sigma,
           double nu_flag, long n, long reps, bool no_init_truth,
           const ChainFlags& flags, std::uint64_t master_seed,
           const std::string& out) {
  const svl::ErrorTag tag = parse_errors(errors);
  svl::McExperiment exp;
  exp.truth.beta = beta;
  exp.truth.phi = phi;
  exp.truth.sigma = sigma;
  exp.truth.family = svl::ErrorFamily{tag, resolve_nu(tag, nu_flag)};
  exp.n_obs = static_cast<std::size_t>(n);
  exp.m_reps = static_cast<std::size_t>(reps);
  exp.cfg = flags.config();
  exp.full_mala = flags.full_mala;
  exp.init_at_truth = !no_init_truth;
  exp.master_seed = master_seed;
  exp.cfg.validate();
  const svl::McResult res = svl::run_mc(exp);
  if (res.estimates.empty())
    throw std::runtime_error("mc: every replication failed");
  const std::string scheme = flags.full_mala ? "mala" : "mmala";
  svl::write_mc_csv(out, res, errors, scheme);
  std::printf("%-8s %12s %12s %12s\n", "param", "truth", "bias", "smse");
  for (std::size_t j = 0; j < res.param_names.size(); ++j)
    std::printf("%-8s %12.6f %12.6f %12.6f\n", res.param_names[j].c_str(),
                res.truth[j], res.bias[j], res.smse[j]);
  std::printf("replications %zu, failures %d; wrote %s\n",
              res.estimates.size(), res.failures, out.c_str());
  return 0;
}

int cmd_var_backtest(const std::string& data_path, bool prices, bool no_demean,
                     const std::string& errors, long window, double level,
                     long l_draws, const ChainFlags& flags, long warm_iters,
                     long warm_burnin, bool no_warm_start,
                     const std::string& out) {
  const svl::ErrorTag tag = parse_errors(errors);
  std::vector<double> y = svl::load_series(
      data_path, prices ? svl::SeriesKind::Prices : svl::SeriesKind::Returns);
  if (!no_demean) y = svl::demean(y);
  if (window < 1) throw std::invalid_argument("var-backtest: --window < 1");
  if (l_draws < 1) throw std::invalid_argument("var-backtest: --ldraws < 1");
  svl::BacktestConfig bt;
  bt.window = static_cast<std::size_t>(window);
  bt.level = level;
  bt.l_draws = static_cast<std::size_t>(l_draws);
  bt.first_fit = flags.config();
  bt.warm_fit = flags.config();
  bt.warm_fit.n_iter = warm_iters;
  bt.warm_fit.burn_in = warm_burnin;
  bt.warm_start = !no_warm_start;
  bt.seed = flags.seed;
  bt.first_fit.validate();
  bt.warm_fit.validate();
  const svl::VarBacktest res = svl::rolling_backtest(y, svl::default_init(tag), bt);
  if (!res.windows.empty() &&
      res.failures == static_cast<long>(res.windows.size()))
    throw std::runtime_error("var-backtest: every window fit failed");
  svl::write_backtest_csv(out, res);
  std::printf("windows %zu, exceedances %zu (expected %.2f at level %g), "
              "failed fits %ld; wrote %s\n",
              res.windows.size(), res.exceedance_count,
              (1.0 - level) * static_cast<double>(res.windows.size()), level,
              res.failures, out.c_str());
  return 0;
}

int cmd_describe(const std::string& data_path, bool prices) {
  const std::vector<double> y = svl::load_series(
      data_path, prices ? svl::SeriesKind::Prices : svl::SeriesKind::Returns);
  const svl::DescriptiveStats s = svl::describe(y);
  std::printf("n         %zu\n", s.n);
  std::printf("mean      %.6g\n", s.mean);
  std::printf("sd        %.6g\n", s.sd);
  std::printf("skewness  %.6g\n", s.skewness);
  std::printf("kurtosis  %.6g  (raw convention, normal = 3)\n", s.kurtosis);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian stochastic volatility: simulation, MCMC fitting, "
               "Monte Carlo studies, and VaR backtests"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a return/volatility path");
  std::string sim_errors = "gaussian", sim_out = "sim.csv";
  double sim_beta = 0.65, sim_phi = 0.98, sim_sigma = 0.15;
  double sim_nu = std::numeric_limits<double>::quiet_NaN();
  long sim_n = 1000;
  std::uint64_t sim_seed = 1;
  sim->add_option("--errors", sim_errors, "error family: gaussian|ged|t");
  sim->add_option("--beta", sim_beta, "scale parameter");
  sim->add_option("--phi", sim_phi, "log-volatility persistence");
  sim->add_option("--sigma", sim_sigma, "log-volatility innovation sd");
  sim->add_option("--nu", sim_nu, "tail parameter (ged default 2, t default 8)");
  sim->add_option("--n", sim_n, "series length");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "output CSV path");
  std::string sim_config;
  sim->add_option("--config", sim_config, "flat key=value config file");

  // fit
  auto* fit = app.add_subcommand("fit", "fit an SV model by MCMC");
  std::string fit_data, fit_errors = "gaussian", fit_outdir = ".";
  bool fit_prices = false, fit_no_demean = false;
  ChainFlags fit_flags;
  fit->add_option("data", fit_data, "CSV of returns (or prices with --prices)")
      ->required();
  fit->add_option("--errors", fit_errors, "error family: gaussian|ged|t");
  fit->add_flag("--prices", fit_prices, "input is price levels");
  fit->add_flag("--no-demean", fit_no_demean, "do not demean the returns");
  fit->add_option("--outdir", fit_outdir, "directory for output files");
  fit_flags.attach(fit);
  std::string fit_config;
  fit->add_option("--config", fit_config, "flat key=value config file");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo bias/smse study");
  std::string mc_errors = "gaussian", mc_out = "mc.csv";
  double mc_beta = 0.65, mc_phi = 0.98, mc_sigma = 0.15;
  double mc_nu = std::numeric_limits<double>::quiet_NaN();
  long mc_n = 1000, mc_reps = 50;
  bool mc_no_init_truth = false;
  ChainFlags mc_flags;
  mc->add_option("--errors", mc_errors, "error family: gaussian|ged|t");
  mc->add_option("--beta", mc_beta, "true scale");
  mc->add_option("--phi", mc_phi, "true persistence");
  mc->add_option("--sigma", mc_sigma, "true innovation sd");
  mc->add_option("--nu", mc_nu, "true tail parameter");
  mc->add_option("--n", mc_n, "observations per replication");
  mc->add_option("--reps", mc_reps, "number of replications");
  mc->add_flag("--no-init-truth", mc_no_init_truth,
               "start chains from prior medians instead of the truth");
  mc->add_option("--out", mc_out, "output CSV path");
  mc_flags.attach(mc);
  std::string mc_config;
  mc->add_option("--config", mc_config, "flat key=value config file");

  // var-backtest
  auto* vb = app.add_subcommand("var-backtest",
                                "rolling one-step-ahead VaR backtest");
  std::string vb_data, vb_errors = "gaussian", vb_out = "backtest.csv";
  bool vb_prices = false, vb_no_demean = false, vb_no_warm = false;
  long vb_window = 252, vb_ldraws = 1000, vb_warm_iters = 4000,
       vb_warm_burnin = 2000;
  double vb_level = 0.99;
  ChainFlags vb_flags;
  vb->add_option("data", vb_data, "CSV of returns (or prices with --prices)")
      ->required();
  vb->add_option("--errors", vb_errors, "error family: gaussian|ged|t");
  vb->add_flag("--prices", vb_prices, "input is price levels");
  vb->add_flag("--no-demean", vb_no_demean, "do not demean the returns");
  vb->add_option("--window", vb_window, "number of one-step-ahead forecasts");
  vb->add_option("--level", vb_level, "VaR level, e.g. 0.99");
  vb->add_option("--ldraws", vb_ldraws, "error draws per posterior draw");
  vb->add_option("--warm-iters", vb_warm_iters, "iterations for warm refits");
  vb->add_option("--warm-burnin", vb_warm_burnin, "burn-in for warm refits");
  vb->add_flag("--no-warm-start", vb_no_warm, "cold-start every window");
  vb->add_option("--out", vb_out, "output CSV path");
  vb_flags.attach(vb);
  std::string vb_config;
  vb->add_option("--config", vb_config, "flat key=value config file");

  // describe
  auto* desc = app.add_subcommand("describe", "descriptive statistics");
  std::string desc_data;
  bool desc_prices = false;
  desc->add_option("data", desc_data, "CSV of returns (or prices with --prices)")
      ->required();
  desc->add_flag("--prices", desc_prices, "input is price levels");
  std::string desc_config;
  desc->add_option("--config", desc_config, "flat key=value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      KvConfig cf = sim_config.empty() ? KvConfig() : KvConfig(sim_config);
      cf.take(sim, "errors", sim_errors);
      cf.take(sim, "beta", sim_beta);
      cf.take(sim, "phi", sim_phi);
      cf.take(sim, "sigma", sim_sigma);
      cf.take(sim, "nu", sim_nu);
      cf.take(sim, "n", sim_n);
      cf.take(sim, "seed", sim_seed);
      cf.take(sim, "out", sim_out);
      cf.finish();
      return cmd_simulate(sim_errors, sim_beta, sim_phi, sim_sigma, sim_nu,
                          sim_n, sim_seed, sim_out);
    }
    if (fit->parsed()) {
      KvConfig cf = fit_config.empty() ? KvConfig() : KvConfig(fit_config);
      cf.take(fit, "errors", fit_errors);
      cf.take(fit, "prices", fit_prices);
      cf.take(fit, "no-demean", fit_no_demean);
      cf.take(fit, "outdir", fit_outdir);
      fit_flags.apply(fit, cf);
      cf.finish();
      return cmd_fit(fit_data, fit_prices, fit_no_demean, fit_errors,
                     fit_flags, fit_outdir);
    }
    if (mc->parsed()) {
      KvConfig cf = mc_config.empty() ? KvConfig() : KvConfig(mc_config);
      cf.take(mc, "errors", mc_errors);
      cf.take(mc, "beta", mc_beta);
      cf.take(mc, "phi", mc_phi);
      cf.take(mc, "sigma", mc_sigma);
      cf.take(mc, "nu", mc_nu);
      cf.take(mc, "n", mc_n);
      cf.take(mc, "reps", mc_reps);
      cf.take(mc, "no-init-truth", mc_no_init_truth);
      cf.take(mc, "out", mc_out);
      mc_flags.apply(mc, cf);
      cf.finish();
      return cmd_mc(mc_errors, mc_beta, mc_phi, mc_sigma, mc_nu, mc_n, mc_reps,
                    mc_no_init_truth, mc_flags, mc_flags.seed, mc_out);
    }
    if (vb->parsed()) {
      KvConfig cf = vb_config.empty() ? KvConfig() : KvConfig(vb_config);
      cf.take(vb, "errors", vb_errors);
      cf.take(vb, "prices", vb_prices);
      cf.take(vb, "no-demean", vb_no_demean);
      cf.take(vb, "window", vb_window);
      cf.take(vb, "level", vb_level);
      cf.take(vb, "ldraws", vb_ldraws);
      cf.take(vb, "warm-iters", vb_warm_iters);
      cf.take(vb, "warm-burnin", vb_warm_burnin);
      cf.take(vb, "no-warm-start", vb_no_warm);
      cf.take(vb, "out", vb_out);
      vb_flags.apply(vb, cf);
      cf.finish();
      return cmd_var_backtest(vb_data, vb_prices, vb_no_demean, vb_errors,
                              vb_window, vb_level, vb_ldraws, vb_flags,
                              vb_warm_iters, vb_warm_burnin, vb_no_warm,
                              vb_out);
    }
    if (desc->parsed()) {
      KvConfig cf = desc_config.empty() ? KvConfig() : KvConfig(desc_config);
      cf.take(desc, "prices", desc_prices);
      cf.finish();
      return cmd_describe(desc_data, desc_prices);
    }
  } catch (const svl::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 1;
}
