#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

// End-to-end checks of the sv binary: determinism of written artifacts,
// config-file semantics, and the documented exit codes.

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd =
      std::string(SVL_CLI_PATH) + " " + args + " >> cli_log.txt 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ScratchDir {
  fs::path dir;
  explicit ScratchDir(const std::string& name) : dir(name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~ScratchDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const {
    return (dir / name).string();
  }
};

}  // namespace

TEST_CASE("simulate writes identical files for identical seeds", "[cli]") {
  ScratchDir s("cli_sim");
  REQUIRE(run("simulate --beta 0.65 --phi 0.98 --sigma 0.15 "
              "--errors gaussian --n 200 --seed 7 --out " + (s / "a.csv")) == 0);
  REQUIRE(run("simulate --beta 0.65 --phi 0.98 --sigma 0.15 "
              "--errors gaussian --n 200 --seed 7 --out " + (s / "b.csv")) == 0);
  REQUIRE(run("simulate --n 200 --seed 8 --out " + (s / "c.csv")) == 0);
  const std::string a = slurp(s / "a.csv");
  REQUIRE(a == slurp(s / "b.csv"));
  REQUIRE(a != slurp(s / "c.csv"));
  REQUIRE(a.rfind("t,y,h\n", 0) == 0);
}

TEST_CASE("fit creates a missing output directory", "[cli]") {
  ScratchDir s("cli_fit_mkdir");
  REQUIRE(run("simulate --n 60 --seed 4 --out " + (s / "y.csv")) == 0);
  REQUIRE(run("fit --iters 300 --burnin 100 --seed 2 --outdir " +
              (s / "new/nested") + " " + (s / "y.csv")) == 0);
  REQUIRE(fs::exists(s.dir / "new/nested/summary.json"));
}

TEST_CASE("fit emits byte-identical artifacts under one seed", "[cli]") {
  ScratchDir s("cli_fit");
  REQUIRE(run("simulate --n 80 --seed 3 --out " + (s / "y.csv")) == 0);
  fs::create_directories(s.dir / "r1");
  fs::create_directories(s.dir / "r2");
  const std::string flags = " --iters 400 --burnin 200 --seed 11 ";
  REQUIRE(run("fit" + flags + "--outdir " + (s / "r1") + " " + (s / "y.csv")) == 0);
  REQUIRE(run("fit" + flags + "--outdir " + (s / "r2") + " " + (s / "y.csv")) == 0);
  for (const char* f : {"chain.csv", "summary.json", "acf.csv", "trace.csv",
                        "density.csv", "volpath.csv"}) {
    INFO(f);
    REQUIRE(slurp(s / (std::string("r1/") + f)) ==
            slurp(s / (std::string("r2/") + f)));
  }

  const nlohmann::json j =
      nlohmann::json::parse(slurp(s / "r1/summary.json"));
  REQUIRE(j.at("params").at("beta").at("mean").is_number());
  REQUIRE(j.at("params").at("sigma").at("ess").get<double>() > 0.0);
  REQUIRE(j.at("seed").get<int>() == 11);
  const double vol = j.at("acceptance").at("vol").get<double>();
  REQUIRE(vol > 0.0);
  REQUIRE(vol <= 1.0);
}

TEST_CASE("fit with a t family reports four parameters", "[cli]") {
  ScratchDir s("cli_fit_t");
  REQUIRE(run("simulate --n 60 --seed 5 --errors t --nu 8 --out " +
              (s / "y.csv")) == 0);
  REQUIRE(run("fit --errors t --iters 300 --burnin 150 --seed 2 --outdir " +
              (s / ".") + " " + (s / "y.csv")) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(s / "summary.json"));
  REQUIRE(j.at("params").contains("nu"));
  REQUIRE(j.at("params").at("nu").at("mean").get<double>() >= 4.0);
  const std::string chain = slurp(s / "chain.csv");
  REQUIRE(chain.rfind("iter,beta,phi,sigma,nu,accept_vol,accept_par", 0) == 0);
}

TEST_CASE("config file values apply and explicit flags win", "[cli]") {
  ScratchDir s("cli_cfg");
  REQUIRE(run("simulate --n 60 --seed 4 --out " + (s / "y.csv")) == 0);
  {
    std::ofstream cfg(s / "run.cfg");
    cfg << "# sampler settings\n"
        << "iters=250\n"
        << "burnin=100\n"
        << "seed=9\n";
  }
  REQUIRE(run("fit --config " + (s / "run.cfg") + " --seed 21 --outdir " +
              (s / ".") + " " + (s / "y.csv")) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(s / "summary.json"));
  REQUIRE(j.at("config").at("iters").get<int>() == 250);
  REQUIRE(j.at("config").at("burnin").get<int>() == 100);
  REQUIRE(j.at("seed").get<int>() == 21);  // flag beats config

  {
    std::ofstream cfg(s / "bad.cfg");
    cfg << "itters=250\n";
  }
  REQUIRE(run("fit --config " + (s / "bad.cfg") + " " + (s / "y.csv")) == 1);
}

TEST_CASE("exit codes distinguish usage, data, and numerical errors", "[cli]") {
  ScratchDir s("cli_exit");
  REQUIRE(run("simulate --n 60 --seed 4 --out " + (s / "y.csv")) == 0);

  REQUIRE(run("") == 1);                                      // no subcommand
  REQUIRE(run("frobnicate") == 1);                            // bad subcommand
  REQUIRE(run("fit --errors weird " + (s / "y.csv")) == 1);   // bad family
  REQUIRE(run("fit --iters 10 --burnin 10 " + (s / "y.csv")) == 1);
  REQUIRE(run("simulate --phi 1.5 --out " + (s / "z.csv")) == 1);
  REQUIRE(run("fit " + (s / "absent.csv")) == 2);             // missing file
  REQUIRE(run("describe " + (s / "absent.csv")) == 2);
  {
    std::ofstream f(s / "junk.csv");
    f << "0.5\noops\n0.7\n";
  }
  REQUIRE(run("describe " + (s / "junk.csv")) == 2);          // parse error
  REQUIRE(run("--help") == 0);
  REQUIRE(run("describe " + (s / "y.csv")) == 0);
}

TEST_CASE("mc and var-backtest round-trip through the CLI", "[cli]") {
  ScratchDir s("cli_mc");
  REQUIRE(run("mc --reps 2 --n 120 --iters 400 --burnin 200 --seed 5 --out " +
              (s / "mc.csv")) == 0);
  const std::string mc = slurp(s / "mc.csv");
  REQUIRE(mc.rfind("family,scheme,param,truth,bias,smse,reps,failures", 0) == 0);
  REQUIRE(mc.find("gaussian,mmala,beta,") != std::string::npos);

  REQUIRE(run("simulate --n 150 --seed 9 --out " + (s / "y.csv")) == 0);
  REQUIRE(run("var-backtest --window 4 --iters 300 --burnin 150 "
              "--warm-iters 200 --warm-burnin 100 --ldraws 200 --seed 2 "
              "--out " + (s / "bt.csv") + " " + (s / "y.csv")) == 0);
  const std::string bt = slurp(s / "bt.csv");
  REQUIRE(bt.rfind("index,return,var,exceeded", 0) == 0);
  std::size_t rows = 0;
  for (char c : bt)
    if (c == '\n') ++rows;
  REQUIRE(rows == 5);  // header + one row per window
}
