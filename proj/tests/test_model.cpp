#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "svl/model.hpp"

using Catch::Approx;
using svl::ErrorFamily;
using svl::ErrorTag;
using svl::ModelParams;
using svl::TransformedParams;

TEST_CASE("transform round trips", "[model]") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 10000; ++rep) {
    ModelParams th;
    th.beta = 0.05 + 3.0 * u(gen);
    th.sigma = 0.01 + 1.5 * u(gen);
    th.phi = -0.999 + 1.998 * u(gen);
    const int fam = rep % 3;
    if (fam == 0) th.family = ErrorFamily::gaussian();
    if (fam == 1) th.family = ErrorFamily::ged(0.8 + 3.0 * u(gen));
    if (fam == 2) th.family = ErrorFamily::student_t(4.0 + 1e-3 + 20.0 * u(gen));
    const TransformedParams xi = svl::to_unconstrained(th);
    const ModelParams back = svl::from_unconstrained(xi, th.family.tag);
    REQUIRE(back.beta == Approx(th.beta).epsilon(1e-12));
    REQUIRE(back.sigma == Approx(th.sigma).epsilon(1e-12));
    REQUIRE(back.phi == Approx(th.phi).margin(1e-12));
    if (fam != 0) REQUIRE(back.family.nu == Approx(th.family.nu).epsilon(1e-10));
  }
}

TEST_CASE("transform fixed points", "[model]") {
  TransformedParams xi;  // all zeros
  ModelParams th = svl::from_unconstrained(xi, ErrorTag::Gaussian);
  REQUIRE(th.beta == 1.0);
  REQUIRE(th.sigma == 1.0);
  REQUIRE(th.phi == 0.0);
  xi.p = std::log(1.6);
  REQUIRE(svl::from_unconstrained(xi, ErrorTag::Ged).family.nu == Approx(1.6));
  xi.p = std::log(3.0);
  REQUIRE(svl::from_unconstrained(xi, ErrorTag::StudentT).family.nu == Approx(7.0));
}

TEST_CASE("log_jacobian", "[model]") {
  TransformedParams xi;
  REQUIRE(svl::log_jacobian(xi, ErrorTag::Gaussian) == Approx(0.0).margin(1e-15));
  xi.gamma = std::log(0.15);
  REQUIRE(svl::log_jacobian(xi, ErrorTag::Gaussian) ==
          Approx(std::log(0.15)).epsilon(1e-13));
  TransformedParams xt;
  xt.p = std::log(3.0);  // student-t nu = 7: d nu/d p = 3
  REQUIRE(svl::log_jacobian(xt, ErrorTag::StudentT) ==
          Approx(std::log(3.0)).epsilon(1e-13));
}

TEST_CASE("log_prior fixed values and support", "[model]") {
  ModelParams th;
  th.beta = 1.0;
  th.sigma = 1.0;
  th.phi = 0.0;
  th.family = ErrorFamily::gaussian();
  // -beta - 1/(4 sigma^2) + 19 ln(1/2) + (1/2) ln(1/2)
  const double expect = -1.0 - 0.25 + 19.5 * std::log(0.5);
  REQUIRE(svl::log_prior(th) == Approx(expect).epsilon(1e-13));

  th.family = ErrorFamily::ged(1.6);
  REQUIRE(svl::log_prior(th) ==
          Approx(expect - 4.0 / 1.6 - 3.0 * std::log(1.6)).epsilon(1e-13));

  th.family = ErrorFamily::student_t(4.0);
  REQUIRE(svl::log_prior(th) == Approx(expect + std::log(1.0 / 3.0)).epsilon(1e-13));

  th.family = ErrorFamily::student_t(3.0);  // below the prior support
  REQUIRE(std::isinf(svl::log_prior(th)));

  ModelParams bad = th;
  bad.family = ErrorFamily::gaussian();
  bad.beta = -1.0;
  REQUIRE(std::isinf(svl::log_prior(bad)));
  bad.beta = 1.0;
  bad.phi = 1.0;
  REQUIRE(std::isinf(svl::log_prior(bad)));
}

TEST_CASE("log_joint single-observation fixed value", "[model]") {
  ModelParams th;
  th.beta = 1.0;
  th.sigma = 1.0;
  th.phi = 0.0;
  th.family = ErrorFamily::gaussian();
  // h1 ~ N(0,1) at 0 and eps = 0: -ln(2 pi)
  REQUIRE(svl::log_joint({0.0}, {0.0}, th) ==
          Approx(-1.8378770664093454).epsilon(1e-13));
}

TEST_CASE("log_joint composes AR(1) and observation terms", "[model]") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z;
  for (int fam = 0; fam < 3; ++fam) {
    ModelParams th;
    th.beta = 0.65;
    th.sigma = 0.15;
    th.phi = 0.98;
    th.family = fam == 0   ? ErrorFamily::gaussian()
                : fam == 1 ? ErrorFamily::ged(1.6)
                           : ErrorFamily::student_t(7.0);
    const std::size_t n = 40;
    std::vector<double> y(n), h(n);
    for (auto& v : h) v = 0.6 * z(gen);
    for (auto& v : y) v = 0.65 * z(gen);

    // independent recomposition from the error densities
    const double s2 = th.sigma * th.sigma, om = 1.0 - th.phi * th.phi;
    double expect = -0.5 * std::log(2.0 * M_PI * s2 / om) - 0.5 * om * h[0] * h[0] / s2;
    for (std::size_t t = 1; t < n; ++t) {
      const double d = h[t] - th.phi * h[t - 1];
      expect += -0.5 * std::log(2.0 * M_PI * s2) - 0.5 * d * d / s2;
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double st = th.beta * std::exp(0.5 * h[t]);
      expect += svl::error_logpdf(th.family, y[t] / st) - std::log(st);
    }
    REQUIRE(svl::log_joint(y, h, th) == Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("ged nu=2 joint equals the gaussian joint", "[model]") {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> z;
  ModelParams tg, te;
  tg.beta = te.beta = 0.8;
  tg.sigma = te.sigma = 0.3;
  tg.phi = te.phi = 0.9;
  tg.family = ErrorFamily::gaussian();
  te.family = ErrorFamily::ged(2.0);
  std::vector<double> y(30), h(30);
  for (auto& v : h) v = z(gen);
  for (auto& v : y) v = z(gen);
  REQUIRE(svl::log_joint(y, h, te) == Approx(svl::log_joint(y, h, tg)).epsilon(1e-10));
}

TEST_CASE("changing one observation only moves its own term", "[model]") {
  ModelParams th;
  th.beta = 0.65;
  th.sigma = 0.15;
  th.phi = 0.98;
  th.family = ErrorFamily::ged(1.6);
  std::vector<double> y{0.1, -0.4, 0.2, 0.9, -0.3};
  std::vector<double> h{0.0, 0.1, -0.2, 0.05, 0.3};
  const double base = svl::log_joint(y, h, th);
  std::vector<double> y2(y);
  y2[2] = -1.7;
  const double moved = svl::log_joint(y2, h, th);
  const double st = th.beta * std::exp(0.5 * h[2]);
  const double delta = svl::error_logpdf(th.family, y2[2] / st) -
                       svl::error_logpdf(th.family, y[2] / st);
  REQUIRE(moved - base == Approx(delta).epsilon(1e-12));
}

TEST_CASE("param_log_target adds prior and change of variables", "[model]") {
  ModelParams th;
  th.beta = 0.65;
  th.sigma = 0.15;
  th.phi = 0.9;
  th.family = ErrorFamily::student_t(7.0);
  const TransformedParams xi = svl::to_unconstrained(th);
  std::vector<double> y{0.3, -0.2, 0.5};
  std::vector<double> h{0.1, 0.0, -0.1};
  const double expect = svl::log_joint(y, h, th) + svl::log_prior(th) +
                        std::log(th.beta) + std::log(1.0 - th.phi * th.phi) +
                        std::log(th.family.nu - 4.0);
  REQUIRE(svl::param_log_target(y, h, xi, ErrorTag::StudentT) ==
          Approx(expect).epsilon(1e-12));
}

TEST_CASE("simulate reproduces the stationary law of h", "[model][mc]") {
  ModelParams th;
  th.beta = 0.65;
  th.sigma = 0.15;
  th.phi = 0.98;
  th.family = ErrorFamily::gaussian();
  svl::Rng rng(2024);
  auto sim = svl::simulate(th, 200000, rng);
  // var h = sigma^2/(1-phi^2) = 0.0225/0.0396
  REQUIRE(oracles::variance(sim.h) == Approx(0.0225 / 0.0396).epsilon(0.05));
  // lag-1 autocorrelation close to phi
  double num = 0.0, den = 0.0;
  const double mh = oracles::mean(sim.h);
  for (std::size_t t = 1; t < sim.h.size(); ++t) {
    num += (sim.h[t] - mh) * (sim.h[t - 1] - mh);
    den += (sim.h[t] - mh) * (sim.h[t] - mh);
  }
  REQUIRE(num / den == Approx(th.phi).margin(0.005));
}

TEST_CASE("simulated returns have the model variance when h is off", "[model][mc]") {
  // phi ~ 0, sigma small: var(y) ~ beta^2 E exp(h) ~ beta^2
  ModelParams th;
  th.beta = 2.0;
  th.sigma = 1e-4;
  th.phi = 0.0;
  th.family = ErrorFamily::ged(1.6);
  svl::Rng rng(5);
  auto sim = svl::simulate(th, 300000, rng);
  REQUIRE(oracles::variance(sim.y) == Approx(4.0).epsilon(0.02));
}
