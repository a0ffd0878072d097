#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "svl/rng.hpp"
#include "svl/tridiag.hpp"

using Catch::Approx;
using svl::DenseChol;
using svl::DenseSPD;
using svl::SymTridiag;
using svl::TridiagChol;

namespace {

// diagonally dominant random SPD tridiagonal
SymTridiag random_tridiag(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymTridiag g;
  g.off.resize(n - 1);
  g.diag.resize(n);
  for (auto& e : g.off) e = u(gen);
  for (std::size_t i = 0; i < n; ++i) {
    double dom = (i > 0 ? std::fabs(g.off[i - 1]) : 0.0) +
                 (i + 1 < n ? std::fabs(g.off[i]) : 0.0);
    g.diag[i] = dom + 0.5 + std::fabs(u(gen));
  }
  return g;
}

}  // namespace

TEST_CASE("tridiagonal cholesky on hand cases", "[tridiag]") {
  SECTION("identity factors to identity") {
    auto c = TridiagChol::factor(SymTridiag::identity(5));
    REQUIRE(c);
    REQUIRE(c->logdet() == Approx(0.0).margin(1e-15));
    std::vector<double> b{1, 2, 3, 4, 5};
    auto x = c->solve(b);
    for (int i = 0; i < 5; ++i) REQUIRE(x[i] == Approx(b[i]).epsilon(1e-15));
  }
  SECTION("2x2 [[2,1],[1,2]]") {
    SymTridiag g{{2.0, 2.0}, {1.0}};
    auto c = TridiagChol::factor(g);
    REQUIRE(c);
    // det = 3
    REQUIRE(c->logdet() == Approx(std::log(3.0)).epsilon(1e-14));
    // solve against hand inverse [[2,-1],[-1,2]]/3
    auto x = c->solve({1.0, 0.0});
    REQUIRE(x[0] == Approx(2.0 / 3.0).epsilon(1e-14));
    REQUIRE(x[1] == Approx(-1.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("solve composed with matvec is the identity", "[tridiag]") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::size_t n : {2ul, 3ul, 17ul, 1000ul, 10000ul}) {
    SymTridiag g = random_tridiag(gen, n);
    auto c = TridiagChol::factor(g);
    REQUIRE(c);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    auto back = c->solve(svl::matvec(g, v));
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      err = std::max(err, std::fabs(back[i] - v[i]));
    REQUIRE(err < 1e-10);
  }
}

TEST_CASE("tridiagonal logdet matches dense on small matrices", "[tridiag]") {
  std::mt19937_64 gen(123);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(gen() % 49);
    SymTridiag g = random_tridiag(gen, n);
    DenseSPD d = DenseSPD::zero(n);
    for (std::size_t i = 0; i < n; ++i) {
      d.at(i, i) = g.diag[i];
      if (i + 1 < n) d.at(i, i + 1) = d.at(i + 1, i) = g.off[i];
    }
    auto ct = TridiagChol::factor(g);
    auto cd = DenseChol::factor(d);
    REQUIRE(ct);
    REQUIRE(cd);
    REQUIRE(ct->logdet() == Approx(cd->logdet()).epsilon(1e-9));
  }
}

TEST_CASE("quad_form agrees with explicit matvec dot", "[tridiag]") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  SymTridiag g = random_tridiag(gen, 200);
  std::vector<double> v(200);
  for (auto& x : v) x = u(gen);
  auto gv = svl::matvec(g, v);
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * gv[i];
  REQUIRE(svl::quad_form(g, v) == Approx(dot).epsilon(1e-12));
}

TEST_CASE("precision sampling has covariance G^{-1}", "[tridiag][mc]") {
  SymTridiag g{{2.0, 2.5, 3.0}, {-0.8, 0.6}};
  auto c = TridiagChol::factor(g);
  REQUIRE(c);
  svl::Rng rng(77);
  const int m = 200000;
  double cov[3][3] = {};
  for (int k = 0; k < m; ++k) {
    auto x = c->sample(rng);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i][j] += x[i] * x[j];
  }
  // G^{-1} via solves of unit vectors
  for (int j = 0; j < 3; ++j) {
    std::vector<double> e(3, 0.0);
    e[j] = 1.0;
    auto col = c->solve(e);
    for (int i = 0; i < 3; ++i) {
      const double se = 3.0 * std::sqrt(2.0 / m);  // rough bound on MC error
      REQUIRE(cov[i][j] / m == Approx(col[i]).margin(se));
    }
  }
}

TEST_CASE("whitening: L' applied to samples gives identity covariance", "[tridiag][mc]") {
  SymTridiag g{{2.0, 2.5, 3.0, 1.7}, {-0.8, 0.6, 0.4}};
  auto c = TridiagChol::factor(g);
  REQUIRE(c);
  svl::Rng rng(78);
  const int m = 100000;
  double cov[4][4] = {};
  for (int k = 0; k < m; ++k) {
    auto z = c->lt_apply(c->sample(rng));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) cov[i][j] += z[i] * z[j];
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      REQUIRE(cov[i][j] / m == Approx(i == j ? 1.0 : 0.0).margin(0.02));
}

TEST_CASE("non positive definite matrices are reported, not factored", "[tridiag]") {
  REQUIRE_FALSE(TridiagChol::factor(SymTridiag{{1.0, -1.0}, {0.0}}));
  // [[1,2],[2,1]] has a negative eigenvalue
  REQUIRE_FALSE(TridiagChol::factor(SymTridiag{{1.0, 1.0}, {2.0}}));
  DenseSPD bad = DenseSPD::identity(3);
  bad.at(2, 2) = -4.0;
  REQUIRE_FALSE(DenseChol::factor(bad));
}

TEST_CASE("jitter ladder repairs near-singular metrics and counts events", "[tridiag]") {
  SECTION("positive semidefinite is rescued by a small jitter") {
    SymTridiag g{{1.0, 0.0}, {0.0}};
    long events = 0;
    auto c = svl::factor_with_jitter(g, &events);
    REQUIRE(c);
    REQUIRE(events >= 1);
  }
  SECTION("strongly indefinite stays unfactorable") {
    DenseSPD bad = DenseSPD::identity(2);
    bad.at(1, 1) = -5.0;
    long events = 0;
    auto c = svl::factor_with_jitter(bad, &events);
    REQUIRE_FALSE(c);
    REQUIRE(events == 4);
  }
}

TEST_CASE("dense cholesky solves and samples", "[tridiag]") {
  DenseSPD g = DenseSPD::zero(4);
  // A'A + I for a fixed A
  const double a[4][4] = {{1, 2, 0, 1}, {0, 1, 1, 0}, {2, 0, 1, 1}, {1, 1, 0, 2}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = (i == j) ? 1.0 : 0.0;
      for (int k = 0; k < 4; ++k) s += a[k][i] * a[k][j];
      g.at(i, j) = s;
    }
  auto c = DenseChol::factor(g);
  REQUIRE(c);
  std::vector<double> v{0.3, -1.2, 0.8, 2.0};
  auto back = c->solve(svl::matvec(g, v));
  for (int i = 0; i < 4; ++i) REQUIRE(back[i] == Approx(v[i]).epsilon(1e-12));
  REQUIRE(svl::quad_form(g, v) ==
          Approx([&] {
            auto gv = svl::matvec(g, v);
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += v[i] * gv[i];
            return s;
          }()).epsilon(1e-12));
}

TEST_CASE("size mismatches throw", "[tridiag]") {
  SymTridiag g = SymTridiag::identity(4);
  auto c = TridiagChol::factor(g);
  REQUIRE(c);
  REQUIRE_THROWS_AS(c->solve({1.0, 2.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(svl::matvec(g, {1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(svl::quad_form(g, {1.0}), std::invalid_argument);
}
