#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svl/rng.hpp"

// Symmetric positive definite matrices in the two shapes the samplers need:
// tridiagonal with O(n) storage (the latent-volatility metric) and small
// dense (the parameter-block metric, d <= 8). Both expose Cholesky-based
// solve / logdet / precision sampling. A failed factorization is reported to
// the caller, who decides whether to jitter.

namespace svl {

struct SymTridiag {
  std::vector<double> diag;  // n entries
  std::vector<double> off;   // n-1 entries

  std::size_t size() const { return diag.size(); }

  static SymTridiag identity(std::size_t n) {
    SymTridiag m;
    m.diag.assign(n, 1.0);
    m.off.assign(n > 0 ? n - 1 : 0, 0.0);
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (double d : diag) t += d;
    return t;
  }
};

inline std::vector<double> matvec(const SymTridiag& m,
                                  const std::vector<double>& v) {
  const std::size_t n = m.size();
  if (v.size() != n) throw std::invalid_argument("matvec: size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = m.diag[i] * v[i];
    if (i > 0) s += m.off[i - 1] * v[i - 1];
    if (i + 1 < n) s += m.off[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

// v' M v in O(n), without forming M v.
inline double quad_form(const SymTridiag& m, const std::vector<double>& v) {
  const std::size_t n = m.size();
  if (v.size() != n) throw std::invalid_argument("quad_form: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += m.diag[i] * v[i] * v[i];
    if (i + 1 < n) s += 2.0 * m.off[i] * v[i] * v[i + 1];
  }
  return s;
}

// Cholesky G = L L' with L lower bidiagonal: l (diagonal), e (subdiagonal).
class TridiagChol {
 public:
  static std::optional<TridiagChol> factor(const SymTridiag& g) {
    const std::size_t n = g.size();
    if (n == 0) throw std::invalid_argument("TridiagChol: empty matrix");
    TridiagChol c;
    c.l_.resize(n);
    c.e_.resize(n > 0 ? n - 1 : 0);
    double d = g.diag[0];
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    c.l_[0] = std::sqrt(d);
    for (std::size_t i = 1; i < n; ++i) {
      c.e_[i - 1] = g.off[i - 1] / c.l_[i - 1];
      d = g.diag[i] - c.e_[i - 1] * c.e_[i - 1];
      if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
      c.l_[i] = std::sqrt(d);
    }
    return c;
  }

  std::size_t size() const { return l_.size(); }

  // Solve G x = b.
  std::vector<double> solve(const std::vector<double>& b) const {
    const std::size_t n = size();
    if (b.size() != n) throw std::invalid_argument("solve: size mismatch");
    std::vector<double> x(n);
    // forward: L y = b
    x[0] = b[0] / l_[0];
    for (std::size_t i = 1; i < n; ++i)
      x[i] = (b[i] - e_[i - 1] * x[i - 1]) / l_[i];
    // backward: L' x = y
    x[n - 1] /= l_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
      x[i] = (x[i] - e_[i] * x[i + 1]) / l_[i];
    return x;
  }

  double logdet() const {
    double s = 0.0;
    for (double v : l_) s += std::log(v);
    return 2.0 * s;
  }

  // Draw x ~ N(0, G^{-1}): solve L' x = z with z standard normal.
  std::vector<double> sample(Rng& rng) const {
    const std::size_t n = size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
    return solve_lt(z);
  }

  // Solve L' x = z (whitening transpose); exposed for tests.
  std::vector<double> solve_lt(const std::vector<double>& z) const {
    const std::size_t n = size();
    if (z.size() != n) throw std::invalid_argument("solve_lt: size mismatch");
    std::vector<double> x(n);
    x[n - 1] = z[n - 1] / l_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
      x[i] = (z[i] - e_[i] * x[i + 1]) / l_[i];
    return x;
  }

  // y = L' x; exposed so tests can verify whitening.
  std::vector<double> lt_apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    if (x.size() != n) throw std::invalid_argument("lt_apply: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i + 1 < n; ++i) y[i] = l_[i] * x[i] + e_[i] * x[i + 1];
    y[n - 1] = l_[n - 1] * x[n - 1];
    return y;
  }

 private:
  std::vector<double> l_, e_;
};

// Small dense symmetric matrix, row-major d x d.
struct DenseSPD {
  std::size_t d = 0;
  std::vector<double> a;  // d*d

  static DenseSPD zero(std::size_t d) {
    DenseSPD m;
    m.d = d;
    m.a.assign(d * d, 0.0);
    return m;
  }

  static DenseSPD identity(std::size_t d) {
    DenseSPD m = zero(d);
    for (std::size_t i = 0; i < d; ++i) m.a[i * d + i] = 1.0;
    return m;
  }

  double& at(std::size_t i, std::size_t j) { return a[i * d + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * d + j]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < d; ++i) t += at(i, i);
    return t;
  }
};

inline std::vector<double> matvec(const DenseSPD& m,
                                  const std::vector<double>& v) {
  if (v.size() != m.d) throw std::invalid_argument("matvec: size mismatch");
  std::vector<double> out(m.d, 0.0);
  for (std::size_t i = 0; i < m.d; ++i)
    for (std::size_t j = 0; j < m.d; ++j) out[i] += m.at(i, j) * v[j];
  return out;
}

inline double quad_form(const DenseSPD& m, const std::vector<double>& v) {
  if (v.size() != m.d) throw std::invalid_argument("quad_form: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < m.d; ++i) {
    s += m.at(i, i) * v[i] * v[i];
    for (std::size_t j = i + 1; j < m.d; ++j) s += 2.0 * m.at(i, j) * v[i] * v[j];
  }
  return s;
}

// Unpivoted dense Cholesky, adequate for the d <= 8 metrics used here.
class DenseChol {
 public:
  static std::optional<DenseChol> factor(const DenseSPD& g) {
    const std::size_t d = g.d;
    if (d == 0) throw std::invalid_argument("DenseChol: empty matrix");
    DenseChol c;
    c.d_ = d;
    c.l_.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = g.at(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= c.l(i, k) * c.l(j, k);
        if (i == j) {
          if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
          c.l(i, j) = std::sqrt(s);
        } else {
          c.l(i, j) = s / c.l(j, j);
        }
      }
    }
    return c;
  }

  std::size_t size() const { return d_; }

  std::vector<double> solve(const std::vector<double>& b) const {
    if (b.size() != d_) throw std::invalid_argument("solve: size mismatch");
    std::vector<double> x(b);
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
      x[i] /= l(i, i);
    }
    for (std::size_t i = d_; i-- > 0;) {
      for (std::size_t k = i + 1; k < d_; ++k) x[i] -= l(k, i) * x[k];
      x[i] /= l(i, i);
    }
    return x;
  }

  double logdet() const {
    double s = 0.0;
    for (std::size_t i = 0; i < d_; ++i) s += std::log(l(i, i));
    return 2.0 * s;
  }

  std::vector<double> sample(Rng& rng) const {
    std::vector<double> z(d_);
    for (std::size_t i = 0; i < d_; ++i) z[i] = rng.normal();
    return solve_lt(z);
  }

  std::vector<double> solve_lt(const std::vector<double>& z) const {
    if (z.size() != d_) throw std::invalid_argument("solve_lt: size mismatch");
    std::vector<double> x(z);
    for (std::size_t i = d_; i-- > 0;) {
      for (std::size_t k = i + 1; k < d_; ++k) x[i] -= l(k, i) * x[k];
      x[i] /= l(i, i);
    }
    return x;
  }

 private:
  double& l(std::size_t i, std::size_t j) { return l_[i * d_ + j]; }
  double l(std::size_t i, std::size_t j) const { return l_[i * d_ + j]; }
  std::size_t d_ = 0;
  std::vector<double> l_;
};

inline std::size_t matrix_dim(const SymTridiag& m) { return m.size(); }
inline std::size_t matrix_dim(const DenseSPD& m) { return m.d; }

inline void add_diagonal(SymTridiag& m, double v) {
  for (double& d : m.diag) d += v;
}
inline void add_diagonal(DenseSPD& m, double v) {
  for (std::size_t i = 0; i < m.d; ++i) m.at(i, i) += v;
}

template <class Matrix>
struct CholOf;
template <>
struct CholOf<SymTridiag> { using type = TridiagChol; };
template <>
struct CholOf<DenseSPD> { using type = DenseChol; };

// Factor with escalating diagonal jitter: on failure add
// 1e-8 * (trace/dim) * I and retry, doubling up to 3 more times.
// On success g holds the matrix actually factored, so callers can evaluate
// proposal densities consistent with the factor. `jitter_events` counts
// retries across a run.
template <class Matrix>
std::optional<typename CholOf<Matrix>::type> factor_with_jitter(
    Matrix& g, long* jitter_events) {
  using Chol = typename CholOf<Matrix>::type;
  auto c = Chol::factor(g);
  if (c) return c;
  double jit = 1e-8 * (g.trace() / static_cast<double>(matrix_dim(g)));
  if (!(jit > 0.0) || !std::isfinite(jit)) jit = 1e-8;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Matrix gj = g;
    add_diagonal(gj, jit);
    if (jitter_events) ++*jitter_events;
    c = Chol::factor(gj);
    if (c) {
      g = std::move(gj);
      return c;
    }
    jit *= 2.0;
  }
  return std::nullopt;
}

}  // namespace svl
