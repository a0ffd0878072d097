#pragma once

#include <cmath>
#include <stdexcept>

#include "svl/rng.hpp"
#include "svl/special_functions.hpp"

// Unit-variance error distributions for the observation equation:
// Gaussian, generalized error distribution (GED) and Student-t, the latter
// two parameterized so that the variance is exactly 1 for every admissible
// tail thickness nu.

namespace svl {

inline constexpr double kLnTwoPi = 1.8378770664093454836;
inline constexpr double kLn2 = 0.69314718055994530942;

enum class ErrorTag { Gaussian, Ged, StudentT };

// Tag plus tail-thickness parameter. nu is ignored for Gaussian.
// GED requires nu > 0 (nu = 2 is standard normal, nu = 1 is Laplace).
// Student-t requires nu > 2 for the density to have unit variance; the
// estimation prior restricts it further to nu > 4.
struct ErrorFamily {
  ErrorTag tag = ErrorTag::Gaussian;
  double nu = 0.0;

  static ErrorFamily gaussian() { return {ErrorTag::Gaussian, 0.0}; }
  static ErrorFamily ged(double nu) {
    if (!(nu > 0.0)) throw std::domain_error("ErrorFamily: GED requires nu > 0");
    return {ErrorTag::Ged, nu};
  }
  static ErrorFamily student_t(double nu) {
    if (!(nu > 2.0))
      throw std::domain_error("ErrorFamily: Student-t requires nu > 2");
    return {ErrorTag::StudentT, nu};
  }

  // Number of model parameters (beta, phi, sigma [, nu]).
  int param_dim() const { return tag == ErrorTag::Gaussian ? 3 : 4; }
};

// Scale lambda of the unit-variance GED: lambda^2 = 2^(-2/nu) G(1/nu)/G(3/nu).
inline double ged_lambda(double nu) {
  if (!(nu > 0.0)) throw std::domain_error("ged_lambda: requires nu > 0");
  return std::sqrt(std::exp(-2.0 / nu * kLn2 + log_gamma(1.0 / nu) -
                            log_gamma(3.0 / nu)));
}

inline double normal_logpdf(double eps) {
  return -0.5 * kLnTwoPi - 0.5 * eps * eps;
}

// f(eps) = nu / (lambda 2^(1+1/nu) G(1/nu)) exp(-0.5 |eps/lambda|^nu)
inline double ged_logpdf(double eps, double nu) {
  const double lam = ged_lambda(nu);
  return std::log(nu) - std::log(lam) - (1.0 + 1.0 / nu) * kLn2 -
         log_gamma(1.0 / nu) - 0.5 * std::pow(std::fabs(eps / lam), nu);
}

// f(eps) = G((nu+1)/2) / (G(nu/2) sqrt(pi (nu-2))) (1 + eps^2/(nu-2))^(-(nu+1)/2)
inline double student_logpdf(double eps, double nu) {
  if (!(nu > 2.0)) throw std::domain_error("student_logpdf: requires nu > 2");
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
         0.5 * std::log(M_PI * (nu - 2.0)) -
         0.5 * (nu + 1.0) * std::log1p(eps * eps / (nu - 2.0));
}

inline double error_logpdf(const ErrorFamily& fam, double eps) {
  switch (fam.tag) {
    case ErrorTag::Gaussian: return normal_logpdf(eps);
    case ErrorTag::Ged: return ged_logpdf(eps, fam.nu);
    case ErrorTag::StudentT: return student_logpdf(eps, fam.nu);
  }
  throw std::logic_error("error_logpdf: bad tag");
}

// Draw one unit-variance error.
// GED: 0.5 |eps/lambda|^nu ~ Gamma(1/nu, 1), so |eps| = lambda (2 g)^(1/nu)
// with a random sign. Student-t: standard t scaled by sqrt((nu-2)/nu).
inline double sample_error(const ErrorFamily& fam, Rng& rng) {
  switch (fam.tag) {
    case ErrorTag::Gaussian:
      return rng.normal();
    case ErrorTag::Ged: {
      const double g = rng.gamma(1.0 / fam.nu);
      const double s = rng.sign();
      return s * ged_lambda(fam.nu) * std::pow(2.0 * g, 1.0 / fam.nu);
    }
    case ErrorTag::StudentT:
      return rng.student_t(fam.nu) * std::sqrt((fam.nu - 2.0) / fam.nu);
  }
  throw std::logic_error("sample_error: bad tag");
}

// Excess kurtosis G(1/nu) G(5/nu) / G(3/nu)^2 - 3 of the GED.
inline double ged_excess_kurtosis(double nu) {
  return std::exp(log_gamma(1.0 / nu) + log_gamma(5.0 / nu) -
                  2.0 * log_gamma(3.0 / nu)) -
         3.0;
}

}  // namespace svl
