#ifndef BGCS_SPECFUN_HPP
#define BGCS_SPECFUN_HPP

// Real special functions: Gamma, Beta, Pochhammer, and the modified Bessel
// functions I_nu (power series) and K_nu (integral representation).
// Every function here is pure and safe to call concurrently.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bgcs/errors.hpp"

namespace bgcs::specfun {

namespace detail {

inline constexpr double kMaxLog = 709.782712893384;  // log(DBL_MAX)

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": argument must be finite");
}

inline double checked_exp(double log_value, const char* what) {
  if (log_value > kMaxLog) throw OverflowError(std::string(what) + ": result exceeds double range");
  return std::exp(log_value);
}

// log(cosh(y)) without overflow.
inline double log_cosh(double y) {
  const double a = std::fabs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace detail

/// log Γ(p) for p > 0. Uses the reentrant C routine so no global sign state is touched.
inline double log_gamma(double p) {
  detail::require_finite(p, "log_gamma");
  if (!(p > 0.0)) throw DomainError("log_gamma: p must be positive");
  int sign = 0;
  return ::lgamma_r(p, &sign);
}

inline double gamma(double p) {
  detail::require_finite(p, "gamma");
  if (!(p > 0.0)) throw DomainError("gamma: p must be positive");
  const double g = std::tgamma(p);
  if (!std::isfinite(g)) throw OverflowError("gamma: result exceeds double range");
  return g;
}

/// Ascending factorial a(a+1)...(a+n-1); the empty product (n = 0) is 1.
inline double pochhammer(double a, unsigned n) {
  detail::require_finite(a, "pochhammer");
  double p = 1.0;
  for (unsigned k = 0; k < n; ++k) p *= a + k;
  if (!std::isfinite(p)) throw OverflowError("pochhammer: result exceeds double range");
  return p;
}

inline double beta(double p, double q) {
  detail::require_finite(p, "beta");
  detail::require_finite(q, "beta");
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("beta: arguments must be positive");
  if (p + q < 170.0) return std::tgamma(p) * std::tgamma(q) / std::tgamma(p + q);
  return std::exp(log_gamma(p) + log_gamma(q) - log_gamma(p + q));
}

inline constexpr double kBesselISeriesTolerance = 1e-16;
inline constexpr int kBesselISeriesMaxTerms = 10000;

/// I_nu(x) for nu >= 0, x >= 0 by direct summation of
/// (x/2)^nu * sum_n (x/2)^{2n} / (n! Gamma(nu+n+1)).
inline double bessel_i(double nu, double x) {
  detail::require_finite(nu, "bessel_i");
  detail::require_finite(x, "bessel_i");
  if (nu < 0.0) throw DomainError("bessel_i: negative order is not supported");
  if (x < 0.0) throw DomainError("bessel_i: negative argument is not supported");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;

  const double half = 0.5 * x;
  const double quarter_sq = half * half;
  const double log_lead = nu * std::log(half) - log_gamma(nu + 1.0);
  if (log_lead < -745.0) return 0.0;
  double term = detail::checked_exp(log_lead, "bessel_i");
  double sum = term;
  for (int n = 0; n < kBesselISeriesMaxTerms; ++n) {
    term *= quarter_sq / ((n + 1.0) * (nu + n + 1.0));
    sum += term;
    if (!std::isfinite(sum)) throw OverflowError("bessel_i: result exceeds double range");
    if (term <= kBesselISeriesTolerance * sum) return sum;
  }
  throw ConvergenceError("bessel_i: series did not converge within the term cap", sum, term);
}

/// log K_nu(x) for any real nu and x > 0.
///
/// Starts from K_nu(x) = 1/2 (x/2)^nu \int_0^inf t^{-nu-1} exp(-t - x^2/(4t)) dt and
/// substitutes t = (x/2) e^u, which gives K_nu(x) = \int_0^inf cosh(nu u) exp(-x cosh u) du.
/// The new integrand is even, entire and decays double-exponentially, so the plain
/// trapezoid rule converges geometrically; step halving stops once two levels agree.
inline double log_bessel_k(double nu, double x) {
  detail::require_finite(nu, "bessel_k");
  detail::require_finite(x, "bessel_k");
  if (!(x > 0.0)) throw DomainError("bessel_k: argument must be positive");
  nu = std::fabs(nu);

  // x cosh(u) = x + 2x sinh^2(u/2); the constant -x is restored at the end so the
  // exponent never cancels against a large shift.
  const double log_two_x = std::log(2.0 * x);
  auto log_f = [&](double u) {
    const double v = 0.5 * u;
    const double log_sinh = v > 20.0 ? v - std::numbers::ln2 : std::log(std::sinh(v));
    return detail::log_cosh(nu * u) - std::exp(log_two_x + 2.0 * log_sinh);
  };

  // asinh(nu/x) and x cosh(asinh(nu/x)) = hypot(x, nu), guarded against nu/x overflowing
  const double ratio = nu / x;
  const double u_peak = ratio > 1e150 ? std::log(2.0 * nu) - std::log(x) : std::asinh(ratio);
  const double scale = std::max(log_f(u_peak), log_f(0.0));
  const double curvature = std::hypot(x, nu);
  const double width = curvature > 1.0 ? 1.0 / std::sqrt(curvature) : 1.0;

  double upper = u_peak + width;
  while (log_f(upper) - scale > -46.0) upper += width;

  int intervals = std::max(32, static_cast<int>(std::ceil(2.0 * upper / width)));
  double h = upper / intervals;
  auto f = [&](double u) { return std::exp(log_f(u) - scale); };

  // rounding of nu*u near the peak sets a noise floor on the agreement between levels
  const double tolerance = std::max(1e-14, 2.0 * std::numeric_limits<double>::epsilon() * nu * upper);

  double sum = 0.5 * f(0.0);
  for (int k = 1; k <= intervals; ++k) sum += f(k * h);
  double estimate = h * sum;

  for (int level = 0; level < 20; ++level) {
    double odd = 0.0;
    for (int k = 1; k < 2 * intervals; k += 2) odd += f(k * 0.5 * h);
    sum += odd;
    intervals *= 2;
    h *= 0.5;
    const double refined = h * sum;
    const double change = std::fabs(refined - estimate);
    estimate = refined;
    if (level >= 1 && change <= tolerance * refined) return scale - x + std::log(estimate);
  }
  throw ConvergenceError("bessel_k: trapezoid refinement did not converge", estimate, 0.0);
}

inline double bessel_k(double nu, double x) {
  return detail::checked_exp(log_bessel_k(nu, x), "bessel_k");
}

}  // namespace bgcs::specfun

#endif  // BGCS_SPECFUN_HPP
