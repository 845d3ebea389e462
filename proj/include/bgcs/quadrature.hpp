#ifndef BGCS_QUADRATURE_HPP
#define BGCS_QUADRATURE_HPP

// Thin wrappers over the Boost.Math 1-D rules with a shared error budget.

#include <cmath>
#include <cstddef>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bgcs/errors.hpp"

namespace bgcs {

/// Requested and accepted accuracy for a single quadrature.
struct QuadratureBudget {
  double tolerance = 1e-13;   ///< relative target handed to the rule
  double acceptance = 1e-9;   ///< largest relative error estimate returned without throwing
  std::size_t max_refinements = 12;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< absolute error estimate reported by the rule
  double l1 = 0.0;

  double relative_error() const { return value != 0.0 ? std::fabs(error / value) : std::fabs(error); }
};

namespace detail {

inline QuadratureResult accept(const char* what, double value, double error, double l1, const QuadratureBudget& budget) {
  if (!std::isfinite(value)) throw ConvergenceError(std::string(what) + ": non-finite integral", value, error);
  const double scale = std::max(std::fabs(value), 1e-300);
  if (error > budget.acceptance * scale) {
    throw ConvergenceError(std::string(what) + ": error estimate above budget", value, error);
  }
  return {value, error, l1};
}

}  // namespace detail

/// \int_0^\infty f, double-exponential (exp-sinh) rule.
template <class F>
QuadratureResult integrate_half_line(F&& f, const QuadratureBudget& budget = {}) {
  boost::math::quadrature::exp_sinh<double> rule(budget.max_refinements);
  double error = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, budget.tolerance, &error, &l1);
  return detail::accept("integrate_half_line", value, error, l1, budget);
}

/// \int_0^1 f with tanh-sinh; tolerates integrable endpoint singularities.
template <class F>
QuadratureResult integrate_unit_interval(F&& f, const QuadratureBudget& budget = {}) {
  boost::math::quadrature::tanh_sinh<double> rule(budget.max_refinements);
  double error = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, 0.0, 1.0, budget.tolerance, &error, &l1);
  return detail::accept("integrate_unit_interval", value, error, l1, budget);
}

/// \int_0^1 f with 64-point Gauss-Legendre. Exact for polynomials of degree <= 127.
template <class F>
double gauss_legendre_unit(F&& f) {
  return boost::math::quadrature::gauss<double, 64>::integrate(f, 0.0, 1.0);
}

}  // namespace bgcs

#endif  // BGCS_QUADRATURE_HPP
