#pragma once

// Thin wrappers over Boost.Math adaptive quadrature.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace symspace::quad {

/// Adaptive 61-point Gauss-Kronrod on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 18) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, rel_tol);
}

/// Double-exponential rule; tolerates integrable endpoint singularities.
template <class F>
double integrate_singular(F&& f, double a, double b, double rel_tol = 1e-12) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule.integrate(f, a, b, rel_tol);
}

/// \int_a^inf f with the exp-sinh rule.
template <class F>
double integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12) {
  static thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  return rule.integrate([&](double x) { return f(x); }, a, std::numeric_limits<double>::infinity(), rel_tol);
}

}  // namespace symspace::quad
