#pragma once

// Weights psi, phi (and powers) that parametrize Lorentz/Marcinkiewicz spaces,
// and Orlicz functions M, G, or user-supplied N.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "symspace/error.hpp"

namespace symspace {

class ConcaveWeight {
 public:
  enum class Kind { psi, phi, power };

  /// psi(t) = 1/log(e/t) on (0,1), extended by psi(t) = t on [1, inf).
  static ConcaveWeight psi() { return ConcaveWeight(Kind::psi, 0.0); }
  /// phi(t) = t log(e/t) on (0,1), held at phi(1) = 1 past 1.
  static ConcaveWeight phi() { return ConcaveWeight(Kind::phi, 0.0); }
  /// t^p, 0 < p <= 1.
  static ConcaveWeight power(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("power weight: exponent must lie in (0, 1]");
    return ConcaveWeight(Kind::power, p);
  }
  static ConcaveWeight sqrt() { return power(0.5); }

  Kind kind() const noexcept { return kind_; }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
      case Kind::psi:
        return t < 1.0 ? 1.0 / (1.0 - std::log(t)) : t;
      case Kind::phi:
        return t < 1.0 ? t * (1.0 - std::log(t)) : 1.0;
      case Kind::power:
        return std::pow(t, exponent_);
    }
    return 0.0;
  }

  /// Right derivative.
  double derivative(double t) const {
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    switch (kind_) {
      case Kind::psi: {
        if (t >= 1.0) return 1.0;
        const double v = (*this)(t);
        return v * v / t;
      }
      case Kind::phi:
        return t < 1.0 ? -std::log(t) : 0.0;
      case Kind::power:
        return exponent_ * std::pow(t, exponent_ - 1.0);
    }
    return 0.0;
  }

  /// \int_{(a,b]} d(weight).
  double stieltjes_mass(double a, double b) const { return (*this)(b) - (*this)(a); }

  /// Points where the second derivative changes sign.  psi is concave on
  /// (0, 1/e) and convex on (1/e, 1); phi and powers have none.
  std::vector<double> inflection_points() const {
    if (kind_ == Kind::psi) return {std::exp(-1.0)};
    return {};
  }

  /// Smallest t with weight(t) >= y.
  double inverse(double y) const {
    if (y <= 0.0) return 0.0;
    switch (kind_) {
      case Kind::psi:
        return y < 1.0 ? std::exp(1.0 - 1.0 / y) : y;
      case Kind::phi: {
        if (y >= 1.0) return 1.0;
        double lo = 0.0;
        double hi = 1.0;
        for (int i = 0; i < 200 && hi - lo > 1e-300; ++i) {
          const double mid = 0.5 * (lo + hi);
          ((*this)(mid) < y ? lo : hi) = mid;
        }
        return hi;
      }
      case Kind::power:
        return std::pow(y, 1.0 / exponent_);
    }
    return 0.0;
  }

  std::string label() const {
    switch (kind_) {
      case Kind::psi:
        return "psi";
      case Kind::phi:
        return "phi";
      case Kind::power:
        return exponent_ == 0.5 ? "sqrt" : "power(" + std::to_string(exponent_) + ")";
    }
    return "?";
  }

 private:
  ConcaveWeight(Kind k, double p) : kind_(k), exponent_(p) {}

  Kind kind_;
  double exponent_;
};

/// Derivative of phi on (0,1): phi'(t) = log(1/t).
inline double phi_derivative(double t) { return ConcaveWeight::phi().derivative(t); }

class OrliczFunction {
 public:
  using Fn = std::function<double(double)>;

  OrliczFunction(std::string label, Fn evaluate, Fn inverse = {})
      : label_(std::move(label)), evaluate_(std::move(evaluate)), inverse_(std::move(inverse)) {}

  /// M(t) = t log(e + t).
  static OrliczFunction M() {
    return OrliczFunction("M", [](double t) { return t <= 0.0 ? 0.0 : t * std::log(std::numbers::e + t); });
  }

  /// G(t) = e^t - 1.
  static OrliczFunction G() {
    return OrliczFunction(
        "G", [](double t) { return t <= 0.0 ? 0.0 : std::expm1(t); },
        [](double y) { return y <= 0.0 ? 0.0 : std::log1p(y); });
  }

  /// N(t) = t, i.e. L_1.
  static OrliczFunction linear() {
    return OrliczFunction(
        "linear", [](double t) { return std::max(t, 0.0); }, [](double y) { return std::max(y, 0.0); });
  }

  /// Piecewise-linear N through (t_i, N_i), extended past the last node with the last slope.
  /// Requires t_0 = N_0 = 0, increasing t, nondecreasing N and nondecreasing slopes.
  static OrliczFunction table(std::vector<double> t, std::vector<double> n, std::string label = "table") {
    if (t.size() < 2 || t.size() != n.size()) throw InvariantError("orlicz table: need >= 2 nodes");
    if (t[0] != 0.0 || n[0] != 0.0) throw InvariantError("orlicz table: first node must be (0, 0)");
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (!(t[i] > t[i - 1])) throw InvariantError("orlicz table: t must be strictly increasing");
      if (n[i] < n[i - 1]) throw InvariantError("orlicz table: N must be nondecreasing");
      const double slope = (n[i] - n[i - 1]) / (t[i] - t[i - 1]);
      if (slope < prev_slope * (1.0 - 1e-12) - 1e-300) throw InvariantError("orlicz table: N must be convex");
      prev_slope = slope;
    }
    if (n.back() <= 0.0) throw InvariantError("orlicz table: N must be eventually positive");
    auto eval = [t, n](double x) {
      if (x <= 0.0) return 0.0;
      std::size_t i = 1;
      while (i + 1 < t.size() && t[i] < x) ++i;
      const double slope = (n[i] - n[i - 1]) / (t[i] - t[i - 1]);
      return n[i - 1] + slope * (x - t[i - 1]);
    };
    return OrliczFunction(std::move(label), std::move(eval));
  }

  double operator()(double t) const { return evaluate_(t); }

  /// N^{-1}(y) = sup{t : N(t) <= y}, by monotone bisection unless a closed form is known.
  double inverse(double y) const {
    if (inverse_) return inverse_(y);
    if (y <= 0.0) return 0.0;
    double hi = 1.0;
    while (evaluate_(hi) < y) {
      hi *= 2.0;
      if (hi > 1e300) throw DomainError("orlicz inverse: value out of range");
    }
    double lo = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (evaluate_(mid) <= y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  const std::string& label() const noexcept { return label_; }

  /// Midpoint convexity and N(0) = 0 on a log-spaced grid over [lo, hi].
  bool convex_on_grid(double lo = 1e-8, double hi = 1e8, int points = 400) const {
    if (evaluate_(0.0) != 0.0) return false;
    const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
    double a = 0.0;
    double t = lo;
    for (int i = 0; i < points; ++i, t *= ratio) {
      const double na = evaluate_(a);
      const double nb = evaluate_(t);
      const double nm = evaluate_(0.5 * (a + t));
      if (!std::isfinite(nb)) break;
      if (nm > 0.5 * (na + nb) * (1.0 + 1e-12) + 1e-300) return false;
      if (nb < na) return false;
      a = t;
    }
    return true;
  }

 private:
  std::string label_;
  Fn evaluate_;
  Fn inverse_;
};

}  // namespace symspace
