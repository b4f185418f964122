#pragma once

// Independent reference computations used by the unit tests.  None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "symspace/stepfn.hpp"

namespace oracle {

/// \int_0^t mu(f) = min_{c >= 0} ( \int (|f| - c)_+ + t c ), minimized over the piece values.
inline double cumulative_rearrangement(const symspace::StepFunction& f, double t) {
  std::vector<double> levels{0.0};
  for (double v : f.values()) levels.push_back(std::abs(v));
  double best = std::numeric_limits<double>::infinity();
  for (double c : levels) {
    double excess = 0.0;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
      excess += std::max(std::abs(f.values()[i]) - c, 0.0) * f.piece(i).width();
    }
    best = std::min(best, excess + t * c);
  }
  return best;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

/// Grid maximum of (1/w(t)) \int_0^t mu(f) over a dense log grid plus the breakpoints.
inline double marcinkiewicz_grid(const symspace::StepFunction& f, const std::function<double(double)>& w,
                                 int points = 4000) {
  auto grid = log_grid(1e-10 * f.length(), f.length(), points);
  for (int i = 0; i <= 40000; ++i) grid.push_back(f.length() * (0.3 + 0.7 * i / 40000.0));
  // Kinks of \int_0^t mu sit at the distribution function m{|f| > c}, c a piece value.
  for (double c : f.values()) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
      if (std::abs(f.values()[i]) > std::abs(c)) m += f.piece(i).width();
    }
    if (m > 0.0) grid.push_back(m);
  }
  grid.push_back(f.length());
  double best = 0.0;
  for (double t : grid) best = std::max(best, cumulative_rearrangement(f, t) / w(t));
  return best;
}

inline double psi(double t) { return t < 1.0 ? 1.0 / (1.0 - std::log(t)) : t; }
inline double phi(double t) { return t <= 0.0 ? 0.0 : t < 1.0 ? t * (1.0 - std::log(t)) : 1.0; }

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
