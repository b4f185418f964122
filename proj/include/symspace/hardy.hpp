#pragma once

// The operator (Tx)(t) = t^{-1/2} \int_0^t x + \int_t^1 x(s) s^{-1/2} ds on (0,1),
// i.e. the integral operator with kernel max(t,s)^{-1/2}, applied exactly to
// step functions and to profiles x = y/sqrt(t) with y built from constants
// and multiples of psi.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "symspace/error.hpp"
#include "symspace/quadrature.hpp"
#include "symspace/random.hpp"
#include "symspace/spaces.hpp"
#include "symspace/stepfn.hpp"
#include "symspace/weights.hpp"

namespace symspace {

inline double hardy_kernel(double t, double s) { return 1.0 / std::sqrt(std::max(t, s)); }

/// Hilbert-Schmidt norm of T: \int\int max(t,s)^{-1} = \int_0^1 (1 + log(1/t)) dt,
/// with antiderivative 2t - t log t.
inline double hs_norm_T() {
  auto antiderivative = [](double t) { return t > 0.0 ? 2.0 * t - t * std::log(t) : 0.0; };
  return std::sqrt(antiderivative(1.0) - antiderivative(0.0));
}

/// log-spaced points strictly inside (lo, hi).
inline std::vector<double> open_log_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points + 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * (i + 1));
  return g;
}

/// Default grid for pointwise contracts: 1000 log-spaced points in (1e-8, 1).
inline std::vector<double> default_t_grid() { return open_log_grid(1e-8, 1.0, 1000); }

/// T applied to a step function on (0,1).  Prefix and suffix sums make each
/// evaluation O(log pieces).
class HardyT {
 public:
  explicit HardyT(const StepFunction& x) : x_(x) {
    if (x.length() != 1.0) throw DomainError("T acts on functions on (0, 1)");
    const std::size_t n = x.piece_count();
    prefix_.assign(n + 1, 0.0);
    suffix_.assign(n + 1, 0.0);
    primitive_.assign(n + 1, 0.0);
    const auto bp = x.breakpoints();
    for (std::size_t i = 0; i < n; ++i) {
      const double a = bp[i];
      const double b = bp[i + 1];
      const double v = x.values()[i];
      prefix_[i + 1] = prefix_[i] + v * (b - a);
      primitive_[i + 1] = primitive_[i] + piece_primitive(i, b);
    }
    for (std::size_t i = n; i-- > 0;) {
      suffix_[i] = suffix_[i + 1] + 2.0 * x.values()[i] * (std::sqrt(bp[i + 1]) - std::sqrt(bp[i]));
    }
  }

  double operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("T: kernel is singular at t = 0");
    if (t >= 1.0) return prefix_.back();  // t^{-1/2} \int_0^1 x at t = 1
    const std::size_t i = x_.locate(t);
    const double a = x_.breakpoints()[i];
    const double b = x_.breakpoints()[i + 1];
    const double v = x_.values()[i];
    const double head = prefix_[i] + v * (t - a);
    const double tail = suffix_[i + 1] + 2.0 * v * (std::sqrt(b) - std::sqrt(t));
    return head / std::sqrt(t) + tail;
  }

  /// lim_{t -> 0+} (Tx)(t) = \int_0^1 x(s) s^{-1/2} ds.
  double at_zero() const { return suffix_.front(); }

  /// \int_0^t (Tx)(s) ds.  Uses \int_0^t \int_s^1 x(r) r^{-1/2} dr ds
  /// = \int_0^t x(r) r^{1/2} dr + t \int_t^1 x(r) r^{-1/2} dr.
  double integral_to(double t) const {
    if (t <= 0.0) return 0.0;
    t = std::min(t, 1.0);
    const std::size_t i = x_.locate(t);
    const double b = x_.breakpoints()[i + 1];
    const double v = x_.values()[i];
    const double tail = suffix_[i + 1] + 2.0 * v * (std::sqrt(b) - std::sqrt(t));
    return primitive_[i] + piece_primitive(i, t) + t * tail;
  }

 private:
  /// On piece i up to t: \int s^{-1/2} X(s) ds + \int x(s) s^{1/2} ds, X(s) = A + v s.
  double piece_primitive(std::size_t i, double t) const {
    const double a = x_.breakpoints()[i];
    const double v = x_.values()[i];
    const double big_a = prefix_[i] - v * a;
    const double sa = std::sqrt(a);
    const double st = std::sqrt(t);
    const double three_halves = (t * st - a * sa) * (2.0 / 3.0);
    return 2.0 * big_a * (st - sa) + v * three_halves + v * three_halves;
  }

  StepFunction x_;
  std::vector<double> prefix_;     // \int_0^{b_i} x
  std::vector<double> suffix_;     // \int_{b_i}^1 x s^{-1/2}
  std::vector<double> primitive_;  // \int_0^{b_i} (s^{-1/2} X + x s^{1/2})
};

inline std::vector<double> apply_T(const StepFunction& x, std::span<const double> grid) {
  const HardyT op(x);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(op(t));
  return out;
}

/// ||Tx||_{L_2(0,1)} in closed form.  On a piece (a, b) with value v,
/// Tx(t) = A t^{-1/2} - v t^{1/2} + B, A = \int_0^a x - v a, B = \int_b^1 x s^{-1/2} + 2 v b^{1/2}.
inline double T_l2_norm(const StepFunction& x) {
  if (x.length() != 1.0) throw DomainError("T: x must live on (0, 1)");
  const std::size_t n = x.piece_count();
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const Piece p = x.piece(i);
    tail[i] = tail[i + 1] + 2.0 * p.value * (std::sqrt(p.hi) - std::sqrt(p.lo));
  }
  double head = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Piece p = x.piece(i);
    const double v = p.value;
    const double a = head - v * p.lo;
    const double b = tail[i + 1] + 2.0 * v * std::sqrt(p.hi);
    const double w = p.width();
    const double dsqrt = std::sqrt(p.hi) - std::sqrt(p.lo);
    const double d32 = (p.hi * std::sqrt(p.hi) - p.lo * std::sqrt(p.lo)) / 1.5;
    if (a != 0.0) s += a * a * std::log(p.hi / p.lo);
    s += v * v * 0.5 * (p.hi * p.hi - p.lo * p.lo) + b * b * w - 2.0 * a * v * w + 4.0 * a * b * dsqrt -
         2.0 * v * b * d32;
    head += v * w;
  }
  return std::sqrt(std::max(s, 0.0));
}

namespace detail {

/// E_1(x) = \int_x^inf e^{-w}/w dw for x > 0; E_1(inf) = 0.
inline double expint_e1(double x) { return std::isinf(x) ? 0.0 : -std::expint(-x); }

/// u(t) = log(e/t), infinite at t = 0.
inline double log_e_over(double t) {
  return t > 0.0 ? 1.0 - std::log(t) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// y(t) = level_i + coef_i psi(t) on [b_i, b_{i+1}) inside (0, 1].
class PsiProfile {
 public:
  PsiProfile(std::vector<double> breakpoints, std::vector<double> level, std::vector<double> coef)
      : breakpoints_(std::move(breakpoints)), level_(std::move(level)), coef_(std::move(coef)) {
    if (breakpoints_.size() < 2 || level_.size() + 1 != breakpoints_.size() || coef_.size() != level_.size()) {
      throw PreconditionError("PsiProfile: inconsistent piece data");
    }
    if (breakpoints_.front() != 0.0) throw PreconditionError("PsiProfile: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!(breakpoints_[i] > breakpoints_[i - 1])) {
        throw PreconditionError("PsiProfile: breakpoints must increase");
      }
    }
    if (breakpoints_.back() > 1.0) throw DomainError("PsiProfile: lives on (0, 1]");
  }

  static PsiProfile from_steps(const StepFunction& f) {
    return PsiProfile(std::vector<double>(f.breakpoints().begin(), f.breakpoints().end()),
                      std::vector<double>(f.values().begin(), f.values().end()),
                      std::vector<double>(f.piece_count(), 0.0));
  }

  /// c psi on (0, 1).
  static PsiProfile psi(double c = 1.0) { return PsiProfile({0.0, 1.0}, {0.0}, {c}); }

  double length() const noexcept { return breakpoints_.back(); }
  std::size_t piece_count() const noexcept { return level_.size(); }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  double level(std::size_t i) const { return level_[i]; }
  double coef(std::size_t i) const { return coef_[i]; }

  std::size_t locate(double t) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - breakpoints_.begin() - 1));
    return std::min(idx, piece_count() - 1);
  }

  double operator()(double t) const {
    if (t <= 0.0 || t >= length()) return 0.0;
    const std::size_t i = locate(t);
    return level_[i] + coef_[i] * psi_(t);
  }

  /// \int_a^b y(s) s^{-1/2} ds over part of piece i.
  double integral_inv_sqrt(std::size_t i, double a, double b) const {
    const double c = coef_[i];
    double s = 2.0 * level_[i] * (std::sqrt(b) - std::sqrt(a));
    if (c != 0.0) {
      const double ua = detail::log_e_over(a);
      const double ub = detail::log_e_over(b);
      s += c * std::sqrt(std::numbers::e) * (detail::expint_e1(0.5 * ub) - detail::expint_e1(0.5 * ua));
    }
    return s;
  }

  /// \int_a^b y(s) / s ds over part of piece i (a > 0 unless y vanishes there).
  double integral_over_s(std::size_t i, double a, double b) const {
    const double l = level_[i];
    const double c = coef_[i];
    double s = 0.0;
    if (l != 0.0) s += l * std::log(b / a);
    if (c != 0.0) s += c * (std::log(detail::log_e_over(a)) - std::log(detail::log_e_over(b)));
    return s;
  }

  /// (\int_0^1 y^2 dt/t)^{1/2}; uses \int psi/t = -log log(e/t) and \int psi^2/t = psi.
  double weighted_l2_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < piece_count(); ++i) {
      const double a = breakpoints_[i];
      const double b = breakpoints_[i + 1];
      const double l = level_[i];
      const double c = coef_[i];
      if (l != 0.0) {
        if (a == 0.0) return std::numeric_limits<double>::infinity();
        s += l * l * std::log(b / a);
        if (c != 0.0) {
          s += 2.0 * l * c * (std::log(detail::log_e_over(a)) - std::log(detail::log_e_over(b)));
        }
      }
      if (c != 0.0) s += c * c * (psi_(b) - psi_(a));
    }
    return std::sqrt(s);
  }

  bool is_nondecreasing_nonnegative() const {
    double prev = 0.0;
    for (std::size_t i = 0; i < piece_count(); ++i) {
      const double a = breakpoints_[i];
      const double b = breakpoints_[i + 1];
      const double start = level_[i] + coef_[i] * psi_(a);
      const double end = level_[i] + coef_[i] * psi_(b);
      if (start < 0.0 || coef_[i] < 0.0) return false;
      if (start < prev * (1.0 - 1e-14)) return false;
      prev = end;
    }
    return true;
  }

 private:
  static double psi_(double t) { return t <= 0.0 ? 0.0 : 1.0 / (1.0 - std::log(t)); }

  std::vector<double> breakpoints_;
  std::vector<double> level_;
  std::vector<double> coef_;
};

/// T applied to x(s) = y(s) s^{-1/2} for a PsiProfile y on (0, 1).
class HardyTProfile {
 public:
  explicit HardyTProfile(PsiProfile y) : y_(std::move(y)) {
    if (y_.length() != 1.0) throw DomainError("T acts on functions on (0, 1)");
    const std::size_t n = y_.piece_count();
    const auto bp = y_.breakpoints();
    head_.assign(n + 1, 0.0);
    tail_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) head_[i + 1] = head_[i] + y_.integral_inv_sqrt(i, bp[i], bp[i + 1]);
    for (std::size_t i = n; i-- > 1;) tail_[i] = tail_[i + 1] + y_.integral_over_s(i, bp[i], bp[i + 1]);
    tail_[0] = std::numeric_limits<double>::infinity();
  }

  double operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("T: kernel is singular at t = 0");
    if (t >= 1.0) return head_.back();
    const std::size_t i = y_.locate(t);
    const auto bp = y_.breakpoints();
    const double head = head_[i] + y_.integral_inv_sqrt(i, bp[i], t);
    const double tail = tail_[i + 1] + y_.integral_over_s(i, t, bp[i + 1]);
    return head / std::sqrt(t) + tail;
  }

  /// Step function of exact cell averages of x = y s^{-1/2} over the union of
  /// y's breakpoints and a geometric grid; its rearrangement is submajorized by mu(x).
  StepFunction cell_average(int geometric_points = 2000, double smallest = 1e-12) const {
    std::vector<double> bp(y_.breakpoints().begin(), y_.breakpoints().end());
    for (double g : open_log_grid(smallest, 1.0, geometric_points)) bp.push_back(g);
    bp.push_back(smallest);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> v(bp.size() - 1);
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      const std::size_t i = y_.locate(0.5 * (bp[k] + bp[k + 1]));
      v[k] = y_.integral_inv_sqrt(i, bp[k], bp[k + 1]) / (bp[k + 1] - bp[k]);
    }
    return StepFunction(std::move(bp), std::move(v));
  }

  const PsiProfile& profile() const noexcept { return y_; }

 private:
  PsiProfile y_;
  std::vector<double> head_;  // \int_0^{b_i} y s^{-1/2}
  std::vector<double> tail_;  // \int_{b_i}^1 y / s
};

/// y(t) = sup_{0<s<t} psi(s) mu(s, z) for decreasing z on (0,1).
///
/// On the piece j of z with value v_j the supremum is max(R_j, v_j psi(t)),
/// R_j = max_{i<j} v_i psi(b_{i+1}); the switch happens at psi^{-1}(R_j / v_j).
inline PsiProfile extremizer_y(const StepFunction& z) {
  if (z.length() != 1.0) throw DomainError("extremizer: z must live on (0, 1)");
  if (!z.is_decreasing()) throw PreconditionError("extremizer: z must be nonnegative and nonincreasing");
  const auto psi = ConcaveWeight::psi();
  std::vector<double> bp{0.0};
  std::vector<double> level;
  std::vector<double> coef;
  auto push = [&](double hi, double l, double c) {
    if (!level.empty() && coef.back() == 0.0 && c == 0.0 && level.back() == l) {
      bp.back() = hi;
      return;
    }
    bp.push_back(hi);
    level.push_back(l);
    coef.push_back(c);
  };
  double running = 0.0;
  for (std::size_t j = 0; j < z.piece_count(); ++j) {
    const Piece p = z.piece(j);
    const double v = p.value;
    double cross = p.hi;
    if (v > 0.0) {
      const double ratio = running / v;
      cross = ratio < 1.0 ? std::clamp(psi.inverse(ratio), p.lo, p.hi) : p.hi;
    }
    if (cross > p.lo) push(cross, running, 0.0);
    if (cross < p.hi) push(p.hi, 0.0, v);
    running = std::max(running, v * psi(p.hi));
  }
  return PsiProfile(std::move(bp), std::move(level), std::move(coef));
}

struct ExtremizerResult {
  PsiProfile y;
  double l2_norm;           ///< ||x||_2 = ||y||_{L_2(dt/t)}
  double z_norm;            ///< ||z||_{Lambda_psi^(2)}
  bool norm_ok;             ///< l2_norm <= sqrt(3) z_norm
  bool pointwise_ok;        ///< pointwise_margin >= -1e-9
  double pointwise_margin;  ///< min_t [lower bound of T mu(x)](t) - mu(t,z)/(8e)
  double worst_t;

  /// x(t) = t^{-1/2} y(t).
  double x(double t) const { return t > 0.0 ? y(t) / std::sqrt(t) : 0.0; }
};

/// Builds x = t^{-1/2} y and checks ||x||_2 <= sqrt3 ||z|| and T mu(x) >= mu(z)/(8e).
///
/// T mu(x) is bounded below by max(Tx, T mu(xbar)): Tx because the kernel
/// max(t,s)^{-1/2} is decreasing in s, and T mu(xbar) because the cell-average
/// step function xbar is submajorized by x.
inline ExtremizerResult extremizer_x(const StepFunction& z, std::span<const double> grid) {
  PsiProfile y = extremizer_y(z);
  const double z_norm = std::sqrt(lorentz_norm(z.squared(), ConcaveWeight::psi()));
  const double l2 = y.weighted_l2_norm();
  ExtremizerResult r{y, l2, z_norm, l2 <= std::sqrt(3.0) * z_norm * (1.0 + 1e-12), true, 0.0, 0.0};
  if (z.is_zero()) return r;

  const HardyTProfile tx(y);
  const HardyT tbar(decreasing_rearrangement(tx.cell_average()));
  const double c = 1.0 / (8.0 * std::numbers::e);
  r.pointwise_margin = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double lower = std::max(tx(t), tbar(t));
    const double m = lower - c * z(t);
    if (m < r.pointwise_margin) {
      r.pointwise_margin = m;
      r.worst_t = t;
    }
  }
  r.pointwise_ok = r.pointwise_margin >= -1e-9;
  return r;
}

inline ExtremizerResult extremizer_x(const StepFunction& z) {
  const auto grid = default_t_grid();
  return extremizer_x(z, grid);
}

/// min_t psi(t) (Tx)(t) - y(t/2)/(4e) for x = t^{-1/2} y, y nondecreasing and nonnegative.
inline double l2tol2_pointwise_check(const PsiProfile& y, std::span<const double> grid) {
  if (!y.is_nondecreasing_nonnegative()) {
    throw PreconditionError("l2tol2 check: y must be nonnegative and nondecreasing");
  }
  const auto psi = ConcaveWeight::psi();
  const HardyTProfile tx(y);
  double worst = std::numeric_limits<double>::infinity();
  for (double t : grid) worst = std::min(worst, psi(t) * tx(t) - y(0.5 * t) / (4.0 * std::numbers::e));
  return worst;
}

struct CesaroClaim {
  double lhs;  ///< \int_0^1 sup_{s<t} psi^2(s) (C mu(w))(s) dt/t
  double rhs;  ///< 3 ||w||_{Lambda_psi}
};

/// Exact evaluation of the left-hand side.  On a piece of mu(w) with value v,
/// h(s) = psi^2(s) W(s)/s = psi^2(s)(v + beta/s) with beta >= 0, and
/// h' = (psi^2/s^2)(2 v psi s + beta (2 psi - 1)) changes sign at most once
/// (from - to +).  So the running supremum equals max(M, h(t)) on the piece and
/// h exceeds M exactly on a right end (t*, b), located by bisection.
/// Integrals: \int psi^2/t = psi, \int psi^2/t^2 = e^{-1}(e^u/u - Ei(u)), u = log(e/t).
inline CesaroClaim sup_cesaro_claim(const StepFunction& w) {
  if (w.length() != 1.0) throw DomainError("cesaro claim: w must live on (0, 1)");
  for (double v : w.values()) {
    if (v < 0.0) throw PreconditionError("cesaro claim: w must be nonnegative");
  }
  const auto psi = ConcaveWeight::psi();
  const StepFunction mu = decreasing_rearrangement(w);
  auto psi2_over_t2 = [](double t) {
    const double u = 1.0 - std::log(t);
    return (std::exp(u) / u - std::expint(u)) / std::numbers::e;
  };
  double lhs = 0.0;
  double running = 0.0;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < mu.piece_count(); ++j) {
    const Piece p = mu.piece(j);
    const double v = p.value;
    const double beta = std::max(cumulative - v * p.lo, 0.0);
    auto h = [&](double s) {
      const double ps = psi(s);
      return ps * ps * (v + beta / s);
    };
    double cross = p.lo;
    if (running > 0.0) {
      if (h(p.hi) <= running) {
        cross = p.hi;
      } else {
        double lo = p.lo;
        double hi = p.hi;
        for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          (h(mid) > running ? hi : lo) = mid;
        }
        cross = hi;
      }
      lhs += running * std::log(cross / p.lo);
    }
    if (cross < p.hi) {
      lhs += v * (psi(p.hi) - psi(cross));
      if (beta > 0.0) lhs += beta * (psi2_over_t2(p.hi) - psi2_over_t2(cross));
    }
    running = std::max(running, h(p.hi));
    cumulative += v * p.width();
  }
  return {lhs, 3.0 * lorentz_norm(w, psi)};
}

/// Closed forms asserted for w = chi_(0,u): psi + psi^2 log(1/u) on (1/e, 1), and
/// psi + psi^2 log(1/(eu)) + max(psi^2, eu/4) on (0, 1/e), all at u.
inline double cesaro_indicator_closed_form(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("closed form: u must lie in (0, 1)");
  const double p = ConcaveWeight::psi()(u);
  if (u > std::exp(-1.0)) return p + p * p * std::log(1.0 / u);
  return p + p * p * std::log(1.0 / (std::numbers::e * u)) + std::max(p * p, std::numbers::e * u / 4.0);
}

/// Uniform m-piece approximant of s^{-1/2} on (0,1) with exact cell averages.
inline StepFunction inverse_sqrt_cell_average(int m) {
  if (m < 1) throw DomainError("approximant: need at least one piece");
  std::vector<double> bp(static_cast<std::size_t>(m) + 1);
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int i = 0; i <= m; ++i) bp[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;
  bp.back() = 1.0;
  for (int i = 0; i < m; ++i) {
    const double a = bp[static_cast<std::size_t>(i)];
    const double b = bp[static_cast<std::size_t>(i) + 1];
    v[static_cast<std::size_t>(i)] = 2.0 * (std::sqrt(b) - std::sqrt(a)) / (b - a);
  }
  return StepFunction(std::move(bp), std::move(v));
}

/// Geometric m-piece approximant of s^{-1/2} from `smallest` to 1, taking the
/// value at the right end of each cell (so sup s^{1/2} mu(s) = 1 exactly).
inline StepFunction inverse_sqrt_right_endpoint(int m, double smallest = 1e-12) {
  std::vector<double> bp{0.0, smallest};
  for (double g : open_log_grid(smallest, 1.0, m - 1)) bp.push_back(g);
  bp.push_back(1.0);
  std::vector<double> v(bp.size() - 1);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) v[i] = 1.0 / std::sqrt(bp[i + 1]);
  return StepFunction(std::move(bp), std::move(v));
}

/// \int_0^1 |T x_m - log(e^2/t)| dt for the cell-average approximant.
inline double inverse_sqrt_profile_error(int m) {
  const StepFunction x = inverse_sqrt_cell_average(m);
  const HardyT op(x);
  auto err = [&](double t) { return std::abs(op(t) - (2.0 - std::log(t))); };
  double total = 0.0;
  const auto bp = x.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    total += i == 0 ? quad::integrate_singular(err, bp[0], bp[1], 1e-9)
                    : quad::integrate(err, bp[i], bp[i + 1], 1e-9, 6);
  }
  return total;
}

/// sup_s s^{1/2} mu(s, x), attained at right ends of the pieces of mu(x).
inline double weak_l2_quasinorm(const StepFunction& x) {
  const StepFunction mu = decreasing_rearrangement(x);
  double best = 0.0;
  for (std::size_t i = 0; i < mu.piece_count(); ++i) best = std::max(best, std::sqrt(mu.piece(i).hi) * mu.values()[i]);
  return best;
}

/// ||Tx||_{Lambda_psi^(2)} for nonnegative decreasing x: Tx is then decreasing, so
/// the norm squared is \int (Tx)^2 dpsi = \int_0^inf (Tx(e^{-r}))^2 (1+r)^{-2} dr.
inline double lambda2_norm_of_T(const StepFunction& x) {
  const HardyT op(x);
  auto integrand = [&](double r) {
    const double t = std::exp(-r);
    const double v = t > 0.0 ? op(t) : op.at_zero();
    return v * v / ((1.0 + r) * (1.0 + r));
  };
  std::vector<double> cuts{0.0};
  for (double b : x.breakpoints()) {
    if (b > 0.0 && b < 1.0) cuts.push_back(-std::log(b));
  }
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += quad::integrate(integrand, cuts[i], cuts[i + 1], 1e-10, 8);
  s += quad::integrate_to_infinity(integrand, cuts.back(), 1e-12);
  return std::sqrt(s);
}

struct TMappingBounds {
  double norm_L21_to_Linf;         ///< sup ||Tx||_inf / ||x||_{2,1}
  bool exp_bound_ok;               ///< |Tx(t)| <= ||x||_{2,inf} log(e^2/t) on the grid
  double empirical_L2_to_Lambda2;  ///< sup ||Tx||_{Lambda_psi^(2)} / ||x||_2
  double equality_ratio;           ///< max_t Tx / (||x||_{2,inf} log(e^2/t)) for the s^{-1/2} probe
  std::size_t probes;
};

/// Probe family: indicators chi_(0,a), s^{-1/2} approximants and seeded random
/// decreasing functions.  For x >= 0 decreasing, Tx is decreasing and its sup is
/// the limit at 0.
inline TMappingBounds T_mapping_bounds(std::span<const StepFunction> probes, std::span<const double> grid) {
  TMappingBounds r{0.0, true, 0.0, 0.0, 0};
  for (const auto& x : probes) {
    if (x.is_zero()) continue;
    if (!x.is_decreasing()) throw PreconditionError("T bounds: probes must be nonnegative and decreasing");
    const HardyT op(x);
    const double l21 = lpq_norms(x).l21;
    double sup = op.at_zero();
    const double weak = weak_l2_quasinorm(x);
    for (double t : grid) {
      const double v = op(t);
      sup = std::max(sup, std::abs(v));
      const double bound = weak * (2.0 - std::log(t));
      if (std::abs(v) > bound * (1.0 + 1e-12)) r.exp_bound_ok = false;
    }
    r.norm_L21_to_Linf = std::max(r.norm_L21_to_Linf, sup / l21);
    r.empirical_L2_to_Lambda2 = std::max(r.empirical_L2_to_Lambda2, lambda2_norm_of_T(x) / x.lp_norm(2.0));
    ++r.probes;
  }
  const StepFunction probe = inverse_sqrt_right_endpoint(4000);
  const HardyT op(probe);
  const double weak = weak_l2_quasinorm(probe);
  for (double t : grid) r.equality_ratio = std::max(r.equality_ratio, op(t) / (weak * (2.0 - std::log(t))));
  return r;
}

inline std::vector<StepFunction> default_T_probes(std::uint64_t seed = 1) {
  std::vector<StepFunction> out;
  for (double a : {1e-6, 1e-3, 0.1, 0.5, 1.0}) out.push_back(StepFunction::indicator(0.0, a));
  for (int m : {16, 256, 4096}) out.push_back(inverse_sqrt_cell_average(m));
  out.push_back(inverse_sqrt_right_endpoint(200));
  Rng rng(seed);
  for (int k = 0; k < 20; ++k) out.push_back(random_decreasing(rng, 5 + 5 * static_cast<std::size_t>(k)));
  return out;
}

inline TMappingBounds T_mapping_bounds() {
  const auto probes = default_T_probes();
  const auto grid = default_t_grid();
  return T_mapping_bounds(probes, grid);
}

}  // namespace symspace
