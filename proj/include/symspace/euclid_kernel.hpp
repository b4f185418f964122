#pragma once

// The Bessel-potential kernel g(t) = c_d |t|^{-d/4} K_{d/4}(|t|) of (1 - Delta)^{-d/4}
// on R^d, its rearrangement profile and norms, and the sampled-field checks of the
// O'Neil-type submajorization and the pointwise estimate from below.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "symspace/box_field.hpp"
#include "symspace/error.hpp"
#include "symspace/hardy.hpp"
#include "symspace/quadrature.hpp"
#include "symspace/random.hpp"
#include "symspace/spaces.hpp"
#include "symspace/stepfn.hpp"

namespace symspace {

/// K_nu(r) = \int_0^inf exp(-r cosh u) cosh(nu u) du.
///
/// Evaluated as e^{-r} \int_0^U exp(-2 r sinh^2(u/2)) cosh(nu u) du; U is where the
/// rescaled integrand drops below 1e-18, so the truncation is relative to K itself.
inline double bessel_K(double nu, double r) {
  if (!(r > 0.0)) throw DomainError("bessel_K: r must be positive");
  if (!(nu >= 0.0)) throw DomainError("bessel_K: nu must be nonnegative");
  const auto log_integrand = [&](double u) {
    const double s = std::sinh(0.5 * u);
    return -2.0 * r * s * s + nu * u + std::log1p(std::exp(-2.0 * nu * u)) - std::numbers::ln2;
  };
  const double cutoff = std::log(1e-18);
  double hi = 1.0;
  while (log_integrand(hi) > cutoff) hi *= 2.0;
  double lo = 0.5 * hi;
  if (hi == 1.0) lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_integrand(mid) > cutoff ? lo : hi) = mid;
  }
  const auto integrand = [&](double u) {
    const double s = std::sinh(0.5 * u);
    return std::exp(-2.0 * r * s * s) * std::cosh(nu * u);
  };
  // Unit panels keep the double-exponential cutoff from confusing the error estimate.
  double total = 0.0;
  for (double a = 0.0; a < hi; a += 1.0) total += quad::integrate(integrand, a, std::min(a + 1.0, hi), 1e-13, 10);
  return std::exp(-r) * total;
}

namespace detail {

/// \int_{sqrt(a)}^{sqrt(b)} 2 s^{2d-1-2nu} K_nu(s^2) ds = \int_a^b r^{d-1-nu} K_nu(r) dr.
inline double kernel_radial_moment(int d, double a, double b, double tol = 1e-12, unsigned depth = 12) {
  const double nu = 0.25 * d;
  const double power = 2.0 * d - 1.0 - 2.0 * nu;
  const auto f = [&](double s) { return s > 0.0 ? 2.0 * std::pow(s, power) * bessel_K(nu, s * s) : 0.0; };
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(b);
  return quad::integrate(f, sa, sb, tol, depth);
}

/// Same moment with the order of integration swapped: the r-integral is an upper
/// incomplete gamma, leaving \int_0^inf cosh(nu u) cosh(u)^{nu-d}
/// [Gamma(d-nu, a cosh u) - Gamma(d-nu, b cosh u)] du.  Stays cheap as a -> 0.
inline double kernel_shell_moment(int d, double a, double b) {
  const double nu = 0.25 * d;
  const double order = d - nu;
  const auto log_cosh = [](double u) { return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2; };
  const auto f = [&](double u) {
    const double c = std::cosh(u);
    const auto upper = [&](double r) {
      if (r == 0.0) return boost::math::tgamma(order);
      return std::isinf(r * c) ? 0.0 : boost::math::tgamma(order, r * c);
    };
    const double upper_a = upper(a);
    const double upper_b = upper(b);
    const double diff = upper_a - upper_b;
    return diff == 0.0 ? 0.0 : diff * std::exp(log_cosh(nu * u) - order * log_cosh(u));
  };
  return quad::integrate_to_infinity(f, 0.0, 1e-10);
}

inline void require_kernel_dimension(int d) {
  if (d < 1 || d > 4) throw DomainError("kernel: d must be in {1, 2, 3, 4}");
}

/// Computes compute(d) once per dimension d in {1, 2, 3, 4}; thread-safe.
template <class Tag, class F>
double cached_per_dimension(int d, F&& compute) {
  require_kernel_dimension(d);
  static std::array<std::once_flag, 4> flags;
  static std::array<double, 4> values{};
  const auto i = static_cast<std::size_t>(d - 1);
  std::call_once(flags[i], [&] { values[i] = compute(d); });
  return values[i];
}

/// Radius past which the kernel mass is below double precision.
inline constexpr double kernel_radius_max = 64.0;

}  // namespace detail

/// c_d with \int_{R^d} c_d |t|^{-d/4} K_{d/4}(|t|) dt = 1, by radial quadrature.
inline double kernel_normalize(int d) {
  detail::require_kernel_dimension(d);
  const double cuts[] = {0.0, 0.25, 1.0, 4.0, 16.0, detail::kernel_radius_max};
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) mass += detail::kernel_radial_moment(d, cuts[i], cuts[i + 1]);
  return 1.0 / (unit_sphere_area(d) * mass);
}

class MacdonaldKernel {
 public:
  explicit MacdonaldKernel(int d)
      : d_(d), nu_(0.25 * d), c_d_(detail::cached_per_dimension<MacdonaldKernel>(d, kernel_normalize)) {}

  int d() const noexcept { return d_; }
  double nu() const noexcept { return nu_; }
  double c_d() const noexcept { return c_d_; }

  double operator()(double r) const {
    if (!(r > 0.0)) throw DomainError("MacdonaldKernel: r must be positive");
    return c_d_ * std::pow(r, -nu_) * bessel_K(nu_, r);
  }

  /// \int_{a < |t| < b} g(t) dt.
  double shell_mass(double a, double b) const {
    return c_d_ * unit_sphere_area(d_) * detail::kernel_shell_moment(d_, a, b);
  }

 private:
  int d_;
  double nu_;
  double c_d_;
};

/// inf_{0 < r < 2} g(r) r^{d/2} over 2000 log-spaced radii ending at 2.
inline double kernel_lower_constant(int d) {
  const MacdonaldKernel g(d);
  double best = std::numeric_limits<double>::infinity();
  for (double r : detail::log_grid(1e-8, 2.0, 2000)) best = std::min(best, g(r) * std::pow(r, 0.5 * d));
  return best;
}

/// mu(g)(s) = g((s / omega_d)^{1/d}) as a step function of cell averages on a geometric
/// s-grid from 1e-14 to the measure of the ball of radius 64.
inline StepFunction kernel_rearrangement_profile(int d, int cells = 200) {
  const MacdonaldKernel g(d);
  const double omega = unit_ball_volume(d);
  const double s_max = omega * std::pow(detail::kernel_radius_max, d);
  std::vector<double> bp{0.0};
  const auto grid = detail::log_grid(1e-14, s_max, cells);
  bp.insert(bp.end(), grid.begin(), grid.end());
  std::vector<double> v;
  v.reserve(bp.size() - 1);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double ra = std::pow(bp[i] / omega, 1.0 / d);
    const double rb = std::pow(bp[i + 1] / omega, 1.0 / d);
    v.push_back(g.shell_mass(ra, rb) / (bp[i + 1] - bp[i]));
  }
  return StepFunction(std::move(bp), std::move(v));
}

struct KernelNorms {
  double l1;
  double l2inf;
  double mixed;  ///< max(l2inf, l1)
};

inline KernelNorms kernel_norms(int d) {
  const StepFunction mu = kernel_rearrangement_profile(d);
  const LpqNorms n = lpq_norms(mu);
  return {mu.integral(), n.l2inf, n.l2inf_cap_l1};
}

/// ||g||_{L_{2,inf} \cap L_1}; computed once per dimension.
inline double kernel_mixed_norm(int d) {
  struct Tag {};
  return detail::cached_per_dimension<Tag>(d, [](int k) { return kernel_norms(k).mixed; });
}

/// CSV "r,g(r)".
inline void write_kernel_profile(std::ostream& out, int d, std::span<const double> radii) {
  const MacdonaldKernel g(d);
  out << "r,g(r)\n" << std::setprecision(17);
  for (double r : radii) out << r << ',' << g(r) << '\n';
}

// ---------------------------------------------------------------------------
// Sampled-field checks.

enum class CheckStatus { pass, fail, inconclusive };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inconclusive:
      return "inconclusive";
  }
  return "fail";
}

/// Relative change above which a margin is declared unstable under 2x refinement.
inline constexpr double refinement_tolerance = 0.05;

inline bool margins_stable(double coarse, double fine) {
  return std::abs(coarse - fine) <= refinement_tolerance * std::max(std::abs(fine), 1e-300) ||
         coarse == fine;
}

struct SubmajorizationMargins {
  double worst_deficit;       ///< max_t (lhs - rhs); <= 0 when the bound holds
  double worst_t;
  double margin;              ///< min_t (rhs - lhs) / rhs over t with rhs > 0
  double intermediate_deficit;  ///< max_t (lhs - 2 ||g|| F(t))
  bool holds;
};

namespace detail {

/// One grid: \int_0^t mu(u) against K \int_0^t T(mu(x) chi_(0,1)) and the F bound.
inline SubmajorizationMargins oneil_margins(const BoxField& x, const BoxField& u, double norm_g) {
  if (x.box_measure() < 1.0) throw DomainError("oneil_check: box must have measure >= 1");
  const StepFunction mu_x = empirical_rearrangement(x).restricted(1.0);
  const StepFunction mu_u = empirical_rearrangement(u).restricted(1.0);
  const HardyT t_op(mu_x);
  const Primitive lhs(mu_u);
  const double mu_at_one = empirical_rearrangement(x)(1.0);
  const double constant = 4.0 * norm_g;

  std::vector<double> ts(mu_u.breakpoints().begin() + 1, mu_u.breakpoints().end());
  SubmajorizationMargins m{-std::numeric_limits<double>::infinity(), 0.0, 1.0,
                           -std::numeric_limits<double>::infinity(), true};
  bool any_rhs = false;
  for (double t : ts) {
    const double l = lhs(t);
    const double r = constant * t_op.integral_to(t);
    if (l - r > m.worst_deficit) {
      m.worst_deficit = l - r;
      m.worst_t = t;
    }
    if (r > 0.0) {
      m.margin = std::min(m.margin, (r - l) / r);
      any_rhs = true;
    }
  }
  if (!any_rhs) m.margin = 0.0;

  // F is not concave in general: add mu(x) breakpoints and a log grid.
  for (double t : mu_x.breakpoints()) {
    if (t > 0.0) ts.push_back(t);
  }
  for (double t : log_grid(1e-8, 1.0, 400)) ts.push_back(t);
  for (double t : ts) {
    const double f = t * t_op(t) + t * mu_at_one;
    m.intermediate_deficit = std::max(m.intermediate_deficit, lhs(t) - 2.0 * norm_g * f);
  }
  const double slack = 1e-12 * std::max(1.0, lhs(1.0));
  m.holds = m.worst_deficit <= slack && m.intermediate_deficit <= slack;
  return m;
}

}  // namespace detail

struct OneilResult {
  CheckStatus status;
  double worst_deficit;
  double worst_t;
  double margin;
  double margin_coarse;
  double intermediate_deficit;
  double constant;  ///< 4 ||g||_{L_{2,inf} \cap L_1}
  bool pass() const noexcept { return status == CheckStatus::pass; }
};

/// mu(x * g) chi_(0,1) \prec\prec 4 ||g|| T(mu(x) chi_(0,1)) on the sampled field and on
/// its 2x coarsening; x * g is the periodic FFT surrogate.
inline OneilResult oneil_check(const BoxField& x, int d) {
  if (x.d() != d) throw DomainError("oneil_check: field dimension mismatch");
  const double norm_g = kernel_mixed_norm(d);
  const double alpha = 0.25 * d;
  const auto fine = detail::oneil_margins(x, bessel_potential_apply(x, alpha), norm_g);
  const BoxField xc = x.coarsened();
  const auto coarse = detail::oneil_margins(xc, bessel_potential_apply(xc, alpha), norm_g);
  OneilResult r{CheckStatus::pass, fine.worst_deficit,        fine.worst_t, fine.margin,
                coarse.margin,     fine.intermediate_deficit, 4.0 * norm_g};
  if (!fine.holds) {
    r.status = CheckStatus::fail;
  } else if (!margins_stable(coarse.margin, fine.margin)) {
    r.status = CheckStatus::inconclusive;
  }
  return r;
}

struct SobolevResult {
  CheckStatus status;
  double c_used;
  double margin;
  double margin_coarse;
  bool pass() const noexcept { return status == CheckStatus::pass; }
};

/// mu((1 - Delta)^{-d/4} x) chi_(0,1) \prec\prec c_d T(mu(x) chi_(0,1)), c_d = 4 ||g||.
inline SobolevResult distributional_sobolev_check(const BoxField& x, int d) {
  const OneilResult o = oneil_check(x, d);
  return {o.status, o.constant, o.margin, o.margin_coarse};
}

/// (1/d) 2^{-d/2} c'_d |S^{d-1}|.
inline double from_below_constant(int d) {
  struct Tag {};
  const double c_prime = detail::cached_per_dimension<Tag>(d, kernel_lower_constant);
  return std::pow(2.0, -0.5 * d) * c_prime * unit_sphere_area(d) / d;
}

struct FromBelowResult {
  CheckStatus status;
  double constant;
  double margin;         ///< min over |t| < 1 of (lhs - rhs) / rhs
  double margin_coarse;
  double worst_radius;
  bool pass() const noexcept { return status == CheckStatus::pass; }
};

/// Relative allowance for the pointwise estimate from below.
inline constexpr double from_below_allowance = 0.02;

namespace detail {

struct PointwiseMargin {
  double margin;
  double radius;
};

inline PointwiseMargin from_below_margin(const StepFunction& x, int d, double half_width, std::size_t n,
                                         double constant) {
  const BoxField field = radial_lift(extend_for_box(x, d, half_width), d, half_width, n, 4);
  const BoxField u = bessel_potential_apply(field, 0.25 * d);
  const HardyT t_op(x);
  PointwiseMargin m{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rad = u.radius(i);
    if (!(rad > 0.0 && rad < 1.0)) continue;
    const double rhs = constant * t_op(std::pow(rad, d));
    if (!(rhs > 0.0)) continue;
    const double rel = (u[i] - rhs) / rhs;
    if (rel < m.margin) {
      m.margin = rel;
      m.radius = rad;
    }
  }
  return m;
}

}  // namespace detail

/// ((1 - Delta)^{-d/4}(x o r_d))(t) >= C (Tx)(|t|^d) at grid points with |t| < 1.
/// The lift is cell-averaged (4^d midpoints per cell) so the jump of x at |t| = 1
/// is resolved the same way on both grids of the refinement test.
inline FromBelowResult estimate_from_below_check(const StepFunction& x, int d, std::size_t n,
                                                 double half_width = 16.0) {
  if (x.length() != 1.0) throw PreconditionError("estimate_from_below_check: x must live on (0, 1)");
  if (!x.is_decreasing()) throw PreconditionError("estimate_from_below_check: x must be decreasing");
  if (x(0.0) < 0.0 || x.values().back() < 0.0) {
    throw PreconditionError("estimate_from_below_check: x must be nonnegative");
  }
  const double constant = from_below_constant(d);
  FromBelowResult r{CheckStatus::pass, constant, std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(), 0.0};
  if (x.is_zero()) return r;
  const auto fine = detail::from_below_margin(x, d, half_width, n, constant);
  const auto coarse = detail::from_below_margin(x, d, half_width, n / 2, constant);
  r.margin = fine.margin;
  r.margin_coarse = coarse.margin;
  r.worst_radius = fine.radius;
  if (fine.margin < -from_below_allowance) {
    r.status = CheckStatus::fail;
  } else if (!margins_stable(coarse.margin, fine.margin)) {
    r.status = CheckStatus::inconclusive;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Random inputs: sums of Gaussian bumps cut off outside the unit ball.

struct BumpRecipe {
  int d;
  std::vector<std::array<double, 2>> centres;
  std::vector<double> widths;
  std::vector<double> amplitudes;

  double operator()(std::span<const double> t) const {
    double r2 = 0.0;
    for (double c : t) r2 += c * c;
    if (r2 >= 1.0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) q += (t[i] - centres[k][i]) * (t[i] - centres[k][i]);
      s += amplitudes[k] * std::exp(-0.5 * q / (widths[k] * widths[k]));
    }
    return s;
  }

  BoxField sample(double half_width, std::size_t n) const {
    return BoxField::sample(d, half_width, n, [this](std::span<const double> t) { return (*this)(t); });
  }
};

/// One to three bumps; centres in (-1/2, 1/2)^d, signed amplitudes in (-1, 1).
inline BumpRecipe random_bumps(Rng& rng, int d) {
  if (d != 1 && d != 2) throw DomainError("random_bumps: d must be 1 or 2");
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> centre(-0.5, 0.5);
  std::uniform_real_distribution<double> width(d == 1 ? 0.05 : 0.25, d == 1 ? 0.3 : 0.5);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  BumpRecipe b{d, {}, {}, {}};
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    b.centres.push_back({centre(rng), d == 2 ? centre(rng) : 0.0});
    b.widths.push_back(width(rng));
    b.amplitudes.push_back(amp(rng));
  }
  return b;
}

}  // namespace symspace
