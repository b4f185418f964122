#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "symspace/hardy.hpp"
#include "symspace/random.hpp"

using namespace symspace;

namespace {

constexpr double kE = std::numbers::e;

/// (Tx)(t) by Simpson on each piece of x, substituting s = r^2 to tame s^{-1/2}.
double T_by_quadrature(const StepFunction& x, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.piece_count(); ++i) {
    const Piece p = x.piece(i);
    auto f = [&](double r) { return 2.0 * r * p.value * hardy_kernel(t, r * r); };
    const double a = std::sqrt(p.lo);
    const double b = std::sqrt(p.hi);
    const double mid = std::sqrt(t);
    if (a < mid && mid < b) {
      s += oracle::simpson(f, a, mid, 400) + oracle::simpson(f, mid, b, 400);
    } else {
      s += oracle::simpson(f, a, b, 400);
    }
  }
  return s;
}

double l2_norm_of_T(const StepFunction& x) {
  const HardyT op(x);
  double s = 0.0;
  const auto bp = x.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    s += quad::integrate_singular([&](double t) { return op(t) * op(t); }, bp[i], bp[i + 1], 1e-10);
  }
  return std::sqrt(s);
}

/// Reference for the Cesaro left side: running max of h on a dense log grid,
/// trapezoid in log t, plus the exact head \int_0^{t0} v0 psi^2/t = v0 psi(t0).
double cesaro_lhs_by_grid(const StepFunction& w) {
  const auto mu = decreasing_rearrangement(w);
  const Primitive prim(mu);
  const double t0 = 1e-14;
  const int n = 2000000;
  double running = 0.0;
  double prev = 0.0;
  double total = mu.values()[0] * oracle::psi(t0);
  const double step = -std::log(t0) / n;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 * std::exp(step * i);
    const double h = oracle::psi(t) * oracle::psi(t) * prim(t) / t;
    running = std::max(running, h);
    if (i > 0) total += 0.5 * (running + prev) * step;
    prev = running;
  }
  return total;
}

}  // namespace

TEST(HardyKernel, ValuesAndSymmetry) {
  EXPECT_NEAR(hardy_kernel(0.25, 0.5), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(hardy_kernel(0.3, 0.7), hardy_kernel(0.7, 0.3));
}

TEST(HardyKernel, HilbertSchmidtNorm) {
  EXPECT_NEAR(hs_norm_T(), std::numbers::sqrt2, 1e-10);
  // Outer integral of 1 + log(1/t) with t = u^2.
  const double num = oracle::simpson([](double u) { return u > 0 ? (1.0 - 2.0 * std::log(u)) * 2.0 * u : 0.0; },
                                     0.0, 1.0, 20000);
  EXPECT_NEAR(std::sqrt(num), hs_norm_T(), 1e-7);
}

TEST(HardyT, IndicatorProfileIsTwoMinusSqrt) {
  const HardyT op(StepFunction::constant(1.0, 1.0));
  for (double t : default_t_grid()) EXPECT_NEAR(op(t), 2.0 - std::sqrt(t), 1e-12);
  EXPECT_NEAR(op.at_zero(), 2.0, 1e-15);
}

TEST(HardyT, ZeroAndSingularity) {
  const HardyT op(StepFunction::zero(1.0));
  EXPECT_EQ(op(0.3), 0.0);
  EXPECT_THROW(op(0.0), DomainError);
  EXPECT_THROW(HardyT(StepFunction::constant(1.0, 2.0)), DomainError);
}

TEST(HardyT, MatchesQuadratureOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_step(rng, 8);
    const HardyT op(x);
    for (double t : {1e-4, 0.03, 0.25, 0.6, 0.97}) EXPECT_NEAR(op(t), T_by_quadrature(x, t), 1e-9);
  }
}

TEST(HardyT, IntegralToMatchesQuadrature) {
  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_step(rng, 6);
    const HardyT op(x);
    for (double t : {0.01, 0.3, 0.8, 1.0}) {
      double ref = 0.0;
      const auto bp = x.breakpoints();
      for (std::size_t i = 0; i + 1 < bp.size() && bp[i] < t; ++i) {
        ref += quad::integrate_singular([&](double s) { return op(s); }, bp[i], std::min(bp[i + 1], t), 1e-12);
      }
      EXPECT_NEAR(op.integral_to(t), ref, 1e-10);
    }
  }
}

TEST(HardyT, LinearAndPositive) {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_step(rng, 10);
    const auto y = random_step(rng, 7);
    const HardyT tx(x);
    const HardyT ty(y);
    const HardyT tsum(x.scaled(2.0) + y);
    const HardyT tabs(x.abs());
    for (double t : {1e-6, 0.1, 0.5, 0.9}) {
      EXPECT_NEAR(tsum(t), 2.0 * tx(t) + ty(t), 1e-12 * (1.0 + std::abs(tsum(t))));
      EXPECT_GE(tabs(t), 0.0);
    }
  }
}

TEST(HardyT, BoundedByHilbertSchmidtNorm) {
  Rng rng(20);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_step(rng, 3 + trial % 10);
    EXPECT_LE(l2_norm_of_T(x), hs_norm_T() * x.lp_norm(2.0));
  }
}

TEST(HardyT, ClosedFormL2NormMatchesQuadrature) {
  EXPECT_NEAR(T_l2_norm(StepFunction::constant(1.0, 1.0)), std::sqrt(4.0 - 8.0 / 3.0 + 0.5), 1e-14);
  EXPECT_EQ(T_l2_norm(StepFunction::zero(1.0)), 0.0);
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_step(rng, 3 + trial % 10);
    EXPECT_NEAR(T_l2_norm(x), l2_norm_of_T(x), 1e-8 * (1.0 + l2_norm_of_T(x))) << trial;
  }
}

TEST(HardyT, InverseSqrtApproximantsConvergeAtFirstOrder) {
  const HardyT op(inverse_sqrt_cell_average(4096));
  for (double t : {0.01, 0.1, 0.5}) EXPECT_NEAR(op(t), std::log(kE * kE / t), 2e-3);
  double prev = inverse_sqrt_profile_error(64);
  for (int m : {128, 256, 512}) {
    const double e = inverse_sqrt_profile_error(m);
    const double slope = std::log2(prev / e);
    EXPECT_NEAR(slope, 1.0, 0.2) << m;
    prev = e;
  }
}

TEST(PsiProfile, IntegralsMatchQuadrature) {
  const PsiProfile y({0.0, 0.2, 0.6, 1.0}, {0.0, 0.7, 0.3}, {1.5, 0.0, 0.9});
  for (std::size_t i = 0; i < y.piece_count(); ++i) {
    const double a = std::max(y.breakpoints()[i], 1e-300);
    const double b = y.breakpoints()[i + 1];
    auto ys = [&](double s) { return y.level(i) + y.coef(i) * oracle::psi(s); };
    const double ref1 = quad::integrate_singular([&](double s) { return ys(s) / std::sqrt(s); }, a, b, 1e-13);
    EXPECT_NEAR(y.integral_inv_sqrt(i, y.breakpoints()[i], b), ref1, 1e-11);
    if (i > 0) {
      const double ref2 = quad::integrate([&](double s) { return ys(s) / s; }, a, b);
      EXPECT_NEAR(y.integral_over_s(i, a, b), ref2, 1e-12);
    }
  }
  // \int y^2 ds/s with s = e^{-r}.
  double ref = 0.0;
  for (std::size_t i = 0; i < y.piece_count(); ++i) {
    auto f = [&](double r) {
      const double v = y.level(i) + y.coef(i) / (1.0 + r);  // psi(e^{-r})
      return v * v;
    };
    const double rb = -std::log(y.breakpoints()[i + 1]);
    ref += i == 0 ? quad::integrate_to_infinity(f, rb, 1e-13)
                  : quad::integrate(f, rb, -std::log(y.breakpoints()[i]));
  }
  EXPECT_NEAR(y.weighted_l2_norm(), std::sqrt(ref), 1e-10);
}

TEST(Extremizer, IndicatorGivesPsi) {
  const auto y = extremizer_y(StepFunction::constant(1.0, 1.0));
  for (double t : {1e-9, 0.01, 0.5, 0.99}) EXPECT_NEAR(y(t), oracle::psi(t), 1e-15);
  const auto r = extremizer_x(StepFunction::constant(1.0, 1.0));
  EXPECT_NEAR(r.l2_norm, 1.0, 1e-14);
  EXPECT_TRUE(r.pointwise_ok);
  EXPECT_TRUE(r.norm_ok);
  EXPECT_NEAR(r.x(0.25), oracle::psi(0.25) / 0.5, 1e-15);
}

TEST(Extremizer, ZeroInput) {
  const auto y = extremizer_y(StepFunction::zero(1.0));
  EXPECT_EQ(y(0.5), 0.0);
  const auto r = extremizer_x(StepFunction::zero(1.0));
  EXPECT_EQ(r.l2_norm, 0.0);
  EXPECT_TRUE(r.pointwise_ok);
}

TEST(Extremizer, RejectsIncreasingInput) {
  EXPECT_THROW(extremizer_y(StepFunction({0.0, 0.5, 1.0}, {1.0, 2.0})), PreconditionError);
}

TEST(Extremizer, MatchesBruteForceSupremum) {
  Rng rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const auto z = random_decreasing(rng, 12);
    const auto y = extremizer_y(z);
    for (double t : oracle::log_grid(1e-10, 0.999, 50)) {
      double sup = 0.0;
      for (double s : oracle::log_grid(1e-14, t, 4000)) {
        if (s < t) sup = std::max(sup, oracle::psi(s) * z(s));
      }
      for (double b : z.breakpoints()) {
        if (b > 0.0 && b < t) sup = std::max(sup, oracle::psi(b) * z(b * (1.0 - 1e-15)));
      }
      EXPECT_GE(y(t), sup * (1.0 - 1e-9));
      EXPECT_LE(y(t), sup * (1.0 + 1e-3) + 1e-300);
    }
  }
}

TEST(Extremizer, RandomFamilySatisfiesBothBounds) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z = random_decreasing(rng, 2 + trial % 80);
    const auto r = extremizer_x(z);
    EXPECT_TRUE(r.norm_ok) << trial;
    EXPECT_TRUE(r.pointwise_ok) << trial << " margin " << r.pointwise_margin << " at " << r.worst_t;
    EXPECT_TRUE(r.y.is_nondecreasing_nonnegative());
  }
}

TEST(Extremizer, MonotoneInZ) {
  Rng rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z2 = random_decreasing(rng, 20);
    // z1 = z2 times a decreasing factor in (0, 1] stays decreasing and below z2.
    std::vector<double> v(z2.values().begin(), z2.values().end());
    double f = 1.0;
    for (double& x : v) {
      f *= 0.5 + 0.5 * unif(rng);
      x *= f;
    }
    const StepFunction z1(std::vector<double>(z2.breakpoints().begin(), z2.breakpoints().end()), v);
    const auto y1 = extremizer_y(z1);
    const auto y2 = extremizer_y(z2);
    for (double t : oracle::log_grid(1e-9, 0.999, 300)) EXPECT_LE(y1(t), y2(t) * (1.0 + 1e-14));
  }
}

TEST(L2ToL2, Examples) {
  const auto grid = oracle::log_grid(1e-9, 0.999, 1000);
  EXPECT_GE(l2tol2_pointwise_check(PsiProfile::psi(), grid), 0.0);
  const double c = 2.5;
  const auto constant = PsiProfile::from_steps(StepFunction::constant(c, 1.0));
  const HardyTProfile tx(constant);
  for (double t : grid) EXPECT_GE(oracle::psi(t) * tx(t), c / 2.0 - 1e-12);
  EXPECT_GE(l2tol2_pointwise_check(constant, grid), 0.0);
  EXPECT_EQ(l2tol2_pointwise_check(PsiProfile::from_steps(StepFunction::zero(1.0)), grid), 0.0);
  EXPECT_THROW(l2tol2_pointwise_check(PsiProfile::from_steps(StepFunction({0.0, 0.5, 1.0}, {2.0, 1.0})), grid),
               PreconditionError);
}

TEST(L2ToL2, ProfileTMatchesQuadrature) {
  // y = chi_(0.25, 1), so x = s^{-1/2} on (0.25, 1).
  const auto y = PsiProfile::from_steps(StepFunction({0.0, 0.25, 1.0}, {0.0, 1.0}));
  const HardyTProfile tp(y);
  for (double t : {0.1, 0.3, 0.7}) {
    double ref = 0.0;
    ref += quad::integrate([&](double s) { return hardy_kernel(t, s) / std::sqrt(s); }, 0.25, std::max(0.25, t));
    ref += quad::integrate([&](double s) { return hardy_kernel(t, s) / std::sqrt(s); }, std::max(0.25, t), 1.0);
    EXPECT_NEAR(tp(t), ref, 1e-12);
  }
}

TEST(Cesaro, ExactLhsMatchesGridReference) {
  for (double u : {0.05, 0.2, 0.5, 0.8}) {
    const auto w = StepFunction::indicator(0.0, u);
    EXPECT_NEAR(sup_cesaro_claim(w).lhs, cesaro_lhs_by_grid(w), 2e-6) << u;
  }
  Rng rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const auto w = random_step(rng, 8, 1.0, 0.0, 2.0);
    EXPECT_NEAR(sup_cesaro_claim(w).lhs, cesaro_lhs_by_grid(w), 2e-6 * (1.0 + w.sup_norm()));
  }
}

TEST(Cesaro, IndicatorOnConvexPartHasLogIntegralForm) {
  // For u in (1/e, 1): lhs = psi(u) + u \int_u^1 psi^2(t)/t^2 dt.
  for (double u : {0.4, 0.5, 0.7, 0.95}) {
    const double tail = quad::integrate([](double t) { return oracle::psi(t) * oracle::psi(t) / (t * t); }, u, 1.0);
    EXPECT_NEAR(sup_cesaro_claim(StepFunction::indicator(0.0, u)).lhs, oracle::psi(u) + u * tail, 1e-12);
  }
}

TEST(Cesaro, BoundHoldsAndZeroCase) {
  const auto zero = sup_cesaro_claim(StepFunction::zero(1.0));
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  Rng rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double u = std::exp(-15.0 * unif(rng));
    const auto c = sup_cesaro_claim(StepFunction::indicator(0.0, u));
    EXPECT_LE(c.lhs, c.rhs);
    const auto w = random_step(rng, 2 + trial % 30, 1.0, 0.0, 3.0);
    const auto cw = sup_cesaro_claim(w);
    EXPECT_LE(cw.lhs, cw.rhs);
  }
  EXPECT_THROW(sup_cesaro_claim(StepFunction::constant(-1.0, 1.0)), PreconditionError);
}

TEST(TBounds, IndicatorAndProbeFamily) {
  const HardyT op(StepFunction::constant(1.0, 1.0));
  EXPECT_NEAR(op.at_zero() / lpq_norms(StepFunction::constant(1.0, 1.0)).l21, 2.0, 1e-15);
  const auto b = T_mapping_bounds();
  EXPECT_NEAR(b.norm_L21_to_Linf, 2.0, 1e-9);
  EXPECT_TRUE(b.exp_bound_ok);
  EXPECT_TRUE(std::isfinite(b.empirical_L2_to_Lambda2));
  EXPECT_GT(b.empirical_L2_to_Lambda2, 0.0);
  EXPECT_GT(b.equality_ratio, 0.98);
  EXPECT_LE(b.equality_ratio, 1.0 + 1e-12);

  const std::vector<StepFunction> zero{StepFunction::zero(1.0)};
  const auto grid = default_t_grid();
  const auto z = T_mapping_bounds(zero, grid);
  EXPECT_EQ(z.norm_L21_to_Linf, 0.0);
  EXPECT_EQ(z.empirical_L2_to_Lambda2, 0.0);
  EXPECT_TRUE(z.exp_bound_ok);
}
