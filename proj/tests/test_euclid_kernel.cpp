#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "symspace/euclid_kernel.hpp"

using namespace symspace;

namespace {

constexpr double kPi = std::numbers::pi;

double closed_form_c(int d) {
  return 1.0 / (std::pow(2.0, 0.75 * d - 1.0) * std::pow(kPi, 0.5 * d) * std::tgamma(0.25 * d));
}

/// Smooth field supported in |t| < 1: Gaussian bumps times (1 - |t|^2)^2.
BoxField smooth_field(Rng& rng, int d, double half_width, std::size_t n) {
  const BumpRecipe b = random_bumps(rng, d);
  return BoxField::sample(d, half_width, n, [&](std::span<const double> t) {
    double r2 = 0.0;
    for (double c : t) r2 += c * c;
    return r2 < 1.0 ? b(t) * (1.0 - r2) * (1.0 - r2) : 0.0;
  });
}

/// Non-periodic convolution with g sampled at cell offsets; the singular centre
/// cell uses its exact mass.
std::vector<double> direct_convolution_1d(const BoxField& x, const MacdonaldKernel& g) {
  const std::size_t n = x.n();
  const double h = x.spacing();
  std::vector<double> w(n);
  w[0] = g.shell_mass(0.0, 0.5 * h) / h;
  for (std::size_t m = 1; m < n; ++m) w[m] = g(static_cast<double>(m) * h);
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = i > j ? i - j : j - i;
      out[i] += h * w[m] * x[j];
    }
  }
  return out;
}

}  // namespace

TEST(BesselK, HalfOrderClosedForm) {
  for (double r : oracle::log_grid(1e-3, 20.0, 200)) {
    const double exact = std::sqrt(kPi / (2.0 * r)) * std::exp(-r);
    EXPECT_NEAR(bessel_K(0.5, r) / exact, 1.0, 1e-10) << "r=" << r;
  }
}

TEST(BesselK, MatchesLibraryAcrossOrders) {
  for (double nu : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double r : oracle::log_grid(1e-6, 50.0, 60)) {
      EXPECT_NEAR(bessel_K(nu, r) / std::cyl_bessel_k(nu, r), 1.0, 1e-10) << nu << ' ' << r;
    }
  }
}

TEST(BesselK, DecreasesInR) {
  for (double nu : {0.25, 0.5, 1.0}) {
    double prev = bessel_K(nu, 1.0);
    for (double r : {2.0, 4.0, 8.0}) {
      const double k = bessel_K(nu, r);
      EXPECT_GT(k, 0.0);
      EXPECT_LT(k, prev);
      prev = k;
    }
  }
}

TEST(BesselK, SmallArgumentLaw) {
  // r^nu K_nu(r) -> 2^{nu-1} Gamma(nu), with the gap shrinking like r^{2 nu}.
  const double limit = std::pow(2.0, -0.75) * std::tgamma(0.25);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double r : {1e-2, 1e-3, 1e-4}) {
    const double gap = std::abs(std::pow(r, 0.25) * bessel_K(0.25, r) - limit);
    EXPECT_LT(gap, prev_gap);
    EXPECT_LT(gap, 3.0 * std::sqrt(r));
    prev_gap = gap;
  }
}

TEST(BesselK, RejectsNonpositiveArgument) {
  EXPECT_THROW(bessel_K(0.5, 0.0), DomainError);
  EXPECT_THROW(bessel_K(0.5, -1.0), DomainError);
  EXPECT_THROW(bessel_K(-0.5, 1.0), DomainError);
}

TEST(Kernel, NormalizationMatchesClosedForm) {
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(kernel_normalize(d) / closed_form_c(d), 1.0, 1e-6) << d;
  EXPECT_NEAR(kernel_normalize(2), 1.0 / (2.0 * kPi * std::sqrt(kPi / 2.0)), 1e-9);
  EXPECT_THROW(kernel_normalize(5), DomainError);
}

TEST(Kernel, TotalMassIsOne) {
  for (int d = 1; d <= 4; ++d) {
    const MacdonaldKernel g(d);
    EXPECT_NEAR(g.shell_mass(0.0, 64.0), 1.0, 1e-6) << d;
  }
}

TEST(Kernel, PositiveAndDecreasing) {
  for (int d = 1; d <= 4; ++d) {
    const MacdonaldKernel g(d);
    double prev = std::numeric_limits<double>::infinity();
    for (double r : oracle::log_grid(1e-6, 40.0, 200)) {
      const double v = g(r);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(Kernel, LowerConstant) {
  const double c2 = closed_form_c(2);
  EXPECT_NEAR(kernel_lower_constant(2), c2 * std::sqrt(kPi / 2.0) * std::exp(-2.0), 1e-12);
  for (int d = 1; d <= 4; ++d) {
    const double cp = kernel_lower_constant(d);
    EXPECT_GT(cp, 0.0);
    const double nu = 0.25 * d;
    EXPECT_NEAR(cp, closed_form_c(d) * std::pow(2.0, nu) * std::cyl_bessel_k(nu, 2.0), 1e-9 * cp);
  }
  const MacdonaldKernel g(2);
  double prev = std::numeric_limits<double>::infinity();
  for (double r : oracle::log_grid(1e-6, 2.0, 300)) {
    const double v = g(r) * r;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Kernel, MixedNorm) {
  for (int d = 1; d <= 4; ++d) {
    const KernelNorms n = kernel_norms(d);
    EXPECT_NEAR(n.l1, 1.0, 1e-6);
    // sup_s s^{-1/2} \int_0^s mu(g) is the s -> 0 limit 2 c_d 2^{nu-1} Gamma(nu) omega_d^{1/2}.
    const double nu = 0.25 * d;
    const double limit = 2.0 * closed_form_c(d) * std::pow(2.0, nu - 1.0) * std::tgamma(nu) *
                         std::sqrt(unit_ball_volume(d));
    EXPECT_NEAR(n.l2inf / limit, 1.0, 1e-6) << d;
    EXPECT_DOUBLE_EQ(n.mixed, std::max(n.l1, n.l2inf));
  }
  EXPECT_TRUE(kernel_rearrangement_profile(1).is_decreasing());
  EXPECT_DOUBLE_EQ(kernel_mixed_norm(1), kernel_norms(1).mixed);
}

TEST(Kernel, ProfileCsv) {
  std::ostringstream out;
  const double radii[] = {0.5, 1.0};
  write_kernel_profile(out, 2, radii);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,g(r)");
  std::getline(in, line);
  const double g = std::stod(line.substr(line.find(',') + 1));
  EXPECT_NEAR(g, MacdonaldKernel(2)(0.5), 1e-15);
}

TEST(BoxField, GridAndValidation) {
  const BoxField x(2, 16.0, 512);
  EXPECT_EQ(x.size(), 512u * 512u);
  EXPECT_DOUBLE_EQ(x.spacing(), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(x.cell_measure() * static_cast<double>(x.size()), x.box_measure());
  EXPECT_DOUBLE_EQ(x.coordinate(0), -16.0 + 1.0 / 32.0);
  EXPECT_THROW(BoxField(1, 16.0, 100), DomainError);
  EXPECT_THROW(BoxField(3, 16.0, 64), DomainError);
}

TEST(BoxField, CoarsenPreservesIntegral) {
  Rng rng(3);
  const BoxField x = smooth_field(rng, 2, 4.0, 64);
  const BoxField c = x.coarsened();
  double a = 0.0;
  double b = 0.0;
  for (double v : x.samples()) a += v * x.cell_measure();
  for (double v : c.samples()) b += v * c.cell_measure();
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(BoxField, SnapshotRoundTrip) {
  Rng rng(4);
  const BoxField x = smooth_field(rng, 2, 2.0, 32);
  const auto path = (std::filesystem::temp_directory_path() / "symspace_snapshot.bin").string();
  save_snapshot(path, x);
  const BoxField y = load_snapshot(path);
  ASSERT_EQ(y.size(), x.size());
  EXPECT_EQ(y.d(), 2);
  EXPECT_DOUBLE_EQ(y.half_width(), 2.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i], y[i]);
  std::ifstream side(path + ".json");
  const auto meta = nlohmann::json::parse(side);
  EXPECT_EQ(meta["dtype"], "f64");
  EXPECT_EQ(meta["order"], "row-major");
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}

TEST(BoxField, EmpiricalRearrangementOfDisc) {
  const StepFunction chi = extend_for_box(StepFunction::indicator(0.0, 1.0), 2, 16.0);
  const BoxField disc = radial_lift(chi, 2, 16.0, 512);
  const StepFunction mu = empirical_rearrangement(disc);
  EXPECT_NEAR(mu.integral(), kPi, 0.01 * kPi);
  EXPECT_TRUE(mu.is_decreasing());
  EXPECT_THROW(radial_lift(StepFunction::indicator(0.0, 1.0), 2, 16.0, 64), DomainError);
}

TEST(RadialLift, RearrangementLaw) {
  // mu(x o r_d) = sigma_{omega_d} mu(x), compared in L_1 on (0, omega_d).  Profiles are
  // resolvable on the grid: 40 equal pieces with sorted uniform values, and t^{-1/4}.
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<StepFunction> profiles;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> bp{0.0};
    std::vector<double> v;
    for (int i = 1; i <= 40; ++i) {
      bp.push_back(i / 40.0);
      v.push_back(u(rng));
    }
    std::sort(v.begin(), v.end(), std::greater<>());
    profiles.emplace_back(bp, v);
  }
  std::vector<double> bp{0.0};
  std::vector<double> v;
  for (double b : oracle::log_grid(1e-12, 1.0, 200)) {
    v.push_back((std::pow(b, 0.75) - std::pow(bp.back(), 0.75)) / (0.75 * (b - bp.back())));
    bp.push_back(b);
  }
  profiles.emplace_back(bp, v);
  for (int d : {1, 2}) {
    const std::size_t n = d == 1 ? (1u << 14) : 512u;
    const double omega = unit_ball_volume(d);
    for (const StepFunction& x : profiles) {
      const BoxField lifted = radial_lift(extend_for_box(x, d, 16.0), d, 16.0, n);
      const StepFunction emp = empirical_rearrangement(lifted).restricted(omega);
      const StepFunction law = dilate(x, omega);
      EXPECT_LT((emp - law).l1_norm(), 0.02 * law.l1_norm()) << d;
    }
  }
}

TEST(BesselPotential, ConstantIsFixed) {
  BoxField one(2, 16.0, 64);
  for (double& v : one.samples()) v = 1.0;
  const BoxField u = bessel_potential_apply(one, 0.5);
  for (double v : u.samples()) EXPECT_NEAR(v, 1.0, 1e-13);
}

TEST(BesselPotential, FourierModeIsEigenvector) {
  const double L = 16.0;
  const BoxField mode = BoxField::sample(1, L, 1024, [&](std::span<const double> t) {
    return std::cos(kPi * t[0] / L);
  });
  for (double alpha : {0.25, 0.5}) {
    const BoxField u = bessel_potential_apply(mode, alpha);
    const double factor = std::pow(1.0 + (kPi / L) * (kPi / L), -alpha);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], factor * mode[i], 1e-12);
  }
}

TEST(BesselPotential, SelfAdjoint) {
  Rng rng(9);
  std::normal_distribution<double> z;
  for (int d : {1, 2}) {
    for (int trial = 0; trial < 5; ++trial) {
      BoxField x(d, 8.0, d == 1 ? 4096 : 128);
      BoxField y(d, 8.0, d == 1 ? 4096 : 128);
      for (double& v : x.samples()) v = z(rng);
      for (double& v : y.samples()) v = z(rng);
      const double a = bessel_potential_apply(x, 0.25 * d).inner(y);
      const double b = x.inner(bessel_potential_apply(y, 0.25 * d));
      EXPECT_NEAR(a, b, 1e-10 * std::abs(a) + 1e-12);
      EXPECT_GT(bessel_potential_apply(x, 0.25 * d).inner(x), 0.0);
    }
  }
}

TEST(BesselPotential, AgreesWithDirectConvolution) {
  const MacdonaldKernel g(1);
  Rng rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    const BoxField x = smooth_field(rng, 1, 16.0, 1u << 14);
    const BoxField u = bessel_potential_apply(x, 0.25);
    const auto v = direct_convolution_1d(x, g);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      diff += (u[i] - v[i]) * (u[i] - v[i]);
      norm += v[i] * v[i];
    }
    EXPECT_LT(std::sqrt(diff / norm), 0.02);
  }
}

TEST(BesselPotential, KernelZeroFrequency) {
  // DFT of sampled g at frequency 0 (times h) is its Riemann sum; the two cells
  // touching the singularity carry their exact averages.
  const MacdonaldKernel g(1);
  const double L = 16.0;
  const std::size_t n = 1u << 14;
  FftPlan plan({static_cast<int>(n)});
  auto buf = plan.data();
  const BoxField grid(1, L, n);
  const double h = grid.spacing();
  for (std::size_t j = 0; j < n; ++j) {
    const double r = std::abs(grid.coordinate(j));
    buf[j] = r < h ? g.shell_mass(0.0, h) / (2.0 * h) : g(r);
  }
  plan.forward();
  EXPECT_NEAR(buf[0].real() * h, 1.0, 1e-3);
}

TEST(Oneil, ZeroFieldPasses) {
  const BoxField zero(1, 16.0, 1024);
  const OneilResult r = oneil_check(zero, 1);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.worst_deficit, 0.0);
  EXPECT_DOUBLE_EQ(r.constant, 4.0 * kernel_mixed_norm(1));
}

TEST(Oneil, RandomFieldsOneDimension) {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const BoxField x = random_bumps(rng, 1).sample(16.0, 1u << 14);
    const OneilResult r = oneil_check(x, 1);
    EXPECT_TRUE(r.pass()) << trial << ' ' << to_string(r.status) << ' ' << r.worst_deficit;
    EXPECT_LE(r.intermediate_deficit, 0.0);
  }
}

TEST(Oneil, RandomFieldsTwoDimensions) {
  Rng rng(202);
  for (int trial = 0; trial < 10; ++trial) {
    const BoxField x = random_bumps(rng, 2).sample(16.0, 512);
    const OneilResult r = oneil_check(x, 2);
    EXPECT_TRUE(r.pass()) << trial << ' ' << to_string(r.status) << ' ' << r.worst_deficit;
  }
}

TEST(DistributionalSobolev, SmoothedIndicator) {
  const auto smoothed = [](std::span<const double> t) {
    return 0.5 * (std::erf((t[0] + 0.5) / 0.05) - std::erf((t[0] - 0.5) / 0.05));
  };
  const SobolevResult fine = distributional_sobolev_check(BoxField::sample(1, 16.0, 1u << 14, smoothed), 1);
  const SobolevResult coarse = distributional_sobolev_check(BoxField::sample(1, 16.0, 1u << 13, smoothed), 1);
  EXPECT_TRUE(fine.pass());
  EXPECT_GT(fine.margin, 0.0);
  EXPECT_DOUBLE_EQ(fine.c_used, 4.0 * kernel_mixed_norm(1));
  EXPECT_LT(std::abs(fine.margin - coarse.margin), 0.05 * fine.margin);
  EXPECT_TRUE(distributional_sobolev_check(BoxField(1, 16.0, 256), 1).pass());
}

TEST(FromBelow, ConstantChain) {
  for (int d : {1, 2}) {
    const double expected = std::pow(2.0, -0.5 * d) * kernel_lower_constant(d) * unit_sphere_area(d) / d;
    EXPECT_DOUBLE_EQ(from_below_constant(d), expected);
    EXPECT_GT(expected, 0.0);
  }
}

TEST(FromBelow, Profiles) {
  EXPECT_TRUE(estimate_from_below_check(StepFunction::zero(1.0), 1, 1024).pass());
  const FromBelowResult half = estimate_from_below_check(StepFunction::indicator(0.0, 0.5), 1, 1u << 14);
  EXPECT_TRUE(half.pass()) << half.margin;
  EXPECT_GE(half.margin, -from_below_allowance);

  // t^{-1/4} on (0, 1): cell averages on a geometric grid down to 1e-12.
  std::vector<double> bp{0.0};
  std::vector<double> v;
  for (double b : oracle::log_grid(1e-12, 1.0, 200)) {
    const double a = bp.back();
    v.push_back((std::pow(b, 0.75) - std::pow(a, 0.75)) / (0.75 * (b - a)));
    bp.push_back(b);
  }
  const FromBelowResult power = estimate_from_below_check(StepFunction(bp, v), 2, 512);
  EXPECT_TRUE(power.pass()) << power.margin << ' ' << power.margin_coarse;

  EXPECT_THROW(estimate_from_below_check(StepFunction::indicator(0.5, 1.0), 1, 1024), PreconditionError);
}
