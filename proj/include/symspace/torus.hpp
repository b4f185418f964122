#pragma once

// Symmetrized Cwikel operators G_alpha M_f G_alpha on the discrete torus, with
// G_alpha the multiplier (1 + |k|^2)^{-alpha} over the DFT lattice.  The torus is
// (-1/2, 1/2)^d with Haar measure 1, sampled at cell centres.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "symspace/euclid_kernel.hpp"
#include "symspace/error.hpp"
#include "symspace/fft.hpp"
#include "symspace/parallel.hpp"
#include "symspace/profiles.hpp"
#include "symspace/spaces.hpp"
#include "symspace/stepfn.hpp"
#include "symspace/weights.hpp"

namespace symspace {

class TorusField {
 public:
  TorusField(int d, std::size_t n) : d_(d), n_(n) {
    if (d != 1 && d != 2) throw DomainError("TorusField: d must be 1 or 2");
    if (!is_power_of_two(n) || n < 2) throw DomainError("TorusField: n must be a power of two >= 2");
    samples_.assign(d == 1 ? n : n * n, 0.0);
  }

  static TorusField sample(int d, std::size_t n, const std::function<double(std::span<const double>)>& f) {
    TorusField out(d, n);
    double t[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.coordinates(i, t);
      out.samples_[i] = f(std::span<const double>(t, static_cast<std::size_t>(d)));
    }
    return out;
  }

  /// theta -> x(omega_d |theta|^d): the radial function whose rearrangement is x.
  /// d = 1 uses exact cell averages from the primitive; d = 2 averages 4 x 4 midpoints.
  static TorusField radial(int d, std::size_t n, const std::function<double(double)>& x,
                           const std::function<double(double)>& primitive) {
    if (d == 1) {
      TorusField out(1, n);
      const double h = 1.0 / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double a = -0.5 + static_cast<double>(j) * h;
        const double b = a + h;
        const double lo = std::min(std::abs(a), std::abs(b));
        const double hi = std::max(std::abs(a), std::abs(b));
        out.samples_[j] = (primitive(2.0 * hi) - primitive(2.0 * lo)) / (2.0 * h);
      }
      return out;
    }
    const double omega = unit_ball_volume(d);
    const double h = 1.0 / static_cast<double>(n);
    constexpr int sub = 4;
    return sample(d, n, [&](std::span<const double> t) {
      double acc = 0.0;
      for (int a = 0; a < sub; ++a) {
        for (int b = 0; b < sub; ++b) {
          const double p0 = t[0] + h * ((a + 0.5) / sub - 0.5);
          const double p1 = t[1] + h * ((b + 0.5) / sub - 0.5);
          acc += x(omega * (p0 * p0 + p1 * p1));
        }
      }
      return acc / (sub * sub);
    });
  }

  int d() const noexcept { return d_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double cell_measure() const noexcept { return 1.0 / static_cast<double>(size()); }

  double coordinate(std::size_t j) const noexcept {
    return -0.5 + (static_cast<double>(j) + 0.5) / static_cast<double>(n_);
  }

  void coordinates(std::size_t i, double* t) const noexcept {
    if (d_ == 1) {
      t[0] = coordinate(i);
    } else {
      t[0] = coordinate(i / n_);
      t[1] = coordinate(i % n_);
    }
  }

  std::span<double> samples() noexcept { return samples_; }
  std::span<const double> samples() const noexcept { return samples_; }
  double& operator[](std::size_t i) { return samples_[i]; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// \int over the torus (Haar measure 1).
  double integral() const {
    double s = 0.0;
    for (double v : samples_) s += v;
    return s * cell_measure();
  }

  double l1_norm() const {
    double s = 0.0;
    for (double v : samples_) s += std::abs(v);
    return s * cell_measure();
  }

  bool is_nonnegative() const {
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v >= 0.0; });
  }

  /// mu(f) on (0, 1): sorted magnitudes, width 1/n^d each.
  StepFunction rearrangement() const {
    std::vector<double> v(samples_.begin(), samples_.end());
    for (double& a : v) a = std::abs(a);
    std::sort(v.begin(), v.end(), std::greater<>());
    std::vector<double> bp{0.0};
    std::vector<double> vals;
    const double w = cell_measure();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double right = static_cast<double>(i + 1) * w;
      if (!vals.empty() && vals.back() == v[i]) {
        bp.back() = right;
      } else {
        bp.push_back(right);
        vals.push_back(v[i]);
      }
    }
    bp.back() = 1.0;
    return StepFunction(std::move(bp), std::move(vals));
  }

 private:
  int d_;
  std::size_t n_;
  std::vector<double> samples_;
};

/// ||f||_{M_psi(T^d)} from the empirical rearrangement.
inline double torus_mpsi_norm(const TorusField& f) {
  return marcinkiewicz_norm(f.rearrangement(), ConcaveWeight::psi());
}

/// a(k) = (1 + |k|^2)^{-alpha} on the DFT lattice, row-major in DFT index order.
class FourierMultiplier {
 public:
  FourierMultiplier(int d, std::size_t n, double alpha) : d_(d), n_(n), alpha_(alpha) {
    if (!(alpha > 0.0)) throw DomainError("FourierMultiplier: alpha must be positive");
    if (d != 1 && d != 2) throw DomainError("FourierMultiplier: d must be 1 or 2");
    const int ni = static_cast<int>(n);
    if (d == 1) {
      values_.resize(n);
      for (int j = 0; j < ni; ++j) values_[static_cast<std::size_t>(j)] = at(fft_frequency(j, ni), 0);
    } else {
      values_.resize(n * n);
      for (int a = 0; a < ni; ++a) {
        for (int b = 0; b < ni; ++b) {
          values_[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] =
              at(fft_frequency(a, ni), fft_frequency(b, ni));
        }
      }
    }
  }

  double alpha() const noexcept { return alpha_; }
  int d() const noexcept { return d_; }
  std::size_t n() const noexcept { return n_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(int k0, int k1) const {
    const double k2 = static_cast<double>(k0) * k0 + static_cast<double>(k1) * k1;
    return std::pow(1.0 + k2, -alpha_);
  }

 private:
  int d_;
  std::size_t n_;
  double alpha_;
  std::vector<double> values_;
};

/// G_alpha M_f G_alpha with one FFT plan; apply() is not reentrant per instance.
class CwikelOperator {
 public:
  CwikelOperator(const TorusField& f, double alpha)
      : f_(f), multiplier_(f.d(), f.n(), alpha), plan_(std::vector<int>(static_cast<std::size_t>(f.d()),
                                                                         static_cast<int>(f.n()))) {}

  std::size_t size() const noexcept { return f_.size(); }
  const TorusField& symbol() const noexcept { return f_; }

  void apply(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    auto buf = plan_.data();
    std::copy(in.begin(), in.end(), buf.begin());
    multiply();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= f_[i];
    multiply();
    std::copy(buf.begin(), buf.end(), out.begin());
  }

  /// Real input, real output (f real and a even make the operator real).
  void apply(std::span<const double> in, std::span<double> out) {
    auto buf = plan_.data();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = in[i];
    multiply();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = buf[i].real() * f_[i];
    multiply();
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  }

 private:
  void multiply() {
    plan_.forward();
    auto buf = plan_.data();
    const auto a = multiplier_.values();
    const double scale = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= a[i] * scale;
    plan_.backward();
  }

  TorusField f_;
  FourierMultiplier multiplier_;
  FftPlan plan_;
};

inline std::vector<std::complex<double>> cwikel_apply(const TorusField& f, double alpha,
                                                      std::span<const std::complex<double>> x) {
  if (x.size() != f.size()) throw DomainError("cwikel_apply: vector size does not match the field");
  CwikelOperator op(f, alpha);
  std::vector<std::complex<double>> out(x.size());
  op.apply(x, out);
  return out;
}

struct CwikelNorm {
  double norm;
  long iterations;
  double residual;  ///< ||B v - theta v|| / theta at exit, B = A or A^2
};

inline constexpr double power_iteration_tolerance = 1e-9;
inline constexpr long power_iteration_limit = 100000;

/// ||A_f|| by power iteration on A (f >= 0) or A^2 (signed f).  Stops when the Rayleigh
/// quotient moves by <= tol relative and the relative residual r satisfies r^2 <= tol / 100;
/// the Rayleigh quotient error is then about r^2 / gap.
inline CwikelNorm cwikel_norm(const TorusField& f, double alpha, double tol = power_iteration_tolerance,
                              long max_iterations = power_iteration_limit) {
  if (!(alpha > 0.0)) throw DomainError("cwikel_norm: alpha must be positive");
  CwikelOperator op(f, alpha);
  const bool positive = f.is_nonnegative();
  const std::size_t n = f.size();
  std::vector<double> v(n, 1.0);
  std::vector<double> w(n);
  std::vector<double> tmp(n);
  Rng rng(0x5eedULL);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  for (double& x : v) x += 1e-3 * jitter(rng);
  const auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    s = std::sqrt(s);
    for (double& c : x) c /= s;
    return s;
  };
  normalize(v);
  double theta_prev = -1.0;
  double theta = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  for (long it = 1; it <= max_iterations; ++it) {
    if (positive) {
      op.apply(v, w);
    } else {
      op.apply(v, tmp);
      op.apply(tmp, w);
    }
    theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) theta += v[i] * w[i];
    double r2 = 0.0;
    double w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r2 += (w[i] - theta * v[i]) * (w[i] - theta * v[i]);
      w2 += w[i] * w[i];
    }
    if (w2 == 0.0) return {0.0, it, 0.0};
    residual = std::sqrt(r2) / theta;
    if (std::abs(theta - theta_prev) <= tol * theta && residual * residual <= 1e-2 * tol) {
      return {positive ? theta : std::sqrt(theta), it, residual};
    }
    theta_prev = theta;
    v.swap(w);
    normalize(v);
  }
  throw ConvergenceError("cwikel_norm: power iteration did not converge", positive ? theta : std::sqrt(theta),
                         residual);
}

// ---------------------------------------------------------------------------
// Dense oracle: the circulant G_alpha built from its cosine series, independent of the FFT.

inline Eigen::MatrixXd dense_multiplier_matrix(int d, std::size_t n, double alpha) {
  const FourierMultiplier a(d, n, alpha);
  const int ni = static_cast<int>(n);
  const double two_pi = 2.0 * std::numbers::pi;
  if (d == 1) {
    std::vector<double> c(n, 0.0);
    for (int m = 0; m < ni; ++m) {
      double s = 0.0;
      for (int j = 0; j < ni; ++j) s += a.at(fft_frequency(j, ni), 0) * std::cos(two_pi * fft_frequency(j, ni) * m / ni);
      c[static_cast<std::size_t>(m)] = s / ni;
    }
    Eigen::MatrixXd g(ni, ni);
    for (int i = 0; i < ni; ++i) {
      for (int j = 0; j < ni; ++j) g(i, j) = c[static_cast<std::size_t>(((i - j) % ni + ni) % ni)];
    }
    return g;
  }
  std::vector<double> c(n * n, 0.0);
  for (int m0 = 0; m0 < ni; ++m0) {
    for (int m1 = 0; m1 < ni; ++m1) {
      double s = 0.0;
      for (int j0 = 0; j0 < ni; ++j0) {
        const int k0 = fft_frequency(j0, ni);
        for (int j1 = 0; j1 < ni; ++j1) {
          const int k1 = fft_frequency(j1, ni);
          s += a.at(k0, k1) * std::cos(two_pi * (static_cast<double>(k0) * m0 + static_cast<double>(k1) * m1) / ni);
        }
      }
      c[static_cast<std::size_t>(m0) * n + static_cast<std::size_t>(m1)] = s / (ni * ni);
    }
  }
  const int size = ni * ni;
  Eigen::MatrixXd g(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const int m0 = ((i / ni - j / ni) % ni + ni) % ni;
      const int m1 = ((i % ni - j % ni) % ni + ni) % ni;
      g(i, j) = c[static_cast<std::size_t>(m0) * n + static_cast<std::size_t>(m1)];
    }
  }
  return g;
}

/// Largest problem sizes for dense eigendecomposition.
inline bool within_dense_budget(int d, std::size_t n) { return (d == 1 && n <= 256) || (d == 2 && n <= 32); }

inline Eigen::MatrixXd dense_cwikel_matrix(const TorusField& f, double alpha) {
  if (!within_dense_budget(f.d(), f.n())) {
    throw ResourceError("dense Cwikel matrix: size over budget (d=1: n<=256, d=2: n<=32)");
  }
  const Eigen::MatrixXd g = dense_multiplier_matrix(f.d(), f.n(), alpha);
  const Eigen::Map<const Eigen::VectorXd> fv(f.samples().data(), static_cast<Eigen::Index>(f.size()));
  return g * fv.asDiagonal() * g;
}

/// Nonincreasing nonnegative sequence mu(0), mu(1), ...
struct SingularValueSequence {
  std::vector<double> mu;

  explicit SingularValueSequence(std::vector<double> values = {}) : mu(std::move(values)) {
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (mu[k] < 0.0 || (k > 0 && mu[k] > mu[k - 1])) {
        throw PreconditionError("SingularValueSequence: values must be nonnegative and nonincreasing");
      }
    }
  }
};

/// Eigenvalue magnitudes of the dense self-adjoint operator, sorted, first k_max kept.
inline SingularValueSequence singular_values(const TorusField& f, double alpha, std::size_t k_max) {
  const Eigen::MatrixXd a = dense_cwikel_matrix(f, alpha);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  std::vector<double> mu(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) mu[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i));
  std::sort(mu.begin(), mu.end(), std::greater<>());
  if (mu.size() > k_max) mu.resize(k_max);
  return SingularValueSequence(std::move(mu));
}

/// ||s||_{p,inf} = sup (k+1)^{1/p} mu(k) when q is infinite, else
/// (sum ((k+1)^{1/p - 1/q} mu(k))^q)^{1/q}.
inline double ideal_quasinorm(const SingularValueSequence& s, double p,
                              double q = std::numeric_limits<double>::infinity()) {
  if (!(p > 0.0) || std::isinf(p)) throw DomainError("ideal_quasinorm: p must lie in (0, inf)");
  if (!(q >= 1.0)) throw DomainError("ideal_quasinorm: q must lie in [1, inf]");
  double out = 0.0;
  for (std::size_t k = 0; k < s.mu.size(); ++k) {
    const double kk = static_cast<double>(k + 1);
    if (std::isinf(q)) {
      out = std::max(out, std::pow(kk, 1.0 / p) * s.mu[k]);
    } else {
      out += std::pow(std::pow(kk, 1.0 / p - 1.0 / q) * s.mu[k], q);
    }
  }
  return std::isinf(q) ? out : std::pow(out, 1.0 / q);
}

inline void write_spectrum_csv(std::ostream& out, const SingularValueSequence& s) {
  out << "k,mu_k\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.mu.size(); ++k) out << k << ',' << s.mu[k] << '\n';
}

// ---------------------------------------------------------------------------
// Post-critical L_1 bound.

/// sum over |k_i| <= half of (1 + |k|^2)^{-exponent}.
inline double lattice_sum(int d, long half, double exponent) {
  if (d != 1 && d != 2) throw DomainError("lattice_sum: d must be 1 or 2");
  double s = 0.0;
  if (d == 1) {
    for (long k = half; k >= 1; --k) s += 2.0 * std::pow(1.0 + static_cast<double>(k) * k, -exponent);
    return s + 1.0;
  }
  for (long a = -half; a <= half; ++a) {
    for (long b = -half; b <= half; ++b) {
      s += std::pow(1.0 + static_cast<double>(a) * a + static_cast<double>(b) * b, -exponent);
    }
  }
  return s;
}

/// c_d for the truncated operator: the lattice sum over |k_i| <= n/2 with exponent (d+1)/2.
inline double postcritical_constant(int d, std::size_t n) {
  return lattice_sum(d, static_cast<long>(n / 2), 0.5 * (d + 1));
}

struct PostcriticalResult {
  double norm;
  double bound;
  long iterations;
  bool pass;
};

inline PostcriticalResult postcritical_check(const TorusField& h) {
  if (!h.is_nonnegative()) throw PreconditionError("postcritical_check: h must be nonnegative");
  const int d = h.d();
  const CwikelNorm a = cwikel_norm(h, 0.25 * (d + 1));
  const double bound = postcritical_constant(d, h.n()) * h.l1_norm();
  return {a.norm, bound, a.iterations, a.norm <= bound * (1.0 + 1e-9)};
}

// ---------------------------------------------------------------------------
// Ratio suites ||A_f|| / ||f||_{M_psi} over a family rebuilt at n and 2n.

struct TorusCase {
  std::string name;
  std::function<TorusField(int d, std::size_t n)> make;
};

/// f_k = min(k, 1/phi) o r_d for k = 2, 4, ..., 1024.
inline std::vector<TorusCase> invphi_family() {
  std::vector<TorusCase> out;
  for (int e = 1; e <= 10; ++e) {
    const double k = std::ldexp(1.0, e);
    char name[32];
    std::snprintf(name, sizeof name, "invphi_k%04d", static_cast<int>(k));
    out.push_back({name, [k](int d, std::size_t n) {
                     const InvPhiProfile p(k);
                     return TorusField::radial(
                         d, n, [p](double s) { return p(s); }, [p](double s) { return p.primitive(s); });
                   }});
  }
  return out;
}

struct RatioRow {
  std::string name;
  int d;
  std::size_t n;
  double norm;
  double f_norm;
  double ratio;
  double mean;  ///< \int f, the value of <A_f 1, 1>
  long iterations;
};

struct RatioSuiteResult {
  std::vector<RatioRow> rows;          ///< at n
  std::vector<RatioRow> rows_refined;  ///< at 2n
  std::vector<bool> inconclusive;      ///< ||f||_{M_psi} moved > 2% under refinement
  double max_ratio = 0.0;
  double max_ratio_refined = 0.0;
  double min_ratio = 0.0;
  double min_ratio_refined = 0.0;
  double drift_max = 0.0;
  double drift_min = 0.0;
  bool trivial_bound_holds = true;  ///< ||A_f|| >= \int f on every row
  bool upper_pass = false;
  bool lower_pass = false;
};

inline constexpr double ratio_drift_tolerance = 0.10;
inline constexpr double mpsi_stability_tolerance = 0.02;
/// Solver allowance in ||A_f|| >= \int f.
inline constexpr double trivial_bound_allowance = 2e-9;

inline RatioRow ratio_row(const TorusCase& c, int d, std::size_t n, double alpha) {
  const TorusField f = c.make(d, n);
  if (!f.is_nonnegative()) throw PreconditionError("ratio suite: f must be nonnegative");
  const CwikelNorm a = cwikel_norm(f, alpha);
  const double fn = torus_mpsi_norm(f);
  return {c.name, d, n, a.norm, fn, fn > 0.0 ? a.norm / fn : 0.0, f.integral(), a.iterations};
}

inline RatioSuiteResult ratio_suite(const std::vector<TorusCase>& family, int d, std::size_t n) {
  const double alpha = 0.25 * d;
  RatioSuiteResult r;
  const std::size_t m = family.size();
  r.rows.resize(m);
  r.rows_refined.resize(m);
  parallel_for(2 * m, [&](std::size_t i) {
    if (i < m) {
      r.rows[i] = ratio_row(family[i], d, n, alpha);
    } else {
      r.rows_refined[i - m] = ratio_row(family[i - m], d, 2 * n, alpha);
    }
  });
  r.inconclusive.assign(m, false);
  r.min_ratio = r.min_ratio_refined = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const RatioRow& a = r.rows[i];
    const RatioRow& b = r.rows_refined[i];
    r.inconclusive[i] = std::abs(b.f_norm - a.f_norm) > mpsi_stability_tolerance * a.f_norm;
    r.max_ratio = std::max(r.max_ratio, a.ratio);
    r.max_ratio_refined = std::max(r.max_ratio_refined, b.ratio);
    r.min_ratio = std::min(r.min_ratio, a.ratio);
    r.min_ratio_refined = std::min(r.min_ratio_refined, b.ratio);
    for (const RatioRow* row : {&a, &b}) {
      if (row->norm < row->mean * (1.0 - trivial_bound_allowance)) r.trivial_bound_holds = false;
    }
  }
  if (m == 0) r.min_ratio = r.min_ratio_refined = 0.0;
  r.drift_max = r.max_ratio > 0.0 ? std::abs(r.max_ratio_refined - r.max_ratio) / r.max_ratio : 0.0;
  r.drift_min = r.min_ratio > 0.0 ? std::abs(r.min_ratio_refined - r.min_ratio) / r.min_ratio : 0.0;
  r.upper_pass = std::isfinite(r.max_ratio) && r.drift_max < ratio_drift_tolerance;
  r.lower_pass = r.min_ratio > 0.0 && r.drift_min < ratio_drift_tolerance && r.trivial_bound_holds;
  return r;
}

/// Upper contract: max ratio finite and stable under n doubling.
inline RatioSuiteResult upper_ratio_suite(const std::vector<TorusCase>& family, int d, std::size_t n) {
  return ratio_suite(family, d, n);
}

/// Lower contract: min ratio positive and stable, and ||A_f|| >= \int f on every row.
inline RatioSuiteResult lower_ratio_suite(const std::vector<TorusCase>& family, int d, std::size_t n) {
  return ratio_suite(family, d, n);
}

/// CSV "case,norm,f_norm,ratio,n,d,converged_iters".
inline void write_ratio_csv(std::ostream& out, std::span<const RatioRow> rows) {
  out << "case,norm,f_norm,ratio,n,d,converged_iters\n" << std::setprecision(17);
  for (const RatioRow& r : rows) {
    out << r.name << ',' << r.norm << ',' << r.f_norm << ',' << r.ratio << ',' << r.n << ',' << r.d << ','
        << r.iterations << '\n';
  }
}

}  // namespace symspace
