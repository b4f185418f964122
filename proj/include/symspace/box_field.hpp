#pragma once

// Real samples on the periodic box [-L, L]^d, d in {1, 2}, cell-centred.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "symspace/error.hpp"
#include "symspace/fft.hpp"
#include "symspace/stepfn.hpp"

namespace symspace {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

class BoxField {
 public:
  BoxField(int d, double half_width, std::size_t n) : d_(d), L_(half_width), n_(n) {
    if (d != 1 && d != 2) throw DomainError("BoxField: d must be 1 or 2");
    if (!(half_width > 0.0)) throw DomainError("BoxField: half width must be positive");
    if (!is_power_of_two(n) || n < 2) throw DomainError("BoxField: n must be a power of two >= 2");
    samples_.assign(d == 1 ? n : n * n, 0.0);
  }

  /// Samples f at the cell centres.
  static BoxField sample(int d, double half_width, std::size_t n,
                         const std::function<double(std::span<const double>)>& f) {
    BoxField out(d, half_width, n);
    double t[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.coordinates(i, t);
      out.samples_[i] = f(std::span<const double>(t, static_cast<std::size_t>(d)));
    }
    return out;
  }

  int d() const noexcept { return d_; }
  double half_width() const noexcept { return L_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double spacing() const noexcept { return 2.0 * L_ / static_cast<double>(n_); }
  double cell_measure() const noexcept { return std::pow(spacing(), d_); }
  double box_measure() const noexcept { return std::pow(2.0 * L_, d_); }

  /// Centre of cell j along one axis.
  double coordinate(std::size_t j) const noexcept {
    return -L_ + (static_cast<double>(j) + 0.5) * spacing();
  }

  /// Centre of flat (row-major) cell i.
  void coordinates(std::size_t i, double* t) const noexcept {
    if (d_ == 1) {
      t[0] = coordinate(i);
    } else {
      t[0] = coordinate(i / n_);
      t[1] = coordinate(i % n_);
    }
  }

  double radius(std::size_t i) const noexcept {
    double t[2] = {0.0, 0.0};
    coordinates(i, t);
    return std::sqrt(t[0] * t[0] + t[1] * t[1]);
  }

  std::span<double> samples() noexcept { return samples_; }
  std::span<const double> samples() const noexcept { return samples_; }
  double& operator[](std::size_t i) { return samples_[i]; }
  double operator[](std::size_t i) const { return samples_[i]; }

  double l2_norm() const {
    double s = 0.0;
    for (double v : samples_) s += v * v;
    return std::sqrt(s * cell_measure());
  }

  double inner(const BoxField& other) const {
    require_same_grid(other);
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += samples_[i] * other.samples_[i];
    return s * cell_measure();
  }

  /// Averages 2^d blocks into a field with n/2 samples per axis.
  BoxField coarsened() const {
    if (n_ < 4) throw DomainError("BoxField: cannot coarsen below n = 2");
    BoxField out(d_, L_, n_ / 2);
    if (d_ == 1) {
      for (std::size_t j = 0; j < out.n_; ++j) out.samples_[j] = 0.5 * (samples_[2 * j] + samples_[2 * j + 1]);
    } else {
      for (std::size_t a = 0; a < out.n_; ++a) {
        for (std::size_t b = 0; b < out.n_; ++b) {
          const std::size_t r0 = 2 * a * n_;
          const std::size_t r1 = (2 * a + 1) * n_;
          out.samples_[a * out.n_ + b] = 0.25 * (samples_[r0 + 2 * b] + samples_[r0 + 2 * b + 1] +
                                                 samples_[r1 + 2 * b] + samples_[r1 + 2 * b + 1]);
        }
      }
    }
    return out;
  }

  void require_same_grid(const BoxField& other) const {
    if (d_ != other.d_ || n_ != other.n_ || L_ != other.L_) throw DomainError("BoxField: grids differ");
  }

 private:
  int d_;
  double L_;
  std::size_t n_;
  std::vector<double> samples_;
};

/// mu of the sampled field: cell values sorted by magnitude, each of width h^d, on (0, (2L)^d).
inline StepFunction empirical_rearrangement(const BoxField& x) {
  std::vector<double> v(x.samples().begin(), x.samples().end());
  for (double& a : v) a = std::abs(a);
  std::sort(v.begin(), v.end(), std::greater<>());
  const double w = x.cell_measure();
  std::vector<double> bp{0.0};
  std::vector<double> vals;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double right = static_cast<double>(i + 1) * w;
    if (!vals.empty() && vals.back() == v[i]) {
      bp.back() = right;
    } else {
      bp.push_back(right);
      vals.push_back(v[i]);
    }
  }
  bp.back() = x.box_measure();
  return StepFunction(std::move(bp), std::move(vals));
}

/// x(|t|^d) on the box, averaged over sub^d midpoints per cell (sub = 1: centre samples).
/// x must cover the half-diagonal: length >= (sqrt(d) L)^d.
inline BoxField radial_lift(const StepFunction& x, int d, double half_width, std::size_t n, int sub = 1) {
  const RadialMap r(d);
  const double reach = std::pow(std::sqrt(static_cast<double>(d)) * half_width, d);
  if (x.length() < reach * (1.0 - 1e-12)) {
    throw DomainError("radial_lift: profile does not cover the box half-diagonal");
  }
  if (sub < 1) throw DomainError("radial_lift: sub must be positive");
  const double h = 2.0 * half_width / static_cast<double>(n);
  const double inv = 1.0 / std::pow(static_cast<double>(sub), d);
  return BoxField::sample(d, half_width, n, [&](std::span<const double> t) {
    double acc = 0.0;
    double p[2] = {0.0, 0.0};
    const int inner = d == 2 ? sub : 1;
    for (int a = 0; a < sub; ++a) {
      p[0] = t[0] + h * ((a + 0.5) / sub - 0.5);
      for (int b = 0; b < inner; ++b) {
        if (d == 2) p[1] = t[1] + h * ((b + 0.5) / sub - 0.5);
        acc += x(r(std::span<const double>(p, static_cast<std::size_t>(d))));
      }
    }
    return acc * inv;
  });
}

/// Zero-extends a profile on (0, a) to the domain needed by radial_lift.
inline StepFunction extend_for_box(const StepFunction& x, int d, double half_width) {
  const double reach = std::pow(std::sqrt(static_cast<double>(d)) * half_width, d);
  return x.length() >= reach ? x : x.extended(reach);
}

// ---------------------------------------------------------------------------
// Snapshots: flat little-endian f64 samples plus a JSON sidecar at path + ".json".

inline void save_snapshot(const std::string& path, const BoxField& x) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("save_snapshot: cannot open " + path);
  bin.write(reinterpret_cast<const char*>(x.samples().data()),
            static_cast<std::streamsize>(x.size() * sizeof(double)));
  nlohmann::json meta{{"d", x.d()}, {"L", x.half_width()}, {"n", x.n()},
                      {"dtype", "f64"}, {"order", "row-major"}};
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("save_snapshot: cannot open sidecar for " + path);
  side << meta.dump(2) << '\n';
}

inline BoxField load_snapshot(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("load_snapshot: missing sidecar for " + path);
  const auto meta = nlohmann::json::parse(side);
  if (meta.at("dtype") != "f64" || meta.at("order") != "row-major") {
    throw InvariantError("load_snapshot: unsupported layout");
  }
  BoxField x(meta.at("d").get<int>(), meta.at("L").get<double>(), meta.at("n").get<std::size_t>());
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("load_snapshot: cannot open " + path);
  bin.read(reinterpret_cast<char*>(x.samples().data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(x.size() * sizeof(double))) {
    throw InvariantError("load_snapshot: sample count does not match sidecar");
  }
  return x;
}

/// (1 - Delta)^{-alpha} on the periodic box: DFT multiplier (1 + |xi|^2)^{-alpha}, xi = pi k / L.
inline BoxField bessel_potential_apply(const BoxField& x, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("bessel_potential_apply: alpha must be positive");
  const int n = static_cast<int>(x.n());
  std::vector<int> dims(static_cast<std::size_t>(x.d()), n);
  FftPlan plan(dims);
  auto buf = plan.data();
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  const double unit = std::numbers::pi / x.half_width();
  apply_multiplier(plan, [&](int k0, int k1) {
    const double xi2 = unit * unit * (static_cast<double>(k0) * k0 + static_cast<double>(k1) * k1);
    return std::pow(1.0 + xi2, -alpha);
  });
  BoxField out(x.d(), x.half_width(), x.n());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace symspace
