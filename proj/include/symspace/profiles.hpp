#pragma once

// Decreasing test profiles on (0, 1) with exact primitives, and their step
// approximations by cell averages.

#include <cmath>
#include <vector>

#include "symspace/error.hpp"
#include "symspace/spaces.hpp"
#include "symspace/stepfn.hpp"
#include "symspace/weights.hpp"

namespace symspace {

/// min(k, 1/phi(s)), equal to 1 past s = 1.  Primitive uses \int 1/phi = -log log(e/s).
class InvPhiProfile {
 public:
  explicit InvPhiProfile(double k) : k_(k) {
    if (!(k >= 1.0)) throw DomainError("invphi: k must be >= 1");
    s_k_ = ConcaveWeight::phi().inverse(1.0 / k);
  }

  double k() const noexcept { return k_; }
  /// Below this point the profile is the constant k.
  double plateau() const noexcept { return s_k_; }

  double operator()(double s) const {
    if (s >= 1.0) return 1.0;
    if (s <= s_k_) return k_;
    return 1.0 / ConcaveWeight::phi()(s);
  }

  double primitive(double s) const {
    if (s <= 0.0) return 0.0;
    if (s <= s_k_) return k_ * s;
    const double head = k_ * s_k_;
    if (s < 1.0) return head + std::log(std::log(std::exp(1.0) / s_k_) / std::log(std::exp(1.0) / s));
    return head + std::log(std::log(std::exp(1.0) / s_k_)) + (s - 1.0);
  }

  /// Plateau as one piece, then m - 1 geometric cells of exact averages up to 1.
  StepFunction steps(int m) const {
    if (m < 2) throw DomainError("invphi: need at least 2 pieces");
    std::vector<double> bp{0.0};
    std::vector<double> v;
    if (s_k_ >= 1.0) return StepFunction::constant(k_, 1.0);
    bp.push_back(s_k_);
    v.push_back(k_);
    for (double b : detail::log_grid(s_k_, 1.0, m)) {
      if (b <= bp.back()) continue;
      v.push_back((primitive(b) - primitive(bp.back())) / (b - bp.back()));
      bp.push_back(b);
    }
    return StepFunction(std::move(bp), std::move(v));
  }

 private:
  double k_;
  double s_k_;
};

/// s^p on (0, 1), p in (-1/2, 0] (square integrable).
class PowerProfile {
 public:
  explicit PowerProfile(double p) : p_(p) {
    if (!(p > -0.5 && p <= 0.0)) {
      throw DomainError("power profile: exponent must lie in (-1/2, 0] for t^p to be in L_2(0,1)");
    }
  }

  double exponent() const noexcept { return p_; }
  double operator()(double s) const { return s > 0.0 ? std::pow(s, p_) : 0.0; }
  double primitive(double s) const { return s > 0.0 ? std::pow(std::min(s, 1.0), p_ + 1.0) / (p_ + 1.0) : 0.0; }

  /// m cells of exact averages: (0, 1e-12) and m - 1 geometric cells up to 1.
  StepFunction steps(int m) const {
    if (m < 2) throw DomainError("power profile: need at least 2 pieces");
    std::vector<double> bp{0.0};
    std::vector<double> v;
    for (double b : detail::log_grid(1e-12, 1.0, m)) {
      v.push_back((primitive(b) - primitive(bp.back())) / (b - bp.back()));
      bp.push_back(b);
    }
    return StepFunction(std::move(bp), std::move(v));
  }

 private:
  double p_;
};

}  // namespace symspace
