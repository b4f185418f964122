#pragma once

// Exact calculus of one-dimensional step functions on (0, L).
//
// A StepFunction is a finite list of right-open pieces [b_i, b_{i+1}) with a
// constant value on each.  Everything here (integrals, L_p norms,
// rearrangement, submajorization) is evaluated in closed form on the pieces,
// so results do not depend on how a piece is subdivided.  Outside (0, L) a
// StepFunction is taken to be zero ("zero tail" convention).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "symspace/error.hpp"

namespace symspace {

struct Piece {
  double lo;
  double hi;
  double value;

  double width() const noexcept { return hi - lo; }
};

class StepFunction {
 public:
  /// Zero function on (0, 1).
  StepFunction() : breakpoints_{0.0, 1.0}, values_{0.0} {}

  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    validate();
  }

  static StepFunction zero(double length) { return constant(0.0, length); }

  static StepFunction constant(double c, double length) {
    return StepFunction({0.0, length}, {c});
  }

  /// c * indicator of (a, b) on the domain (0, length).
  static StepFunction indicator(double a, double b, double length = 1.0, double c = 1.0) {
    if (!(0.0 <= a && a <= b && b <= length)) {
      throw DomainError("indicator: need 0 <= a <= b <= length");
    }
    std::vector<double> bp{0.0};
    std::vector<double> v;
    if (a > 0.0) {
      bp.push_back(a);
      v.push_back(0.0);
    }
    if (b > a) {
      bp.push_back(b);
      v.push_back(c);
    }
    if (length > b) {
      bp.push_back(length);
      v.push_back(0.0);
    }
    return StepFunction(std::move(bp), std::move(v));
  }

  double length() const noexcept { return breakpoints_.back(); }
  std::size_t piece_count() const noexcept { return values_.size(); }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }

  Piece piece(std::size_t i) const { return {breakpoints_[i], breakpoints_[i + 1], values_[i]}; }

  /// Index of the piece containing t (right-open pieces; t == L maps to the last piece).
  std::size_t locate(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    auto idx = static_cast<std::ptrdiff_t>(it - breakpoints_.begin()) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(values_.size()) - 1);
    return static_cast<std::size_t>(idx);
  }

  double operator()(double t) const {
    if (t < 0.0 || t > length()) return 0.0;
    return values_[locate(t)];
  }

  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * piece(i).width();
    return s;
  }

  /// \int_0^t f, with f = 0 past L.
  double integral_to(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const Piece p = piece(i);
      if (p.lo >= t) break;
      s += p.value * (std::min(p.hi, t) - p.lo);
    }
    return s;
  }

  double lp_norm(double p) const {
    if (p == std::numeric_limits<double>::infinity()) return sup_norm();
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      s += std::pow(std::abs(values_[i]), p) * piece(i).width();
    }
    return std::pow(s, 1.0 / p);
  }

  double l1_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += std::abs(values_[i]) * piece(i).width();
    return s;
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  /// True when the function is nonnegative and nonincreasing, i.e. equal to its rearrangement.
  bool is_decreasing() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < 0.0) return false;
      if (i > 0 && values_[i] > values_[i - 1]) return false;
    }
    return true;
  }

  bool is_nondecreasing() const {
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (values_[i] < values_[i - 1]) return false;
    }
    return true;
  }

  template <class F>
  StepFunction map(F&& fn) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), fn);
    return StepFunction(breakpoints_, std::move(v));
  }

  StepFunction abs() const {
    return map([](double v) { return std::abs(v); });
  }
  StepFunction squared() const {
    return map([](double v) { return v * v; });
  }
  StepFunction scaled(double c) const {
    return map([c](double v) { return c * v; });
  }

  /// Same function viewed on (0, new_length) with a zero tail.
  StepFunction extended(double new_length) const {
    if (new_length < length()) throw DomainError("extended: new length shorter than domain");
    if (new_length == length()) return *this;
    auto bp = breakpoints_;
    auto v = values_;
    bp.push_back(new_length);
    v.push_back(0.0);
    return StepFunction(std::move(bp), std::move(v));
  }

  /// f * indicator(0, new_length), viewed on (0, new_length).
  StepFunction restricted(double new_length) const {
    if (!(new_length > 0.0)) throw DomainError("restricted: length must be positive");
    if (new_length >= length()) return extended(new_length);
    std::vector<double> bp{0.0};
    std::vector<double> v;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const Piece p = piece(i);
      if (p.lo >= new_length) break;
      bp.push_back(std::min(p.hi, new_length));
      v.push_back(p.value);
    }
    return StepFunction(std::move(bp), std::move(v));
  }

  /// Splits piece i at an interior point; the represented function is unchanged.
  StepFunction split(std::size_t i, double at) const {
    const Piece p = piece(i);
    if (!(p.lo < at && at < p.hi)) throw DomainError("split: point not interior to piece");
    auto bp = breakpoints_;
    auto v = values_;
    bp.insert(bp.begin() + static_cast<std::ptrdiff_t>(i) + 1, at);
    v.insert(v.begin() + static_cast<std::ptrdiff_t>(i), p.value);
    return StepFunction(std::move(bp), std::move(v));
  }

  /// Joins adjacent pieces with equal values.
  StepFunction merged() const {
    std::vector<double> bp{0.0};
    std::vector<double> v;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!v.empty() && v.back() == values_[i]) {
        bp.back() = breakpoints_[i + 1];
      } else {
        bp.push_back(breakpoints_[i + 1]);
        v.push_back(values_[i]);
      }
    }
    return StepFunction(std::move(bp), std::move(v));
  }

  /// Common refinement of two partitions of the same domain.
  static std::vector<double> merged_breakpoints(const StepFunction& a, const StepFunction& b) {
    std::vector<double> out;
    out.reserve(a.breakpoints_.size() + b.breakpoints_.size());
    std::merge(a.breakpoints_.begin(), a.breakpoints_.end(), b.breakpoints_.begin(),
               b.breakpoints_.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  template <class Op>
  static StepFunction combine(const StepFunction& a, const StepFunction& b, Op op) {
    const double len = std::max(a.length(), b.length());
    const StepFunction ea = a.extended(len);
    const StepFunction eb = b.extended(len);
    auto bp = merged_breakpoints(ea, eb);
    std::vector<double> v(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double mid = 0.5 * (bp[i] + bp[i + 1]);
      v[i] = op(ea(mid), eb(mid));
    }
    return StepFunction(std::move(bp), std::move(v));
  }

  friend StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, std::plus<>{});
  }
  friend StepFunction operator-(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, std::minus<>{});
  }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  void validate() const {
    if (breakpoints_.size() < 2) throw PreconditionError("StepFunction: need at least one piece");
    if (values_.size() + 1 != breakpoints_.size()) {
      throw PreconditionError("StepFunction: piece count must equal breakpoint count - 1");
    }
    if (breakpoints_.front() != 0.0) throw PreconditionError("StepFunction: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!(breakpoints_[i] > breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i])) {
        throw PreconditionError("StepFunction: breakpoints must be finite and strictly increasing");
      }
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw PreconditionError("StepFunction: values must be finite");
    }
  }

  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Prefix sums of \int_0^t f over the pieces; O(log n) per query.
class Primitive {
 public:
  explicit Primitive(const StepFunction& f) : f_(f), cumulative_(f.piece_count() + 1, 0.0) {
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
      cumulative_[i + 1] = cumulative_[i] + f.values()[i] * f.piece(i).width();
    }
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= f_.length()) return cumulative_.back();
    const std::size_t i = f_.locate(t);
    return cumulative_[i] + f_.values()[i] * (t - f_.breakpoints()[i]);
  }

  double at_breakpoint(std::size_t i) const { return cumulative_[i]; }

 private:
  StepFunction f_;
  std::vector<double> cumulative_;
};

/// mu(f): nonincreasing, nonnegative, equimeasurable with |f|, on the same domain (0, L).
inline StepFunction decreasing_rearrangement(const StepFunction& f) {
  std::vector<std::pair<double, double>> pairs;  // (|value|, width)
  pairs.reserve(f.piece_count());
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    pairs.emplace_back(std::abs(f.values()[i]), f.piece(i).width());
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> bp{0.0};
  std::vector<double> v;
  double cursor = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    cursor += pairs[i].second;
    if (!v.empty() && v.back() == pairs[i].first) {
      bp.back() = cursor;
    } else {
      bp.push_back(cursor);
      v.push_back(pairs[i].first);
    }
  }
  // Width sums can drift by an ulp; pin the right end to L.
  bp.back() = f.length();
  if (bp.size() > 2 && bp[bp.size() - 2] >= bp.back()) {
    bp.erase(bp.end() - 2);
    v.pop_back();
  }
  return StepFunction(std::move(bp), std::move(v));
}

/// mu(s, f) for a single s; equals the rearrangement evaluated at s.
inline double rearrangement_at(const StepFunction& f, double s) {
  return decreasing_rearrangement(f)(s);
}

struct SubmajorizationResult {
  bool holds;
  double worst_deficit;  ///< max_t (\int_0^t mu(lower) - (1+tol) \int_0^t mu(upper))
  double worst_t;
};

/// lower \prec\prec upper, checked at every breakpoint of the merged partition of
/// the two rearrangements (both partial integrals are linear between them).
inline SubmajorizationResult submajorizes(const StepFunction& upper, const StepFunction& lower,
                                          double tol = 1e-12) {
  if (upper.length() != lower.length()) {
    throw DomainError("submajorizes: domain lengths differ");
  }
  const StepFunction mu_up = decreasing_rearrangement(upper);
  const StepFunction mu_lo = decreasing_rearrangement(lower);
  const Primitive up(mu_up);
  const Primitive lo(mu_lo);
  SubmajorizationResult r{true, -std::numeric_limits<double>::infinity(), 0.0};
  for (double t : StepFunction::merged_breakpoints(mu_up, mu_lo)) {
    if (t <= 0.0) continue;
    const double deficit = lo(t) - (1.0 + tol) * up(t);
    if (deficit > r.worst_deficit) {
      r.worst_deficit = deficit;
      r.worst_t = t;
    }
  }
  // Allow for rounding in the prefix sums of both sides.
  const double slack = 1e-14 * std::max(1.0, up(upper.length()));
  r.holds = r.worst_deficit <= slack;
  return r;
}

/// (sigma_u f)(t) = f(t / u), on (0, u L).
inline StepFunction dilate(const StepFunction& f, double u) {
  if (!(u > 0.0)) throw DomainError("dilate: u must be positive");
  std::vector<double> bp(f.breakpoints().begin(), f.breakpoints().end());
  for (double& b : bp) b *= u;
  return StepFunction(std::move(bp), std::vector<double>(f.values().begin(), f.values().end()));
}

/// (C mu(f))(s) = (1/s) \int_0^s mu(f), sampled on the grid.
inline std::vector<double> cesaro(const StepFunction& f, std::span<const double> grid) {
  const StepFunction mu = decreasing_rearrangement(f);
  const Primitive primitive(mu);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double s : grid) {
    if (!(s > 0.0)) throw DomainError("cesaro: grid points must be positive");
    if (s > f.length()) throw DomainError("cesaro: grid point beyond domain");
    out.push_back(primitive(s) / s);
  }
  return out;
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface area of the unit sphere S^{d-1} (2 for d = 1: two points).
inline double unit_sphere_area(int d) { return d * unit_ball_volume(d); }

/// r_d(t) = |t|^d; pushes Lebesgue measure on R^d to omega_d times Lebesgue measure on R_+.
struct RadialMap {
  int d;
  double omega_d;

  explicit RadialMap(int dim) : d(dim), omega_d(0.0) {
    if (dim < 1) throw DomainError("RadialMap: dimension must be positive");
    omega_d = unit_ball_volume(dim);
  }

  double operator()(std::span<const double> t) const {
    double r2 = 0.0;
    for (double c : t) r2 += c * c;
    return std::pow(r2, 0.5 * d);
  }
};

// ---------------------------------------------------------------------------
// CSV: header "breakpoint,value", one row per breakpoint; last value ignored.

inline void write_csv(std::ostream& out, const StepFunction& f) {
  out << "breakpoint,value\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    const double v = i < f.piece_count() ? f.values()[i] : 0.0;
    out << f.breakpoints()[i] << ',' << v << '\n';
  }
}

inline StepFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("step csv: empty input");
  if (line.rfind("breakpoint,value", 0) != 0) throw UsageError("step csv: bad header");
  std::vector<double> bp;
  std::vector<double> v;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw UsageError("step csv: missing comma on row " + std::to_string(row));
    try {
      bp.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw UsageError("step csv: unparsable number on row " + std::to_string(row));
    }
  }
  if (bp.size() < 2) throw UsageError("step csv: need at least two breakpoints");
  v.pop_back();
  return StepFunction(std::move(bp), std::move(v));
}

inline void save_csv(const std::string& path, const StepFunction& f) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  write_csv(out, f);
}

inline StepFunction load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return read_csv(in);
}

}  // namespace symspace
