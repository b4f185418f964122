#pragma once

// Norms of symmetric function spaces evaluated on step functions:
// Lorentz Lambda_w, Marcinkiewicz M_w, Orlicz L_N (Luxemburg), L_{2,1}, L_{2,inf},
// 2-convexifications, fundamental functions, the canonical-cut bound for the
// K-functional of (M_phi, L_inf), and the Orlicz-in-Marcinkiewicz gate.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "symspace/error.hpp"
#include "symspace/stepfn.hpp"
#include "symspace/weights.hpp"

namespace symspace {

/// \int_0^inf mu(s, f) dw(s).
inline double lorentz_norm(const StepFunction& f, const ConcaveWeight& w) {
  const StepFunction mu = decreasing_rearrangement(f);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.piece_count(); ++i) {
    const Piece p = mu.piece(i);
    if (p.value != 0.0) s += p.value * w.stieltjes_mass(p.lo, p.hi);
  }
  return s;
}

namespace detail {

/// max of (A + v t) / w(t) over [lo, hi] by golden-section search plus endpoints.
template <class Ratio>
double golden_section_max(const Ratio& ratio, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = ratio(c);
  double fd = ratio(d);
  for (int i = 0; i < 120 && b - a > 1e-17 * std::max(1.0, std::abs(b)); ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = ratio(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = ratio(d);
    }
  }
  return std::max({fc, fd, ratio(lo), ratio(hi)});
}

}  // namespace detail

/// sup_{t>0} (1/w(t)) \int_0^t mu(s, f) ds.
///
/// On a piece of mu the numerator W is affine with W >= 0, and
/// d/dt (W/w) has the sign of v w - W w', whose derivative is -W w''.  Where w
/// is concave the ratio is therefore quasi-convex and peaks at an endpoint;
/// where w is convex (psi on (1/e, 1)) it is quasi-concave and golden-section
/// search finds the interior maximum.
inline double marcinkiewicz_norm(const StepFunction& f, const ConcaveWeight& w) {
  const StepFunction mu = decreasing_rearrangement(f);
  if (mu.is_zero()) return 0.0;
  const auto inflections = w.inflection_points();
  double best = 0.0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < mu.piece_count(); ++i) {
    const Piece p = mu.piece(i);
    const double base = cumulative;
    auto ratio = [&](double t) { return (base + p.value * (t - p.lo)) / w(t); };
    std::vector<double> cuts{p.lo};
    for (double x : inflections) {
      if (p.lo < x && x < p.hi) cuts.push_back(x);
    }
    cuts.push_back(p.hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k];
      const double b = cuts[k + 1];
      if (a > 0.0) best = std::max(best, ratio(a));
      best = std::max(best, ratio(b));
      const bool convex_part = !inflections.empty() && a >= inflections.front() && b <= 1.0;
      if (convex_part && p.value > 0.0) {
        best = std::max(best, detail::golden_section_max(ratio, a, b));
      }
    }
    cumulative += p.value * p.width();
  }
  return best;
}

/// Luxemburg norm inf{lambda > 0 : \int N(|f|/lambda) <= 1}.
inline double orlicz_norm(const StepFunction& f, const OrliczFunction& n) {
  const double sup = f.sup_norm();
  if (sup == 0.0) return 0.0;
  double support = 0.0;
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    if (f.values()[i] != 0.0) support += f.piece(i).width();
  }
  auto modular = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
      const double v = std::abs(f.values()[i]);
      if (v != 0.0) s += f.piece(i).width() * n(v / lambda);
    }
    return s;
  };
  // Exact for indicators; a starting scale otherwise.
  const double guess = sup / n.inverse(1.0 / support);
  double lo = guess * 1e-3;
  double hi = guess;
  int guard = 0;
  while (modular(lo) <= 1.0 && guard++ < 2000) lo *= 0.5;
  guard = 0;
  while (modular(hi) > 1.0 && guard++ < 2000) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (modular(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

struct LpqNorms {
  double l21;
  double l2inf;
  double l2inf_cap_l1;
};

/// L_{2,1}, L_{2,inf} (Marcinkiewicz with t^{1/2}) and max(L_{2,inf}, L_1).
inline LpqNorms lpq_norms(const StepFunction& f) {
  const StepFunction mu = decreasing_rearrangement(f);
  const auto sqrt_w = ConcaveWeight::sqrt();
  LpqNorms r{0.0, 0.0, 0.0};
  double cumulative = 0.0;
  for (std::size_t i = 0; i < mu.piece_count(); ++i) {
    const Piece p = mu.piece(i);
    r.l21 += p.value * sqrt_w.stieltjes_mass(p.lo, p.hi);
    cumulative += p.value * p.width();
    // (A + v s)/sqrt(s) is quasi-convex on each piece: breakpoints suffice.
    r.l2inf = std::max(r.l2inf, cumulative / std::sqrt(p.hi));
  }
  r.l2inf_cap_l1 = std::max(r.l2inf, f.l1_norm());
  return r;
}

/// Handle on one of the implemented norms, addressable by a string id.
class Norm {
 public:
  enum class Kind { lorentz, marcinkiewicz, orlicz, l21, l2inf, l1, l2, linf };

  static Norm lorentz(ConcaveWeight w) { return Norm(Kind::lorentz, w); }
  static Norm marcinkiewicz(ConcaveWeight w) { return Norm(Kind::marcinkiewicz, w); }
  static Norm orlicz(OrliczFunction n) { return Norm(Kind::orlicz, std::move(n)); }
  static Norm l21() { return Norm(Kind::l21, std::monostate{}); }
  static Norm l2inf() { return Norm(Kind::l2inf, std::monostate{}); }
  static Norm lp(double p) {
    if (p == 1.0) return Norm(Kind::l1, std::monostate{});
    if (p == 2.0) return Norm(Kind::l2, std::monostate{});
    if (p == std::numeric_limits<double>::infinity()) return Norm(Kind::linf, std::monostate{});
    throw DomainError("Norm::lp: only p in {1, 2, inf}");
  }

  /// "lambda:psi", "lambda:phi", "marc:psi", "marc:phi", "orlicz:M", "orlicz:G",
  /// "orlicz:linear", "orlicz:file=<path>", "l21", "l2inf", "l1", "l2", "linf".
  static Norm parse(std::string_view id);

  double operator()(const StepFunction& f) const {
    switch (kind_) {
      case Kind::lorentz:
        return lorentz_norm(f, std::get<ConcaveWeight>(param_));
      case Kind::marcinkiewicz:
        return marcinkiewicz_norm(f, std::get<ConcaveWeight>(param_));
      case Kind::orlicz:
        return orlicz_norm(f, std::get<OrliczFunction>(param_));
      case Kind::l21:
        return lpq_norms(f).l21;
      case Kind::l2inf:
        return lpq_norms(f).l2inf;
      case Kind::l1:
        return f.l1_norm();
      case Kind::l2:
        return f.lp_norm(2.0);
      case Kind::linf:
        return f.sup_norm();
    }
    return 0.0;
  }

  Kind kind() const noexcept { return kind_; }
  const std::string& id() const noexcept { return id_; }

 private:
  using Param = std::variant<std::monostate, ConcaveWeight, OrliczFunction>;

  Norm(Kind k, Param p) : kind_(k), param_(std::move(p)) { id_ = make_id(); }

  std::string make_id() const {
    switch (kind_) {
      case Kind::lorentz:
        return "lambda:" + std::get<ConcaveWeight>(param_).label();
      case Kind::marcinkiewicz:
        return "marc:" + std::get<ConcaveWeight>(param_).label();
      case Kind::orlicz:
        return "orlicz:" + std::get<OrliczFunction>(param_).label();
      case Kind::l21:
        return "l21";
      case Kind::l2inf:
        return "l2inf";
      case Kind::l1:
        return "l1";
      case Kind::l2:
        return "l2";
      case Kind::linf:
        return "linf";
    }
    return "?";
  }

  Kind kind_;
  Param param_;
  std::string id_;
};

/// Reads a custom Orlicz function from CSV "t,N(t)" (header required).
inline OrliczFunction load_orlicz_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open Orlicz table " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,", 0) != 0) throw UsageError("Orlicz table: expected header 't,N(t)'");
  std::vector<double> t;
  std::vector<double> n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw UsageError("Orlicz table: missing comma");
    t.push_back(std::stod(line.substr(0, comma)));
    n.push_back(std::stod(line.substr(comma + 1)));
  }
  return OrliczFunction::table(std::move(t), std::move(n), "file=" + path);
}

inline Norm Norm::parse(std::string_view id) {
  auto weight = [&](std::string_view name) -> ConcaveWeight {
    if (name == "psi") return ConcaveWeight::psi();
    if (name == "phi") return ConcaveWeight::phi();
    if (name == "sqrt") return ConcaveWeight::sqrt();
    throw UsageError("unknown weight '" + std::string(name) + "' in norm id '" + std::string(id) + "'",
                     id.find(name));
  };
  if (id == "l21") return l21();
  if (id == "l2inf") return l2inf();
  if (id == "l1") return lp(1.0);
  if (id == "l2") return lp(2.0);
  if (id == "linf") return lp(std::numeric_limits<double>::infinity());
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) throw UsageError("unknown norm id '" + std::string(id) + "'");
  const std::string_view head = id.substr(0, colon);
  const std::string_view tail = id.substr(colon + 1);
  if (head == "lambda") return lorentz(weight(tail));
  if (head == "marc") return marcinkiewicz(weight(tail));
  if (head == "orlicz") {
    if (tail == "M") return orlicz(OrliczFunction::M());
    if (tail == "G") return orlicz(OrliczFunction::G());
    if (tail == "linear") return orlicz(OrliczFunction::linear());
    if (tail.rfind("file=", 0) == 0) return orlicz(load_orlicz_csv(std::string(tail.substr(5))));
    throw UsageError("unknown Orlicz function in '" + std::string(id) + "'", colon + 1);
  }
  throw UsageError("unknown norm family '" + std::string(head) + "'", 0);
}

/// || |f|^2 ||_E^{1/2}.
inline double convexify2_norm(const StepFunction& f, const Norm& base) {
  return std::sqrt(base(f.squared()));
}

/// || chi_(0,t) || in the given space on (0, length).
inline double fundamental_function(const Norm& space, double t, double length = 1.0) {
  if (!(t > 0.0 && t <= length)) throw DomainError("fundamental_function: need 0 < t <= length");
  return space(StepFunction::indicator(0.0, t, length));
}

struct KFunctionalBounds {
  double upper;        ///< min over cut levels c of ||(|x|-c)_+||_{M_phi} + t c
  double paper_lower;  ///< (1/4) t mu(psi^{-1}(t), x)
};

/// Precomputes the M_phi norms of (|x| - c)_+ for every cut level c in
/// {0} U {values of mu(x)} so that many t can be evaluated cheaply.
class KFunctionalMphiLinf {
 public:
  explicit KFunctionalMphiLinf(const StepFunction& x) : mu_(decreasing_rearrangement(x)) {
    if (x.length() != 1.0) throw DomainError("K-functional: x must live on (0, 1)");
    const auto phi = ConcaveWeight::phi();
    std::vector<double> levels{0.0};
    for (double v : mu_.values()) levels.push_back(v);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (double c : levels) {
      const StepFunction excess = mu_.map([c](double v) { return std::max(v - c, 0.0); });
      cuts_.push_back({c, marcinkiewicz_norm(excess, phi)});
    }
  }

  KFunctionalBounds operator()(double t) const {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("K-functional: t must lie in (0, 1)");
    double upper = std::numeric_limits<double>::infinity();
    for (const auto& cut : cuts_) upper = std::min(upper, cut.excess_norm + t * cut.level);
    const double s = ConcaveWeight::psi().inverse(t);
    return {upper, 0.25 * t * mu_(s)};
  }

 private:
  struct Cut {
    double level;
    double excess_norm;
  };
  StepFunction mu_;
  std::vector<Cut> cuts_;
};

inline KFunctionalBounds kfunctional_mphi_linfty(double t, const StepFunction& x) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("K-functional: t must lie in (0, 1)");
  return KFunctionalMphiLinf(x)(t);
}

struct OrliczGate {
  bool contained_in_Mpsi;
  double c_N;  ///< sup_t phi(t) N^{-1}(1/t) on the refined grid
  bool dominates_M;
  double c_prime;  ///< inf_v N(v)/M(v) on the refined grid (0 when not contained)
  double v_threshold;
  double c_N_coarse;
  double c_prime_coarse;
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

}  // namespace detail

/// Decides L_N(0,1) \subset M_psi(0,1) (fundamental-function test) and, when
/// contained, whether N dominates M(t) = t log(e+t) past N^{-1}(1).  "Stable"
/// means extending the log grid by the same number of decades with twice the
/// points moves the extremum by less than 1%.
inline OrliczGate orlicz_containment_gate(const OrliczFunction& n) {
  if (!n.convex_on_grid()) throw InvariantError("orlicz gate: N is not convex with N(0) = 0");
  const auto phi = ConcaveWeight::phi();
  auto sup_over = [&](double lo, int points) {
    double best = 0.0;
    for (double t : detail::log_grid(lo, 1.0, points)) best = std::max(best, phi(t) * n.inverse(1.0 / t));
    return best;
  };
  OrliczGate g{};
  g.c_N_coarse = sup_over(1e-8, 400);
  g.c_N = sup_over(1e-16, 800);
  g.contained_in_Mpsi = std::isfinite(g.c_N) && std::abs(g.c_N - g.c_N_coarse) <= 0.01 * g.c_N_coarse;
  g.v_threshold = n.inverse(1.0);
  if (!g.contained_in_Mpsi) return g;

  const auto m = OrliczFunction::M();
  auto inf_over = [&](double hi, int points) {
    double best = std::numeric_limits<double>::infinity();
    const auto grid = detail::log_grid(g.v_threshold, hi, points + 1);
    for (std::size_t i = 1; i < grid.size(); ++i) best = std::min(best, n(grid[i]) / m(grid[i]));
    return best;
  };
  g.c_prime_coarse = inf_over(1e8, 400);
  g.c_prime = inf_over(1e16, 800);
  g.dominates_M = g.c_prime > 0.0 && std::abs(g.c_prime - g.c_prime_coarse) <= 0.01 * g.c_prime_coarse;
  return g;
}

struct RatioBand {
  double min_ratio;
  double max_ratio;
  std::size_t evaluated;
};

/// min/max of ||f||_A / ||f||_B over a family; zero functions are skipped.
inline RatioBand equivalence_ratio(const Norm& a, const Norm& b, std::span<const StepFunction> family) {
  RatioBand r{std::numeric_limits<double>::infinity(), 0.0, 0};
  for (const auto& f : family) {
    if (f.is_zero()) continue;
    const double ratio = a(f) / b(f);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
    ++r.evaluated;
  }
  return r;
}

}  // namespace symspace
