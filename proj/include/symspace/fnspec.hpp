#pragma once

// Function specifications for the command line:
//
//   indicator:a,b            chi_(a,b) on (0, 1)
//   const:c                  c on (0, 1)
//   power:p[,m=<pieces>]     t^p, p in (-1/2, 0], exact cell averages
//   invphi[:k=<k>][,m=<n>]   min(k, 1/phi), plateau plus geometric cells
//   csv:<path>               step function table "breakpoint,value"
//   random-decreasing:seed,pieces
//
// Malformed input raises UsageError whose position() is the offending offset.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "symspace/error.hpp"
#include "symspace/profiles.hpp"
#include "symspace/random.hpp"
#include "symspace/stepfn.hpp"

namespace symspace {

struct FnSpec {
  std::string text;
  std::string kind;
  StepFunction function;  ///< on (0, 1)
  nlohmann::json parameters;
  /// Exact primitive when the profile has one; otherwise the step function's own.
  std::function<double(double)> primitive;
};

inline constexpr int default_profile_pieces = 200;
inline constexpr double default_invphi_k = 16.0;

namespace detail {

class SpecCursor {
 public:
  SpecCursor(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  bool done() const noexcept { return pos_ >= text_.size(); }
  std::size_t position() const noexcept { return offset_ + pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw UsageError("fn spec: " + what + " at position " + std::to_string(position()), position());
  }

  double number(const char* name) {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail(std::string("expected a number for ") + name);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::uint64_t integer(const char* name) {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail(std::string("expected an integer for ") + name);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  void expect(char c) {
    if (done() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool accept(std::string_view s) {
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }

  void finish() const {
    if (!done()) fail("unexpected trailing input");
  }

 private:
  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

inline int parse_pieces(SpecCursor& c) {
  const std::size_t at = c.position();
  const std::uint64_t m = c.integer("m");
  if (m < 2 || m > 1000000) throw UsageError("fn spec: piece count must lie in [2, 1e6]", at);
  return static_cast<int>(m);
}

}  // namespace detail

inline FnSpec parse_fn_spec(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::size_t body_at = colon == std::string_view::npos ? spec.size() : colon + 1;
  const std::string_view body = spec.substr(body_at);
  detail::SpecCursor c(body, body_at);
  FnSpec out{std::string(spec), std::string(head), StepFunction(), nlohmann::json::object(), {}};

  auto require_body = [&] {
    if (colon == std::string_view::npos) throw UsageError("fn spec: '" + std::string(head) + "' needs ':'", spec.size());
  };

  if (head == "indicator") {
    require_body();
    const std::size_t at = c.position();
    const double a = c.number("a");
    c.expect(',');
    const double b = c.number("b");
    c.finish();
    if (!(0.0 <= a && a <= b && b <= 1.0)) throw UsageError("fn spec: indicator needs 0 <= a <= b <= 1", at);
    out.function = StepFunction::indicator(a, b);
    out.parameters = {{"a", a}, {"b", b}};
  } else if (head == "const") {
    require_body();
    const double v = c.number("c");
    c.finish();
    out.function = StepFunction::constant(v, 1.0);
    out.parameters = {{"c", v}};
  } else if (head == "power") {
    require_body();
    const std::size_t at = c.position();
    const double p = c.number("p");
    int m = default_profile_pieces;
    if (c.accept(",m=")) m = detail::parse_pieces(c);
    c.finish();
    try {
      const PowerProfile profile(p);
      out.function = profile.steps(m);
      out.primitive = [profile](double s) { return profile.primitive(s); };
    } catch (const DomainError& e) {
      throw UsageError(std::string("fn spec: ") + e.what(), at);
    }
    out.parameters = {{"p", p}, {"pieces", m}};
  } else if (head == "invphi") {
    double k = default_invphi_k;
    int m = default_profile_pieces;
    if (colon != std::string_view::npos) {
      bool any = false;
      if (c.accept("k=")) {
        const std::size_t at = c.position();
        k = c.number("k");
        if (!(k >= 1.0)) throw UsageError("fn spec: invphi needs k >= 1", at);
        any = true;
      }
      if (c.accept(any ? ",m=" : "m=")) {
        m = detail::parse_pieces(c);
        any = true;
      }
      if (!any) c.fail("expected k= or m=");
      c.finish();
    }
    const InvPhiProfile profile(k);
    out.function = profile.steps(m);
    out.primitive = [profile](double s) { return profile.primitive(s); };
    out.parameters = {{"k", k}, {"pieces", m}};
  } else if (head == "csv") {
    require_body();
    if (body.empty()) c.fail("expected a path");
    try {
      out.function = load_csv(std::string(body));
    } catch (const std::exception& e) {
      throw UsageError(std::string("fn spec: ") + e.what(), body_at);
    }
    if (out.function.length() != 1.0) throw UsageError("fn spec: csv function must live on (0, 1)", body_at);
    out.parameters = {{"path", std::string(body)}, {"pieces", out.function.piece_count()}};
  } else if (head == "random-decreasing") {
    require_body();
    const std::uint64_t seed = c.integer("seed");
    c.expect(',');
    const std::size_t at = c.position();
    const std::uint64_t pieces = c.integer("pieces");
    c.finish();
    if (pieces < 1 || pieces > 1000000) throw UsageError("fn spec: pieces must lie in [1, 1e6]", at);
    out.function = random_decreasing(seed, static_cast<std::size_t>(pieces));
    out.parameters = {{"seed", seed}, {"pieces", pieces}};
  } else {
    throw UsageError("fn spec: unknown function '" + std::string(head) + "'", 0);
  }
  if (!out.primitive) {
    out.primitive = [f = out.function](double s) { return f.integral_to(std::min(s, 1.0)); };
  }
  return out;
}

}  // namespace symspace
