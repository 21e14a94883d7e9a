#pragma once

// Extended reals R u {-inf, inf} with exact rational finite part.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "realeq/errors.hpp"

namespace realeq {

using Rational = boost::multiprecision::cpp_rational;

/// Renders a rational as an integer or `p/q` in lowest terms.
inline std::string rational_to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses `[-]p` or `[-]p/q`. Throws InvalidArgument on malformed text or q = 0.
inline Rational parse_rational(std::string_view text) {
  auto digits_only = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!digits_only(num) || !digits_only(den))
    throw InvalidArgument("malformed rational literal '" + std::string(text) + "'");
  boost::multiprecision::cpp_int n{std::string(num)};
  boost::multiprecision::cpp_int d{std::string(den)};
  if (d == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  Rational r(n, d);
  return negative ? Rational(-r) : r;
}

/// Strictly positive rational, used for scaling constants.
class PosRational {
 public:
  explicit PosRational(Rational value) : value_(std::move(value)) {
    if (value_ <= 0)
      throw InvalidArgument("scaling constant must be positive, got " + rational_to_string(value_));
  }
  PosRational(std::int64_t num, std::int64_t den = 1) : PosRational(Rational(num, den)) {}

  const Rational& value() const { return value_; }
  std::string str() const { return rational_to_string(value_); }

  friend bool operator==(const PosRational&, const PosRational&) = default;
  friend std::strong_ordering operator<=>(const PosRational& a, const PosRational& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Rational value_;
};

class ExtReal {
 public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  ExtReal() = default;  // zero
  ExtReal(Rational value) : kind_(Kind::Finite), value_(std::move(value)) {}
  ExtReal(std::int64_t num, std::int64_t den = 1) : ExtReal(Rational(num, den)) {}

  static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  /// Finite part; zero for the infinities.
  const Rational& value() const { return value_; }

  std::string str() const {
    switch (kind_) {
      case Kind::NegInf: return "-inf";
      case Kind::PosInf: return "inf";
      case Kind::Finite: break;
    }
    return rational_to_string(value_);
  }

  /// Inverse of str(): `inf`, `-inf`, integers and `p/q`.
  static ExtReal parse(std::string_view text) {
    if (text == "inf") return pos_inf();
    if (text == "-inf") return neg_inf();
    return ExtReal(parse_rational(text));
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

  friend std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (a.kind_ != Kind::Finite) return std::strong_ordering::equal;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.str(); }

 private:
  explicit ExtReal(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Finite;
  Rational value_{0};
};

inline std::strong_ordering compare(const ExtReal& a, const ExtReal& b) { return a <=> b; }

/// Addition where inf dominates: -inf + inf = inf.
inline ExtReal add(const ExtReal& a, const ExtReal& b) {
  if (a.is_pos_inf() || b.is_pos_inf()) return ExtReal::pos_inf();
  if (a.is_neg_inf() || b.is_neg_inf()) return ExtReal::neg_inf();
  return ExtReal(Rational(a.value() + b.value()));
}

/// Addition where -inf dominates: -inf +^ inf = -inf.
inline ExtReal hat_add(const ExtReal& a, const ExtReal& b) {
  if (a.is_neg_inf() || b.is_neg_inf()) return ExtReal::neg_inf();
  if (a.is_pos_inf() || b.is_pos_inf()) return ExtReal::pos_inf();
  return ExtReal(Rational(a.value() + b.value()));
}

inline ExtReal scale(const PosRational& c, const ExtReal& a) {
  if (!a.is_finite()) return a;
  return ExtReal(Rational(c.value() * a.value()));
}

inline ExtReal min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }
inline ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

/// The `=>` conditional: a /\ b when g <= 0, b otherwise.
inline ExtReal cond(const ExtReal& g, const ExtReal& a, const ExtReal& b) {
  return g <= ExtReal(0) ? min(a, b) : b;
}

/// The `->` conditional: a when g < 0, a \/ b otherwise.
inline ExtReal conda(const ExtReal& g, const ExtReal& a, const ExtReal& b) {
  return g < ExtReal(0) ? a : max(a, b);
}

inline ExtReal eq_inf(const ExtReal& a) { return a.is_pos_inf() ? ExtReal::pos_inf() : ExtReal::neg_inf(); }
inline ExtReal eq_neg_inf(const ExtReal& a) { return a.is_neg_inf() ? ExtReal::neg_inf() : ExtReal::pos_inf(); }

inline ExtReal negate(const ExtReal& a) {
  if (a.is_pos_inf()) return ExtReal::neg_inf();
  if (a.is_neg_inf()) return ExtReal::pos_inf();
  return ExtReal(Rational(-a.value()));
}

}  // namespace realeq

template <>
struct std::hash<realeq::ExtReal> {
  std::size_t operator()(const realeq::ExtReal& x) const noexcept {
    return std::hash<std::string>{}(x.str());
  }
};
