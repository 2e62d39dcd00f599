#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <variant>

#include "types.hpp"

namespace wshift {

/// A positive real stored by its base-2 logarithm.
///
/// Dyadic quantities keep an integer exponent and all arithmetic on them is
/// exact (checked for 64-bit overflow). As soon as an inexact operand takes
/// part, the result is a float exponent and `is_exact()` turns false; there is
/// no silent path from float back to exact.
///
/// Addition of two values multiplies the underlying reals.
class Log2Value {
 public:
  constexpr Log2Value() = default;

  static constexpr Log2Value exact(std::int64_t exponent) { return Log2Value(exponent); }
  static constexpr Log2Value inexact(double exponent) { return Log2Value(exponent); }
  static constexpr Log2Value one() { return exact(0); }

  constexpr bool is_exact() const noexcept { return std::holds_alternative<std::int64_t>(rep_); }

  /// Integer exponent; only valid for exact values.
  std::int64_t exponent() const {
    if (!is_exact()) throw Error(ErrorKind::InvalidArgument, "exponent() on inexact Log2Value");
    return std::get<std::int64_t>(rep_);
  }

  double log2() const noexcept {
    if (is_exact()) return static_cast<double>(std::get<std::int64_t>(rep_));
    return std::get<double>(rep_);
  }

  /// The represented real 2^e. Under/overflows like any double.
  double value() const noexcept {
    if (is_exact()) {
      const auto e = std::get<std::int64_t>(rep_);
      if (e > 4096) return HUGE_VAL;
      if (e < -4096) return 0.0;
      return std::ldexp(1.0, static_cast<int>(e));
    }
    return std::exp2(std::get<double>(rep_));
  }

  /// Multiplies `x` by this value. Exact (ldexp) for dyadic values unless the
  /// result leaves the double range.
  double scale(double x) const noexcept {
    if (is_exact()) {
      const auto e = std::get<std::int64_t>(rep_);
      if (e > 4096) return x == 0.0 ? 0.0 : std::copysign(HUGE_VAL, x);
      if (e < -4096) return std::copysign(0.0, x);
      return std::ldexp(x, static_cast<int>(e));
    }
    return x * std::exp2(std::get<double>(rep_));
  }

  /// Multiplicative inverse.
  Log2Value operator-() const {
    if (is_exact()) return exact(detail::checked_sub(0, std::get<std::int64_t>(rep_)));
    return inexact(-std::get<double>(rep_));
  }

  friend Log2Value operator+(const Log2Value& a, const Log2Value& b) {
    if (a.is_exact() && b.is_exact()) return exact(detail::checked_add(a.exponent(), b.exponent()));
    return inexact(a.log2() + b.log2());
  }

  friend Log2Value operator-(const Log2Value& a, const Log2Value& b) { return a + (-b); }

  /// Integer power: (2^e)^k.
  Log2Value pow(std::int64_t k) const {
    if (is_exact()) return exact(detail::checked_mul(std::get<std::int64_t>(rep_), k));
    return inexact(std::get<double>(rep_) * static_cast<double>(k));
  }

  /// Real power; exact when the product of exponents is integral.
  Log2Value pow(double p) const {
    if (is_exact() && p == std::floor(p) && std::abs(p) < 1e15) return pow(static_cast<std::int64_t>(p));
    return inexact(log2() * p);
  }

  Log2Value& operator+=(const Log2Value& other) { return *this = *this + other; }

  friend bool operator==(const Log2Value& a, const Log2Value& b) noexcept {
    if (a.is_exact() && b.is_exact()) return std::get<std::int64_t>(a.rep_) == std::get<std::int64_t>(b.rep_);
    return a.log2() == b.log2();
  }

  friend std::partial_ordering operator<=>(const Log2Value& a, const Log2Value& b) noexcept {
    if (a.is_exact() && b.is_exact()) return std::get<std::int64_t>(a.rep_) <=> std::get<std::int64_t>(b.rep_);
    return a.log2() <=> b.log2();
  }

  std::string to_string() const {
    if (is_exact()) return "2^" + std::to_string(std::get<std::int64_t>(rep_));
    return "2^" + std::to_string(std::get<double>(rep_));
  }

 private:
  constexpr explicit Log2Value(std::int64_t e) : rep_(e) {}
  constexpr explicit Log2Value(double e) : rep_(e) {}

  std::variant<std::int64_t, double> rep_{std::int64_t{0}};
};

}  // namespace wshift
