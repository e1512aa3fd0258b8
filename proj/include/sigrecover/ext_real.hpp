#pragma once

#include <cstdint>
#include <iosfwd>

namespace sigrecover {

/// Real number with a 64-bit binary exponent: value = mantissa * 2^exponent.
///
/// Iterated integrals along long sequences of bump forms are products of many
/// small factors and routinely fall far below the smallest double. ExtReal
/// keeps them representable so that "exactly zero" and "tiny but nonzero"
/// stay distinguishable.
class ExtReal {
public:
  constexpr ExtReal() = default;
  explicit ExtReal(double value);

  /// Builds mantissa * 2^exponent and normalizes.
  static ExtReal from_parts(double mantissa, std::int64_t exponent);
  /// Builds sign * exp(ln_abs). ln_abs = -inf gives zero.
  static ExtReal from_log(double ln_abs, bool negative = false);

  double mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }

  bool is_zero() const { return mantissa_ == 0.0; }
  int sign() const { return (mantissa_ > 0.0) - (mantissa_ < 0.0); }
  ExtReal abs() const;

  /// Nearest double; underflows to 0 and overflows to +-inf.
  double to_double() const;
  /// log10 |x|, -inf for zero.
  double log10_abs() const;
  /// ln |x|, -inf for zero.
  double log_abs() const;

  ExtReal operator-() const;
  ExtReal& operator+=(const ExtReal& rhs);
  ExtReal& operator-=(const ExtReal& rhs);
  ExtReal& operator*=(const ExtReal& rhs);
  ExtReal& operator/=(const ExtReal& rhs);

  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }
  friend ExtReal operator-(ExtReal a, const ExtReal& b) { return a -= b; }
  friend ExtReal operator*(ExtReal a, const ExtReal& b) { return a *= b; }
  friend ExtReal operator/(ExtReal a, const ExtReal& b) { return a /= b; }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }

  /// |a| < |b|
  friend bool abs_less(const ExtReal& a, const ExtReal& b);

private:
  void normalize();

  // Invariant: mantissa_ == 0 (then exponent_ == 0) or 0.5 <= |mantissa_| < 1.
  double mantissa_ = 0.0;
  std::int64_t exponent_ = 0;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

} // namespace sigrecover
