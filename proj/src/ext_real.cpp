#include "sigrecover/ext_real.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sigrecover {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kLog10Of2 = 0.30102999566398119521;
// Exponent gap beyond which the smaller addend cannot affect the sum.
constexpr std::int64_t kAddCutoff = 1100;
} // namespace

ExtReal::ExtReal(double value) : mantissa_(value), exponent_(0) {
  if (!std::isfinite(value)) {
    throw std::domain_error("ExtReal: non-finite value");
  }
  normalize();
}

ExtReal ExtReal::from_parts(double mantissa, std::int64_t exponent) {
  if (!std::isfinite(mantissa)) {
    throw std::domain_error("ExtReal: non-finite mantissa");
  }
  ExtReal r;
  r.mantissa_ = mantissa;
  r.exponent_ = exponent;
  r.normalize();
  return r;
}

ExtReal ExtReal::from_log(double ln_abs, bool negative) {
  if (ln_abs == -std::numeric_limits<double>::infinity()) {
    return ExtReal();
  }
  if (!std::isfinite(ln_abs)) {
    throw std::domain_error("ExtReal: non-finite logarithm");
  }
  const double y = ln_abs / kLn2;
  const double e = std::floor(y);
  ExtReal r;
  r.mantissa_ = std::exp2(y - e);
  r.exponent_ = static_cast<std::int64_t>(e);
  if (negative) {
    r.mantissa_ = -r.mantissa_;
  }
  r.normalize();
  return r;
}

void ExtReal::normalize() {
  if (mantissa_ == 0.0) {
    exponent_ = 0;
    return;
  }
  int e = 0;
  mantissa_ = std::frexp(mantissa_, &e);
  exponent_ += e;
}

ExtReal ExtReal::abs() const {
  ExtReal r = *this;
  r.mantissa_ = std::fabs(r.mantissa_);
  return r;
}

double ExtReal::to_double() const {
  if (is_zero()) {
    return 0.0;
  }
  if (exponent_ > std::numeric_limits<double>::max_exponent + 1) {
    return mantissa_ > 0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  }
  if (exponent_ < std::numeric_limits<double>::min_exponent - 60) {
    return 0.0;
  }
  return std::ldexp(mantissa_, static_cast<int>(exponent_));
}

double ExtReal::log10_abs() const {
  if (is_zero()) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::log10(std::fabs(mantissa_)) +
         static_cast<double>(exponent_) * kLog10Of2;
}

double ExtReal::log_abs() const {
  if (is_zero()) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::log(std::fabs(mantissa_)) + static_cast<double>(exponent_) * kLn2;
}

ExtReal ExtReal::operator-() const {
  ExtReal r = *this;
  r.mantissa_ = -r.mantissa_;
  return r;
}

ExtReal& ExtReal::operator+=(const ExtReal& rhs) {
  if (rhs.is_zero()) {
    return *this;
  }
  if (is_zero()) {
    return *this = rhs;
  }
  const std::int64_t gap = exponent_ - rhs.exponent_;
  if (gap > kAddCutoff) {
    return *this;
  }
  if (gap < -kAddCutoff) {
    return *this = rhs;
  }
  if (gap >= 0) {
    mantissa_ += std::ldexp(rhs.mantissa_, static_cast<int>(-gap));
  } else {
    mantissa_ = std::ldexp(mantissa_, static_cast<int>(gap)) + rhs.mantissa_;
    exponent_ = rhs.exponent_;
  }
  normalize();
  return *this;
}

ExtReal& ExtReal::operator-=(const ExtReal& rhs) { return *this += -rhs; }

ExtReal& ExtReal::operator*=(const ExtReal& rhs) {
  if (is_zero() || rhs.is_zero()) {
    return *this = ExtReal();
  }
  mantissa_ *= rhs.mantissa_;
  exponent_ += rhs.exponent_;
  normalize();
  return *this;
}

ExtReal& ExtReal::operator/=(const ExtReal& rhs) {
  if (rhs.is_zero()) {
    throw std::domain_error("ExtReal: division by zero");
  }
  if (is_zero()) {
    return *this;
  }
  mantissa_ /= rhs.mantissa_;
  exponent_ -= rhs.exponent_;
  normalize();
  return *this;
}

bool abs_less(const ExtReal& a, const ExtReal& b) {
  if (b.is_zero()) {
    return false;
  }
  if (a.is_zero()) {
    return true;
  }
  if (a.exponent_ != b.exponent_) {
    return a.exponent_ < b.exponent_;
  }
  return std::fabs(a.mantissa_) < std::fabs(b.mantissa_);
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
  if (x.is_zero()) {
    return os << "0";
  }
  const double l10 = x.log10_abs();
  if (l10 > -300.0 && l10 < 300.0) {
    return os << x.to_double();
  }
  const double e = std::floor(l10);
  const double m = std::pow(10.0, l10 - e) * x.sign();
  return os << std::setprecision(6) << m << "e" << static_cast<long long>(e);
}

} // namespace sigrecover
