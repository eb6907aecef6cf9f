#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "forcing_lab/errors.hpp"

namespace forcing_lab {

using BigInt = boost::multiprecision::cpp_int;
using ExactRational = boost::multiprecision::cpp_rational;

inline std::string to_string(const ExactRational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline ExactRational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return ExactRational(BigInt(text));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in " + text);
    return ExactRational(BigInt(text.substr(0, slash)), den);
  } catch (const std::runtime_error&) {
    throw ParseError("not a rational: " + text);
  }
}

/// num / 2^exponent, kept with an odd numerator (or zero with exponent 0).
class DyadicRational {
 public:
  DyadicRational() = default;
  DyadicRational(std::int64_t num, unsigned exponent) : num_(num), exp_(exponent) {
    if (exponent > 62) throw PreconditionError("dyadic exponent above 62");
    normalize();
  }

  std::int64_t numerator() const { return num_; }
  unsigned exponent() const { return exp_; }

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    const unsigned e = std::max(a.exp_, b.exp_);
    return DyadicRational(a.num_ * (std::int64_t{1} << (e - a.exp_)) +
                              b.num_ * (std::int64_t{1} << (e - b.exp_)),
                          e);
  }
  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
    return a + DyadicRational(-b.num_, b.exp_);
  }

  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    const unsigned e = std::max(a.exp_, b.exp_);
    const __int128 x = static_cast<__int128>(a.num_) << (e - a.exp_);
    const __int128 y = static_cast<__int128>(b.num_) << (e - b.exp_);
    return x <=> y;
  }
  friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
    return a.num_ == b.num_ && a.exp_ == b.exp_;
  }

  std::string to_string() const {
    if (exp_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/2^" + std::to_string(exp_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && num_ % 2 == 0) {
      num_ /= 2;
      --exp_;
    }
  }

  std::int64_t num_ = 0;
  unsigned exp_ = 0;
};

/// A norm value: an exact rational or +infinity (full successor set).
template <class Rational = ExactRational>
struct BasicNorm {
  bool infinite = false;
  Rational value{};

  static BasicNorm infinity() { return {true, Rational{}}; }
  static BasicNorm finite(Rational v) { return {false, std::move(v)}; }

  friend bool operator==(const BasicNorm& a, const BasicNorm& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return a.value == b.value;
  }
  friend bool operator<(const BasicNorm& a, const BasicNorm& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.value < b.value;
  }
  friend bool operator>=(const BasicNorm& a, const BasicNorm& b) { return !(a < b); }
  friend bool operator<=(const BasicNorm& a, const BasicNorm& b) { return !(b < a); }
  friend bool operator>(const BasicNorm& a, const BasicNorm& b) { return b < a; }

  std::string to_string() const {
    if (infinite) return "inf";
    if constexpr (std::is_same_v<Rational, ExactRational>) {
      return forcing_lab::to_string(value);
    } else {
      return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
    }
  }
};

using Norm = BasicNorm<ExactRational>;

}  // namespace forcing_lab
