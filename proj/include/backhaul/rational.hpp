// Copyright 2026 The Backhaul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BACKHAUL_RATIONAL_HPP_
#define BACKHAUL_RATIONAL_HPP_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace backhaul {

// Exact rational number with 64-bit numerator and denominator. Always kept in
// lowest terms with a positive denominator. Intermediate products use 128-bit
// arithmetic; a result that does not fit in 64 bits throws std::overflow_error.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int64_t num, int64_t den);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  int64_t floor() const;
  int64_t ceil() const;
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // "n" for integers, "n/d" otherwise.
  std::string to_string() const;

  // Accepts "7", "-3/4", "4.5", "1e3". Decimal input is converted exactly.
  static Rational parse(std::string_view text);
  // Exact conversion of a binary double when the value is a short decimal
  // (at most `max_decimals` fractional digits); otherwise rounds to that
  // many decimals.
  static Rational from_double(double value, int max_decimals = 9);

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 num, __int128 den);

  int64_t num_ = 0;
  int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// floor(a / b) for positive b, exact.
int64_t floor_div(const Rational& a, const Rational& b);

// Sum of 1/k over the given positive integers, compared against 1 exactly.
// Returns -1, 0 or +1 for sum < 1, == 1, > 1. Never overflows.
int compare_reciprocal_sum_to_one(std::span<const int64_t> ks);

}  // namespace backhaul

#endif  // BACKHAUL_RATIONAL_HPP_
