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

#include "backhaul/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace backhaul {
namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(i128 v) {
  return v >= std::numeric_limits<int64_t>::min() && v <= std::numeric_limits<int64_t>::max();
}

}  // namespace

Rational::Rational(int64_t num, int64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) throw std::overflow_error("Rational: 64-bit overflow");
  Rational r;
  r.num_ = static_cast<int64_t>(num);
  r.den_ = static_cast<int64_t>(den);
  return r;
}

int64_t Rational::floor() const {
  int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

int64_t Rational::ceil() const {
  int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("Rational: empty string");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational n = parse(text.substr(0, slash));
    Rational d = parse(text.substr(slash + 1));
    if (d.is_zero()) throw std::invalid_argument("Rational: zero denominator");
    return n / d;
  }
  // Decimal with optional exponent, parsed digit by digit so "4.5" is exact.
  std::string s(text);
  size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
  i128 mant = 0;
  int scale = 0;
  bool any = false;
  bool frac = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.' && !frac) {
      frac = true;
      continue;
    }
    if (c < '0' || c > '9') break;
    any = true;
    mant = mant * 10 + (c - '0');
    if (frac) ++scale;
    if (mant > (i128{1} << 100)) throw std::overflow_error("Rational: literal too long");
  }
  if (!any) throw std::invalid_argument("Rational: malformed number '" + s + "'");
  int exp10 = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    size_t used = 0;
    exp10 = std::stoi(s.substr(pos + 1), &used);
    pos += 1 + used;
  }
  if (pos != s.size()) throw std::invalid_argument("Rational: malformed number '" + s + "'");
  int e = exp10 - scale;
  i128 num = neg ? -mant : mant;
  i128 den = 1;
  if (std::abs(e) > 30) throw std::overflow_error("Rational: exponent out of range");
  for (int i = 0; i < e; ++i) num *= 10;
  for (int i = 0; i < -e; ++i) den *= 10;
  return from_wide(num, den);
}

Rational Rational::from_double(double value, int max_decimals) {
  if (!std::isfinite(value)) throw std::invalid_argument("Rational: non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", max_decimals, value);
  return parse(buf);
}

Rational Rational::operator-() const {
  Rational r;
  if (num_ == std::numeric_limits<int64_t>::min()) throw std::overflow_error("Rational: negate");
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  i128 g = gcd128(den_, o.den_);
  i128 lhs_scale = o.den_ / g;
  i128 rhs_scale = den_ / g;
  *this = from_wide(i128{num_} * lhs_scale + i128{o.num_} * rhs_scale, i128{den_} * lhs_scale);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  *this = from_wide(i128{num_} * o.num_, i128{den_} * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
  *this = from_wide(i128{num_} * o.den_, i128{den_} * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 l = i128{a.num_} * b.den_;
  i128 r = i128{b.num_} * a.den_;
  return l <=> r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

int64_t floor_div(const Rational& a, const Rational& b) {
  if (b.sign() <= 0) throw std::domain_error("floor_div: divisor must be positive");
  return (a / b).floor();
}

int compare_reciprocal_sum_to_one(std::span<const int64_t> ks) {
  long double sum = 0;
  for (int64_t k : ks) {
    if (k <= 0) throw std::domain_error("reciprocal sum: nonpositive entry");
    sum += 1.0L / static_cast<long double>(k);
  }
  // Margin far above the accumulated rounding error for any realistic length.
  constexpr long double kMargin = 1e-12L;
  if (sum < 1.0L - kMargin) return -1;
  if (sum > 1.0L + kMargin) return 1;

  using boost::multiprecision::cpp_int;
  cpp_int den = 1;
  for (int64_t k : ks) den = boost::multiprecision::lcm(den, cpp_int(k));
  cpp_int num = 0;
  for (int64_t k : ks) num += den / k;
  if (num < den) return -1;
  if (num > den) return 1;
  return 0;
}

}  // namespace backhaul
