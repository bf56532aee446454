// Copyright 2026 The chainrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

#include "chainrec/error.hpp"

namespace chainrec {

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator (GMP canonical form).
class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  ExactRational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit ExactRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  static ExactRational fraction(long num, long den) { return ExactRational(mpz_class(num), mpz_class(den)); }

  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }
  const mpq_class& raw() const noexcept { return q_; }

  double toDouble() const { return q_.get_d(); }

  /// "num/den"; integers keep the "/1".
  std::string toFractionString() const { return q_.get_num().get_str() + "/" + q_.get_den().get_str(); }

  /// Decimal with `digits` significant digits, rounded half-to-even from the
  /// exact value. Fixed notation for 1e-5 <= |x| < 1e15, scientific otherwise.
  std::string toDecimalString(int digits = 15) const;

  ExactRational& operator+=(const ExactRational& o) { q_ += o.q_; return *this; }
  ExactRational& operator-=(const ExactRational& o) { q_ -= o.q_; return *this; }
  ExactRational& operator*=(const ExactRational& o) { q_ *= o.q_; return *this; }
  ExactRational& operator/=(const ExactRational& o) {
    if (o.q_ == 0) throw DomainError("division by zero");
    q_ /= o.q_;
    return *this;
  }
  friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
  friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
  friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
  friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }
  ExactRational operator-() const { return ExactRational(mpq_class(-q_)); }

  friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  mpq_class q_{0};
};

inline std::string ExactRational::toDecimalString(int digits) const {
  if (digits < 1) throw DomainError("digits must be >= 1");
  if (q_ == 0) {
    return digits == 1 ? "0" : "0." + std::string(static_cast<std::size_t>(digits - 1), '0');
  }
  const bool negative = q_ < 0;
  mpq_class a = abs(q_);

  // Find e with 10^(digits-1) <= a * 10^-e < 10^digits.
  long e = static_cast<long>(mpz_sizeinbase(a.get_num().get_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(a.get_den().get_mpz_t(), 10)) - (digits - 1) - 1;
  auto scaled = [&](long ex) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(ex < 0 ? -ex : ex));
    return ex < 0 ? mpq_class(a * p) : mpq_class(a / p);
  };
  mpz_class lo, hi;
  mpz_ui_pow_ui(lo.get_mpz_t(), 10, static_cast<unsigned long>(digits - 1));
  hi = lo * 10;
  mpq_class s = scaled(e);
  while (s >= hi) s = scaled(++e);
  while (s < lo) s = scaled(--e);

  mpz_class integer;
  mpz_fdiv_q(integer.get_mpz_t(), s.get_num().get_mpz_t(), s.get_den().get_mpz_t());
  mpq_class frac = s - integer;
  int c = cmp(frac, mpq_class(1, 2));
  if (c > 0 || (c == 0 && mpz_odd_p(integer.get_mpz_t()))) ++integer;
  if (integer == hi) {  // rounding carried into a new digit
    integer = lo;
    ++e;
  }
  std::string mant = integer.get_str();  // exactly `digits` characters
  const long pointPos = static_cast<long>(mant.size()) + e;  // digits before the decimal point
  const long exp10 = pointPos - 1;

  std::string out = negative ? "-" : "";
  if (exp10 >= -5 && exp10 < 15) {
    if (pointPos <= 0) {
      out += "0." + std::string(static_cast<std::size_t>(-pointPos), '0') + mant;
    } else if (pointPos >= static_cast<long>(mant.size())) {
      out += mant + std::string(static_cast<std::size_t>(pointPos - static_cast<long>(mant.size())), '0');
    } else {
      out += mant.substr(0, static_cast<std::size_t>(pointPos)) + "." + mant.substr(static_cast<std::size_t>(pointPos));
    }
  } else {
    out += mant.substr(0, 1);
    if (mant.size() > 1) out += "." + mant.substr(1);
    out += (exp10 < 0 ? "e-" : "e+");
    std::string ex = std::to_string(exp10 < 0 ? -exp10 : exp10);
    if (ex.size() < 2) ex = "0" + ex;
    out += ex;
  }
  return out;
}

}  // namespace chainrec
