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

// Closed forms and series for record probabilities, expected record counts,
// the moments m_beta(t) = E[B_t^beta] of the Poisson-paced height process,
// and the moments of its scaling limit Y.
//
// Alternating binomial sums are evaluated in exact rationals only; the series
// in a real argument t is evaluated with MPFR at a working precision derived
// from the largest term t^k/k!.

#include <gmp.h>
#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/rational.hpp"

namespace chainrec {

struct ExactLimits {
  std::uint32_t nCap = 500;             // largest n for the alternating sums
  std::uint32_t digitCeiling = 10'000;  // largest MPFR working precision, decimal digits
};

namespace detail {

inline void requireDimension(unsigned d) {
  if (d == 0) throw InputError("dimension d must be >= 1");
}

inline void requireIndex(std::uint64_t n, const ExactLimits& limits) {
  if (n == 0) throw InputError("index n must be >= 1");
  if (n > limits.nCap) {
    throw CapExceeded("n = " + std::to_string(n) + " exceeds the exact-arithmetic cap " +
                      std::to_string(limits.nCap) + "; increase the cap");
  }
}

inline mpz_class pow(const mpz_class& base, unsigned e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// Sum_{k<n} C(n-1,k) (-1)^k A_k for every n in 1..A.size(), divided by den.
inline std::vector<ExactRational> alternatingBinomialSums(const std::vector<mpz_class>& a, const mpz_class& den) {
  std::vector<ExactRational> out;
  out.reserve(a.size());
  for (std::size_t n = 1; n <= a.size(); ++n) {
    const std::size_t m = n - 1;
    mpz_class binom = 1, acc = 0;
    for (std::size_t k = 0; k <= m; ++k) {
      if (k % 2 == 0) acc += binom * a[k];
      else acc -= binom * a[k];
      binom *= static_cast<unsigned long>(m - k);
      mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(k + 1));
    }
    out.emplace_back(acc, den);
  }
  return out;
}

// Owning MPFR scalar.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  ~BigFloat() { mpfr_clear(v_); }
  BigFloat(const BigFloat&) = delete;
  BigFloat& operator=(const BigFloat&) = delete;
  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace detail

/// Mellin transform of the height factor W (product of d uniforms):
/// g(lambda) = E[W^lambda] = (lambda + 1)^-d.
inline ExactRational mellin(unsigned d, const ExactRational& lambda) {
  detail::requireDimension(d);
  ExactRational base = lambda + ExactRational(1);
  if (base == ExactRational(0)) throw DomainError("g has a pole at lambda = -1");
  mpq_class inv = 1 / base.raw();
  mpz_class num = detail::pow(inv.get_num(), d), den = detail::pow(inv.get_den(), d);
  return ExactRational(num, den);
}

class MellinTransform {
 public:
  explicit MellinTransform(unsigned d) : d_(d) { detail::requireDimension(d); }
  unsigned dimension() const noexcept { return d_; }
  double operator()(double lambda) const { return std::pow(lambda + 1.0, -static_cast<double>(d_)); }
  ExactRational exact(const ExactRational& lambda) const { return mellin(d_, lambda); }
  // Logarithmic moments of W: mu = -g'(0) and sigma^2 = g''(0) - g'(0)^2, both equal to d.
  double mu() const noexcept { return d_; }
  double sigma2() const noexcept { return d_; }

 private:
  unsigned d_;
};

/// p_1..p_nMax: probability of a chain record at index n,
///   p_n = sum_{k<n} C(n-1,k) (-1)^k prod_{j<k} (1 - g(j+1)).
inline std::vector<ExactRational> chainRecordProbs(unsigned d, std::uint64_t nMax, const ExactLimits& limits = {}) {
  detail::requireDimension(d);
  detail::requireIndex(nMax, limits);
  // prod_{j<k} (1 - (j+2)^-d) = N_k / ((k+1)!)^d, put over the common
  // denominator (nMax!)^d.
  std::vector<mpz_class> a(nMax);
  mpz_class numer = 1;
  for (std::uint64_t k = 0; k < nMax; ++k) {
    a[k] = numer;
    numer *= detail::pow(mpz_class(static_cast<unsigned long>(k + 2)), d) - 1;
  }
  // a[k] currently holds N_k; scale by prod_{j=k}^{nMax-2} (j+2)^d, built backwards.
  mpz_class scale = 1;
  for (std::uint64_t k = nMax; k-- > 0;) {
    a[k] *= scale;
    if (k >= 1) scale *= detail::pow(mpz_class(static_cast<unsigned long>(k + 1)), d);
  }
  mpz_class den = scale;  // ((nMax)!)^d
  return detail::alternatingBinomialSums(a, den);
}

inline ExactRational chainRecordProb(unsigned d, std::uint64_t n, const ExactLimits& limits = {}) {
  return chainRecordProbs(d, n, limits).back();
}

/// Strong-record probability n^-d = g(n-1).
inline ExactRational strongRecordProb(unsigned d, std::uint64_t n) {
  detail::requireDimension(d);
  if (n == 0) throw InputError("index n must be >= 1");
  return ExactRational(mpz_class(1), detail::pow(mpz_class(static_cast<unsigned long>(n)), d));
}

/// Weak-record probabilities sum_{k<n} C(n-1,k) (-1)^k g(k), n = 1..nMax.
inline std::vector<ExactRational> weakRecordProbs(unsigned d, std::uint64_t nMax, const ExactLimits& limits = {}) {
  detail::requireDimension(d);
  detail::requireIndex(nMax, limits);
  mpz_class lcm = 1;
  for (std::uint64_t j = 2; j <= nMax; ++j) mpz_lcm_ui(lcm.get_mpz_t(), lcm.get_mpz_t(), static_cast<unsigned long>(j));
  const mpz_class den = detail::pow(lcm, d);
  std::vector<mpz_class> a(nMax);
  for (std::uint64_t k = 0; k < nMax; ++k) {
    mpz_divexact(a[k].get_mpz_t(), den.get_mpz_t(),
                 detail::pow(mpz_class(static_cast<unsigned long>(k + 1)), d).get_mpz_t());
  }
  return detail::alternatingBinomialSums(a, den);
}

inline ExactRational weakRecordProb(unsigned d, std::uint64_t n, const ExactLimits& limits = {}) {
  return weakRecordProbs(d, n, limits).back();
}

/// E[strong count among n marks] = sum_{j<=n} j^-d.
inline ExactRational expectedStrongCount(unsigned d, std::uint64_t n, const ExactLimits& limits = {}) {
  detail::requireDimension(d);
  detail::requireIndex(n, limits);
  mpq_class sum = 0;
  for (std::uint64_t j = 1; j <= n; ++j) sum += strongRecordProb(d, j).raw();
  return ExactRational(sum);
}

/// E[weak count among m marks] for m = 1..nMax: the sum over
/// 1 <= j_1 <= ... <= j_d <= m of 1/(j_1...j_d), via the iterated harmonic
/// recursion S_1(j) = H_j, S_i(m) = sum_{j<=m} S_{i-1}(j)/j.
inline std::vector<ExactRational> expectedWeakCounts(unsigned d, std::uint64_t nMax, const ExactLimits& limits = {}) {
  detail::requireDimension(d);
  detail::requireIndex(nMax, limits);
  std::vector<mpq_class> s(nMax + 1, 1);  // S_0 = 1 makes S_1 the harmonic numbers
  s[0] = 0;
  for (unsigned i = 1; i <= d; ++i) {
    mpq_class acc = 0;
    for (std::uint64_t j = 1; j <= nMax; ++j) {
      acc += s[j] / static_cast<unsigned long>(j);
      s[j] = acc;
    }
  }
  std::vector<ExactRational> out;
  out.reserve(nMax);
  for (std::uint64_t j = 1; j <= nMax; ++j) out.emplace_back(s[j]);
  return out;
}

inline ExactRational expectedWeakCount(unsigned d, std::uint64_t n, const ExactLimits& limits = {}) {
  return expectedWeakCounts(d, n, limits).back();
}

/// E[chain count among n marks] = p_1 + ... + p_n.
inline ExactRational expectedChainCount(unsigned d, std::uint64_t n, const ExactLimits& limits = {}) {
  mpq_class sum = 0;
  for (const auto& p : chainRecordProbs(d, n, limits)) sum += p.raw();
  return ExactRational(sum);
}

/// Decimal digits the series for m_beta(t) needs to reach `tolerance`.
inline std::uint32_t momentSeriesDigits(double t, double tolerance) {
  double maxLog10 = 0.0;  // log10 max_k t^k/k!
  if (t >= 1.0) {
    const double k = std::floor(t);
    maxLog10 = std::max(0.0, (k * std::log(t) - std::lgamma(k + 1.0)) / std::log(10.0));
  }
  const double digits = std::ceil(maxLog10) + std::ceil(-std::log10(tolerance)) + 10.0;
  return static_cast<std::uint32_t>(std::max(30.0, digits));
}

/// m_beta(t) = sum_k (-t)^k/k! prod_{j<k} (1 - g(j+beta)), to absolute
/// accuracy `tolerance`.
inline double momentSeries(unsigned d, unsigned beta, double t, double tolerance = 1e-15,
                           const ExactLimits& limits = {}) {
  detail::requireDimension(d);
  if (beta == 0) throw InputError("beta must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("t must be finite and >= 0");
  if (!(tolerance > 0.0)) throw InputError("tolerance must be > 0");
  const std::uint32_t digits = momentSeriesDigits(t, tolerance);
  if (digits > limits.digitCeiling) {
    throw CapExceeded("m_beta(" + std::to_string(t) + ") needs " + std::to_string(digits) +
                      " digits, above the ceiling " + std::to_string(limits.digitCeiling) +
                      "; use the asymptotic form t^-beta E[Y^beta] (limitMoment) instead");
  }
  const auto bits = static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 16;
  detail::BigFloat sum(bits), mag(bits), coef(bits), term(bits), factor(bits), tt(bits);
  mpfr_set_d(tt.get(), t, MPFR_RNDN);
  mpfr_set_ui(mag.get(), 1, MPFR_RNDN);   // t^k / k!
  mpfr_set_ui(coef.get(), 1, MPFR_RNDN);  // prod_{j<k} (1 - g(j+beta))
  const double stopBelow = tolerance / 4.0;
  for (std::uint64_t k = 0;; ++k) {
    mpfr_mul(term.get(), mag.get(), coef.get(), MPFR_RNDN);
    if (k % 2 == 0) mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    else mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);

    mpfr_mul(mag.get(), mag.get(), tt.get(), MPFR_RNDN);
    mpfr_div_ui(mag.get(), mag.get(), static_cast<unsigned long>(k + 1), MPFR_RNDN);
    // coef *= 1 - (k + beta + 1)^-d
    mpfr_set_ui(factor.get(), static_cast<unsigned long>(k + beta + 1), MPFR_RNDN);
    mpfr_pow_ui(factor.get(), factor.get(), d, MPFR_RNDN);
    mpfr_ui_div(factor.get(), 1, factor.get(), MPFR_RNDN);
    mpfr_ui_sub(factor.get(), 1, factor.get(), MPFR_RNDN);
    mpfr_mul(coef.get(), coef.get(), factor.get(), MPFR_RNDN);

    // Past k = 2t the magnitudes fall by at least half per step, so the tail
    // is bounded by twice the next magnitude.
    if (static_cast<double>(k + 1) > 2.0 * t && mpfr_cmp_d(mag.get(), stopBelow) < 0) break;
  }
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

/// E[Y^beta] = (beta!)^(d+1) / (beta d) * prod_{r=2}^beta 1/(r^d - 1), the
/// limit of t^beta m_beta(t).
inline ExactRational limitMoment(unsigned d, unsigned beta) {
  detail::requireDimension(d);
  if (beta == 0) throw InputError("beta must be >= 1");
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), beta);
  mpz_class num = detail::pow(fact, d + 1);
  mpz_class den = mpz_class(static_cast<unsigned long>(beta)) * d;
  for (unsigned r = 2; r <= beta; ++r) den *= detail::pow(mpz_class(r), d) - 1;
  return ExactRational(num, den);
}

namespace detail {
inline void requireUnitInterval(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("s must lie in (0,1]");
}
}  // namespace detail

/// Density of W, (-log s)^(d-1) / (d-1)!.
inline double densityW(unsigned d, double s) {
  detail::requireDimension(d);
  detail::requireUnitInterval(s);
  return std::pow(-std::log(s), static_cast<double>(d - 1)) / std::tgamma(static_cast<double>(d));
}

/// P(W <= s) = s * sum_{i<d} (-log s)^i / i!.
inline double cdfW(unsigned d, double s) {
  detail::requireDimension(d);
  detail::requireUnitInterval(s);
  const double x = -std::log(s);
  double term = 1.0, sum = 1.0;
  for (unsigned i = 1; i < d; ++i) {
    term *= x / i;
    sum += term;
  }
  return std::min(1.0, s * sum);
}

/// Stationary density of the stick-breaking process, P(W <= s) / (s d).
inline double stationaryDensity(unsigned d, double s) { return cdfW(d, s) / (s * d); }

}  // namespace chainrec
