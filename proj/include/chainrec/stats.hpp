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

// Monte Carlo estimation with standard errors, two-sample distribution
// tests, shape diagnostics for the chain-record count, and least-squares
// slopes against log n.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/parallel.hpp"
#include "chainrec/rng.hpp"

namespace chainrec {

struct ExperimentSummary {
  std::string estimator;
  double value = 0.0;
  std::optional<double> stdError;  // empty for a single replicate
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;
};

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excessKurtosis = 0.0;
};

inline SampleMoments sampleMoments(std::span<const double> x) {
  if (x.empty()) throw InputError("empty sample");
  const auto n = static_cast<double>(x.size());
  SampleMoments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double c = v - m.mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = x.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excessKurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

/// Mean and standard error (sample sd / sqrt(n)) of `samples`.
inline ExperimentSummary summarize(std::string estimator, std::span<const double> samples, std::uint64_t seed,
                                   std::map<std::string, std::string> params = {}) {
  if (samples.empty()) throw InputError("no replicates to summarise");
  const SampleMoments m = sampleMoments(samples);
  ExperimentSummary s{std::move(estimator), m.mean, std::nullopt, samples.size(), seed, std::move(params)};
  if (samples.size() >= 2) s.stdError = std::sqrt(m.variance / static_cast<double>(samples.size()));
  return s;
}

/// Canonical stream tag "name|k1=v1|k2=v2" (params in key order).
inline std::string experimentTag(std::string_view name, const std::map<std::string, std::string>& params) {
  std::string tag(name);
  for (const auto& [k, v] : params) tag += "|" + k + "=" + v;
  return tag;
}

/// Runs `sampler(rng)` once per replicate, replicate i drawing from
/// RngStream(seed, deriveStreamId(tag, i)).
template <class Sampler>
std::vector<double> collect(Sampler&& sampler, std::uint64_t replicates, std::uint64_t seed, std::string_view tag,
                            unsigned workers = 1) {
  return runReplicates(replicates, workers, [&](std::size_t i) {
    RngStream rng(seed, deriveStreamId(tag, i));
    return static_cast<double>(sampler(rng));
  });
}

template <class Sampler>
ExperimentSummary estimate(std::string estimator, Sampler&& sampler, std::uint64_t replicates, std::uint64_t seed,
                           unsigned workers = 1, std::map<std::string, std::string> params = {}) {
  if (replicates < 2) throw InputError("estimate needs at least 2 replicates");
  const auto samples = collect(sampler, replicates, seed, experimentTag(estimator, params), workers);
  return summarize(std::move(estimator), samples, seed, std::move(params));
}

struct TwoSampleResult {
  bool reject = false;
  double statistic = 0.0;
  double pValue = 1.0;
  std::size_t degreesOfFreedom = 0;  // chi-square only
  std::string method;
};

namespace detail {

inline void requireSamples(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("two-sample test needs two nonempty samples");
}

inline void requireSignificance(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("significance must lie in (0,1)");
}

inline bool allIntegers(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v) && v == std::floor(v); });
}

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorovSurvival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace detail

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline TwoSampleResult ksTwoSample(std::span<const double> a, std::span<const double> b, double alpha) {
  detail::requireSamples(a, b);
  detail::requireSignificance(alpha);
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    dmax = std::max(dmax, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  TwoSampleResult r;
  r.method = "kolmogorov-smirnov";
  r.statistic = dmax;
  r.pValue = detail::kolmogorovSurvival((en + 0.12 + 0.11 / en) * dmax);
  r.reject = r.pValue < alpha;
  return r;
}

/// Chi-square homogeneity test on a 2 x B table of integer values. Adjacent
/// values are pooled until every expected cell count is at least 5.
inline TwoSampleResult chiSquareTwoSample(std::span<const double> a, std::span<const double> b, double alpha) {
  detail::requireSamples(a, b);
  detail::requireSignificance(alpha);
  std::map<double, std::pair<double, double>> table;
  for (double v : a) table[v].first += 1.0;
  for (double v : b) table[v].second += 1.0;
  const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double total = na + nb;

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> open{0.0, 0.0};
  auto expectedOk = [&](const std::pair<double, double>& c) {
    const double col = c.first + c.second;
    return std::min(na, nb) * col / total >= 5.0;
  };
  for (const auto& [value, counts] : table) {
    open.first += counts.first;
    open.second += counts.second;
    if (expectedOk(open)) {
      bins.push_back(open);
      open = {0.0, 0.0};
    }
  }
  if (open.first + open.second > 0.0) {
    if (bins.empty()) bins.push_back(open);
    else {
      bins.back().first += open.first;
      bins.back().second += open.second;
    }
  }

  TwoSampleResult r;
  r.method = "chi-square";
  if (bins.size() < 2) return r;  // a single pooled category carries no evidence
  double stat = 0.0;
  for (const auto& [ca, cb] : bins) {
    const double col = ca + cb;
    const double ea = na * col / total, eb = nb * col / total;
    stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  r.statistic = stat;
  r.degreesOfFreedom = bins.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.degreesOfFreedom));
  r.pValue = boost::math::cdf(boost::math::complement(dist, stat));
  r.reject = r.pValue < alpha;
  return r;
}

/// Chi-square on pooled bins for integer-valued data, Kolmogorov-Smirnov otherwise.
inline TwoSampleResult twoSampleTest(std::span<const double> a, std::span<const double> b, double alpha) {
  detail::requireSamples(a, b);
  if (detail::allIntegers(a) && detail::allIntegers(b)) return chiSquareTwoSample(a, b, alpha);
  return ksTwoSample(a, b, alpha);
}

/// Shape of the chain-record count N_n around its log-n asymptotics.
struct CltDiagnostics {
  double meanOverLogN = 0.0;
  double varOverLogN = 0.0;
  double skewness = 0.0;
  double excessKurtosis = 0.0;
  double ksDistanceToFittedNormal = 0.0;
};

inline CltDiagnostics cltDiagnostics(std::span<const double> samples, unsigned d, std::uint64_t n) {
  if (d == 0) throw InputError("dimension d must be >= 1");
  if (n < 1000) throw InputError("CLT diagnostics need n >= 1000");
  if (samples.size() < 1000) throw InputError("CLT diagnostics need at least 1000 replicates");
  const SampleMoments m = sampleMoments(samples);
  if (!(m.variance > 0.0)) throw InputError("degenerate sample: zero variance");
  const double logN = std::log(static_cast<double>(n));
  CltDiagnostics c{m.mean / logN, m.variance / logN, m.skewness, m.excessKurtosis, 0.0};

  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const boost::math::normal normal(m.mean, std::sqrt(m.variance));
  const auto size = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double f = boost::math::cdf(normal, x[i]);
    c.ksDistanceToFittedNormal = std::max({c.ksDistanceToFittedNormal, std::abs(static_cast<double>(j) / size - f),
                                           std::abs(static_cast<double>(i) / size - f)});
    i = j;
  }
  return c;
}

/// Least-squares slope of y on x for (x, y) = (log n, statistic) pairs; needs
/// at least 4 points spanning two decades of n.
inline double regressionSlope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 4) throw InputError("regression needs at least 4 grid points");
  double lo = pairs.front().first, hi = lo;
  for (const auto& [x, y] : pairs) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (hi - lo < 2.0 * std::log(10.0) - 1e-12) throw InputError("grid must span at least two decades of n");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pairs.size());
  my /= static_cast<double>(pairs.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pairs) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

}  // namespace chainrec
