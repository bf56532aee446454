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

// Random generation: marks, the height factor W, stick-breaking heights, three
// independent simulators of the chain-record count N_n, the Poisson-paced
// height process B_t, the limit variable Y and windows of the limit point
// process of (height, record time) pairs.
//
// Every sampler is a pure function of the RngStream it is handed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/record_core.hpp"
#include "chainrec/rng.hpp"

namespace chainrec {

namespace detail {

inline void requirePositiveDimension(unsigned d) {
  if (d == 0) throw InputError("dimension d must be >= 1");
}

inline void requireHorizon(std::uint64_t n) {
  if (n == 0) throw InputError("horizon n must be >= 1");
}

}  // namespace detail

/// Uniform mark in [0,1]^d.
inline Mark sampleMark(RngStream& rng, unsigned d) {
  detail::requirePositiveDimension(d);
  std::vector<double> c(d);
  for (double& x : c) x = rng.uniform();
  return Mark(std::move(c));
}

/// W = product of d independent uniforms.
inline double sampleW(RngStream& rng, unsigned d) {
  detail::requirePositiveDimension(d);
  double w = 1.0;
  for (unsigned i = 0; i < d; ++i) w *= rng.uniform();
  return w;
}

/// -log W, a Gamma(d,1) variate; no underflow for long stick-breaking runs.
inline double sampleLogFactor(RngStream& rng, unsigned d) {
  double s = 0.0;
  for (unsigned i = 0; i < d; ++i) s += rng.exponential();
  return s;
}

/// Decreasing heights H_1 > H_2 > ..., stored as -log H_k.
class HeightSequence {
 public:
  explicit HeightSequence(unsigned d) : d_(d) { detail::requirePositiveDimension(d); }

  unsigned dimension() const noexcept { return d_; }
  std::size_t size() const noexcept { return negLog_.size(); }
  bool empty() const noexcept { return negLog_.empty(); }

  /// H_{k+1}, 0-based.
  double operator[](std::size_t k) const { return std::exp(-negLog_[k]); }
  double negLogHeight(std::size_t k) const { return negLog_[k]; }
  std::span<const double> negLogHeights() const noexcept { return negLog_; }

  void pushNegLog(double v) { negLog_.push_back(v); }

  /// Appends H_{k+1} = H_k * W with a fresh factor.
  void extend(RngStream& rng) {
    const double prev = negLog_.empty() ? 0.0 : negLog_.back();
    negLog_.push_back(prev + sampleLogFactor(rng, d_));
  }

 private:
  unsigned d_;
  std::vector<double> negLog_;
};

/// Chain-record indices T_1 = 1 < T_2 < ... <= horizon and the heights h(R_k).
struct ChainRecordTrace {
  std::vector<std::uint64_t> recordTimes;
  HeightSequence heights;
  std::uint64_t horizon = 0;

  explicit ChainRecordTrace(unsigned d) : heights(d) {}

  /// N_m for m <= horizon.
  std::uint64_t countUpTo(std::uint64_t m) const {
    return static_cast<std::uint64_t>(std::upper_bound(recordTimes.begin(), recordTimes.end(), m) -
                                      recordTimes.begin());
  }
  std::uint64_t count() const noexcept { return recordTimes.size(); }
  bool recordAt(std::uint64_t m) const { return std::binary_search(recordTimes.begin(), recordTimes.end(), m); }
};

/// Samples n uniform marks and runs chain-record detection on them. O(nd).
/// When `marks` is non-null the sampled marks are appended to it.
inline ChainRecordTrace simulateDirect(RngStream& rng, unsigned d, std::uint64_t n,
                                       std::vector<Mark>* marks = nullptr) {
  detail::requirePositiveDimension(d);
  detail::requireHorizon(n);
  ChainRecordTrace trace(d);
  trace.horizon = n;
  ChainDetector detector;
  std::vector<double> x(d);
  for (std::uint64_t m = 1; m <= n; ++m) {
    for (double& c : x) c = rng.uniform();
    if (marks != nullptr) marks->emplace_back(x);
    if (detector.process(x)) {
      trace.recordTimes.push_back(m);
      double negLog = 0.0;
      for (double c : x) negLog -= std::log(c);
      trace.heights.pushNegLog(negLog);
    }
  }
  return trace;
}

/// Geometric variate on {1,2,...} with success probability exp(-negLogH),
/// by inversion: ceil(log U / log(1 - H)). Returns +inf past 2^63.
inline double sampleGeometricGap(RngStream& rng, double negLogH) {
  const double h = std::exp(-negLogH);
  const double logFail = std::log1p(-h);  // accurate for tiny h
  if (logFail == 0.0) return std::numeric_limits<double>::infinity();
  if (!std::isfinite(logFail)) return 1.0;  // h == 1
  return std::max(1.0, std::ceil(std::log(rng.uniform()) / logFail));
}

/// Sojourn simulator: T_1 = 1, H_k = W_1...W_k, and T_{k+1} - T_k geometric
/// with parameter H_k. Cost is proportional to the number of records.
inline ChainRecordTrace simulateSojourn(RngStream& rng, unsigned d, std::uint64_t n) {
  detail::requirePositiveDimension(d);
  detail::requireHorizon(n);
  ChainRecordTrace trace(d);
  trace.horizon = n;
  trace.recordTimes.push_back(1);
  trace.heights.extend(rng);
  double time = 1.0;
  const auto horizon = static_cast<double>(n);
  while (true) {
    const double gap = sampleGeometricGap(rng, trace.heights.negLogHeight(trace.heights.size() - 1));
    if (time + gap > horizon) break;
    time += gap;
    trace.recordTimes.push_back(static_cast<std::uint64_t>(time));
    trace.heights.extend(rng);
  }
  return trace;
}

/// Joint outcome of the insertion construction on U_1..U_n.
struct InsertionRun {
  std::uint64_t records = 0;          // N_n: how many of U_1..U_n were replaced
  std::uint64_t renewalCount = 0;     // K_n = max{k : H_k > 1/n}
  std::uint64_t belowReciprocal = 0;  // number of raw U_1..U_n smaller than 1/n
};

/// Screens i.i.d. uniforms; U_1 is replaced by H_1 and, with k heights
/// inserted, the first later U_j < H_k is replaced by H_{k+1}. Also reports
/// K_n and the count of raw uniforms below 1/n from the same realisation.
inline InsertionRun simulateInsertionRun(RngStream& rng, unsigned d, std::uint64_t n) {
  detail::requirePositiveDimension(d);
  detail::requireHorizon(n);
  InsertionRun run;
  HeightSequence heights(d);
  heights.extend(rng);
  double threshold = heights[0];
  const double reciprocal = 1.0 / static_cast<double>(n);
  run.records = 1;
  if (rng.uniform() < reciprocal) ++run.belowReciprocal;  // U_1, replaced regardless
  for (std::uint64_t j = 2; j <= n; ++j) {
    const double u = rng.uniform();
    if (u < reciprocal) ++run.belowReciprocal;
    if (u < threshold) {
      ++run.records;
      heights.extend(rng);
      threshold = heights[heights.size() - 1];
    }
  }
  const double logN = std::log(static_cast<double>(n));
  while (heights.negLogHeight(heights.size() - 1) < logN) heights.extend(rng);
  for (std::size_t k = 0; k < heights.size() && heights.negLogHeight(k) < logN; ++k) ++run.renewalCount;
  return run;
}

inline std::uint64_t simulateInsertion(RngStream& rng, unsigned d, std::uint64_t n) {
  return simulateInsertionRun(rng, d, n).records;
}

/// K_n = max{k : H_k > 1/n} from the trace's heights. Throws if the heights
/// do not yet reach down to 1/n.
inline std::uint64_t renewalCount(const ChainRecordTrace& trace, std::uint64_t n) {
  detail::requireHorizon(n);
  const double logN = std::log(static_cast<double>(n));
  const auto& h = trace.heights;
  if (h.empty() || h.negLogHeight(h.size() - 1) < logN) {
    throw InputError("trace heights stop above 1/n; extend the stick-breaking sequence first");
  }
  std::uint64_t k = 0;
  while (k < h.size() && h.negLogHeight(k) < logN) ++k;
  return k;
}

/// Extends the trace's heights (not its record times) below 1/n, then counts.
inline std::uint64_t renewalCount(ChainRecordTrace& trace, std::uint64_t n, RngStream& rng) {
  detail::requireHorizon(n);
  const double logN = std::log(static_cast<double>(n));
  while (trace.heights.empty() || trace.heights.negLogHeight(trace.heights.size() - 1) < logN) {
    trace.heights.extend(rng);
  }
  return renewalCount(std::as_const(trace), n);
}

/// Path of the height process on [0, horizon]: holds in state b for an
/// exponential time of rate b, then jumps to b W.
struct PoissonPacedPath {
  double initial = 1.0;
  double horizon = 0.0;
  std::vector<double> jumpTimes;
  std::vector<double> heightsAfterJump;

  /// Right-continuous state B_t for 0 <= t <= horizon.
  double stateAt(double t) const {
    auto it = std::upper_bound(jumpTimes.begin(), jumpTimes.end(), t);
    if (it == jumpTimes.begin()) return initial;
    return heightsAfterJump[static_cast<std::size_t>(it - jumpTimes.begin()) - 1];
  }
  std::uint64_t jumpsUpTo(double t) const {
    return static_cast<std::uint64_t>(std::upper_bound(jumpTimes.begin(), jumpTimes.end(), t) - jumpTimes.begin());
  }
  std::uint64_t jumpCount() const noexcept { return jumpTimes.size(); }
  double finalState() const { return heightsAfterJump.empty() ? initial : heightsAfterJump.back(); }

  /// Integral of B_s over [0, t].
  double integral(double t) const {
    double acc = 0.0, last = 0.0, state = initial;
    for (std::size_t i = 0; i < jumpTimes.size() && jumpTimes[i] <= t; ++i) {
      acc += state * (jumpTimes[i] - last);
      last = jumpTimes[i];
      state = heightsAfterJump[i];
    }
    return acc + state * (t - last);
  }
};

inline PoissonPacedPath simulatePoissonPaced(RngStream& rng, unsigned d, double horizon, double initial = 1.0) {
  detail::requirePositiveDimension(d);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon t must be finite and > 0");
  if (!(initial > 0.0) || !std::isfinite(initial)) throw InputError("initial state must be finite and > 0");
  PoissonPacedPath path;
  path.initial = initial;
  path.horizon = horizon;
  double t = 0.0, b = initial;
  while (true) {
    t += rng.exponential() / b;
    if (t > horizon) break;
    b *= sampleW(rng, d);
    path.jumpTimes.push_back(t);
    path.heightsAfterJump.push_back(b);
  }
  return path;
}

/// Stationary factor W_0 with density P(W <= s) / (s d): -log W_0 is
/// Gamma(k,1) with k uniform on {1..d}.
inline double sampleW0(RngStream& rng, unsigned d) {
  detail::requirePositiveDimension(d);
  const auto k = 1 + rng.below(d);
  double g = 0.0;
  for (std::uint64_t i = 0; i < k; ++i) g += rng.exponential();
  return std::exp(-g);
}

struct YSample {
  double value = 0.0;
  std::uint64_t terms = 0;  // factors W_1..W_k* used after W_0
};

/// Y = E_0 W_0 + sum_{k>=1} E_k W_0 W_1...W_k, stopped once the expected
/// remaining tail, P_k g(1)/(1 - g(1)), falls below `tolerance`.
inline YSample sampleY(RngStream& rng, unsigned d, double tolerance = 1e-12) {
  detail::requirePositiveDimension(d);
  if (!(tolerance > 0.0)) throw InputError("tolerance must be > 0");
  const double g1 = std::ldexp(1.0, -static_cast<int>(d));
  const double tailFactor = g1 / (1.0 - g1);
  YSample y;
  double product = sampleW0(rng, d);
  y.value = rng.exponential() * product;
  while (product * tailFactor >= tolerance) {
    product *= sampleW(rng, d);
    y.value += rng.exponential() * product;
    ++y.terms;
  }
  return y;
}

/// Y for d = 2 as E U.
inline double sampleYProductForm(RngStream& rng) { return rng.exponential() * rng.uniform(); }

struct LimitWindow {
  double sLo = 0.0;
  double sHi = 0.0;
  double tHi = 0.0;

  bool contains(double xi, double sigma) const { return xi >= sLo && xi <= sHi && sigma <= tHi; }
  /// Image under (s,t) -> (b s, t / b).
  LimitWindow hyperbolicShift(double b) const { return {sLo * b, sHi * b, tHi / b}; }
};

struct LimitPoint {
  std::int64_t k = 0;  // xi_0 is the largest point <= 1
  double xi = 0.0;
  double sigma = 0.0;
};

struct LimitProcessWindow {
  LimitWindow window;
  double truncationTol = 0.0;
  std::vector<LimitPoint> points;  // increasing k, i.e. decreasing xi
};

/// Points (xi_k, sigma_k) of the limit process with xi_k >= `xiFloor`, where
/// {xi_k} is the multiplicatively stationary renewal set with factor W and
/// sigma_k = sum_{i<=k} E_i / xi_i. The sum over i -> -inf is cut once the
/// expected remainder (1/xi_i) g(1)/(1 - g(1)) drops below `truncationTol`
/// and xi_i exceeds `xiCeiling`.
///
/// In log scale the renewal set is stationary, so the gap straddling 1 is
/// size-biased: its length is Gamma(d+1,1) and 1 splits it uniformly.
inline std::vector<LimitPoint> sampleLimitSkeleton(RngStream& rng, unsigned d, double xiFloor, double xiCeiling,
                                                   double truncationTol) {
  detail::requirePositiveDimension(d);
  if (!(truncationTol > 0.0)) throw InputError("truncation tolerance must be > 0");
  if (!(xiFloor > 0.0) || !(xiCeiling >= xiFloor)) throw InputError("window must satisfy 0 < s_lo <= s_hi");
  const double g1 = std::ldexp(1.0, -static_cast<int>(d));
  const double tailFactor = g1 / (1.0 - g1);

  double straddle = 0.0;
  for (unsigned i = 0; i <= d; ++i) straddle += rng.exponential();
  const double below = rng.uniform() * straddle;  // -log xi_0

  // Upward: log xi_0, log xi_{-1}, ...
  std::vector<double> up{-below, -below + straddle};
  double logXi = up.back();
  while (std::exp(-logXi) * tailFactor >= truncationTol || std::exp(logXi) <= xiCeiling) {
    logXi += sampleLogFactor(rng, d);
    up.push_back(logXi);
  }
  // Arrival times accumulate from the largest generated point downwards.
  std::vector<LimitPoint> points;
  double sigma = 0.0;
  for (std::size_t i = up.size(); i-- > 0;) {
    const double xi = std::exp(up[i]);
    sigma += rng.exponential() / xi;
    points.push_back({-static_cast<std::int64_t>(i), xi, sigma});
  }
  // Downward: xi_1, xi_2, ... until below the floor.
  double logDown = up.front();
  for (std::int64_t k = 1;; ++k) {
    logDown -= sampleLogFactor(rng, d);
    const double xi = std::exp(logDown);
    if (xi < xiFloor) break;
    sigma += rng.exponential() / xi;
    points.push_back({k, xi, sigma});
  }
  return points;
}

/// All points of the limit process inside `window`.
inline LimitProcessWindow sampleLimitProcess(RngStream& rng, unsigned d, const LimitWindow& window,
                                             double truncationTol) {
  if (!(window.tHi > 0.0)) throw InputError("window time bound must be > 0");
  LimitProcessWindow out{window, truncationTol, {}};
  for (const auto& p : sampleLimitSkeleton(rng, d, window.sLo, window.sHi, truncationTol)) {
    if (window.contains(p.xi, p.sigma)) out.points.push_back(p);
  }
  return out;
}

}  // namespace chainrec
