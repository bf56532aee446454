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

// The acceptance battery behind `chainrec verify`. Every tolerance, replicate
// count and significance level below is fixed; nothing is calibrated at run
// time. Criteria are grouped into suites:
//
//   exact       1-5   rational identities and series checks (seconds)
//   oracle      6-9, 11, 12   Monte Carlo against exact values and against
//               each other (minutes)
//   asymptotic  10    log-n regression slopes (minutes)

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "chainrec/exact_engine.hpp"
#include "chainrec/experiments.hpp"
#include "chainrec/record_core.hpp"
#include "chainrec/report.hpp"
#include "chainrec/samplers.hpp"
#include "chainrec/stats.hpp"

namespace chainrec {

struct AcceptanceOptions {
  std::uint64_t seed = 20061016;
  unsigned workers = 0;
};

inline constexpr double kSigmaBand = 4.0;     // Monte Carlo agreement, in standard errors
inline constexpr double kSignificance = 0.01;  // before Bonferroni correction

/// |estimate - target| / stdError; zero error demands exact agreement.
inline double zScore(double estimate, double stdError, double target) {
  if (stdError == 0.0) return estimate == target ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(estimate - target) / stdError;
}

/// e^-t sum_{n<=N} t^n/n! p_{n+1}, with N chosen so the Poisson(t) tail
/// beyond N is below 1e-12.
inline double poissonisedChainProb(unsigned d, double t, const std::vector<ExactRational>& p) {
  double weight = std::exp(-t), cumulative = 0.0, sum = 0.0;
  for (std::size_t n = 0;; ++n) {
    if (n + 1 > p.size()) throw CapExceeded("not enough p_n terms for the Poisson tail");
    sum += weight * p[n].toDouble();
    cumulative += weight;
    if (1.0 - cumulative < 1e-12 && static_cast<double>(n) > t) break;
    weight *= t / static_cast<double>(n + 1);
  }
  (void)d;
  return sum;
}

/// m_beta'(t) + m_beta(t) - E[W^beta m_beta(tW)], the derivative by a central
/// difference and the expectation by Gauss-Kronrod quadrature in u = -log s.
inline double renewalResidual(unsigned d, unsigned beta, double t) {
  auto m = [&](double x) { return momentSeries(d, beta, x, 1e-15); };
  const double h = 1e-4;
  const double derivative = (m(t + h) - m(t - h)) / (2.0 * h);
  const double norm = std::tgamma(static_cast<double>(d));
  auto integrand = [&](double u) {
    return std::exp(-(beta + 1.0) * u) * m(t * std::exp(-u)) * std::pow(u, d - 1.0) / norm;
  };
  const double expectation = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
  return derivative + m(t) - expectation;
}

namespace detail {

inline std::string fmt(double v) { return formatDouble(v); }

inline CriterionResult makeCriterion(int id, std::string name, std::string oracle) {
  CriterionResult c;
  c.id = id;
  c.name = std::move(name);
  c.oracle = std::move(oracle);
  return c;
}

inline std::vector<double> chainCounts(Method method, unsigned d, std::uint64_t n, std::uint64_t replicates,
                                       const AcceptanceOptions& o) {
  SimulationRequest r;
  r.quantity = Quantity::ChainCount;
  r.method = method;
  r.d = d;
  r.n = n;
  r.replicates = replicates;
  r.seed = o.seed;
  r.workers = o.workers;
  return simulateSamples(r);
}

inline CriterionResult criterion1() {
  CriterionResult c = makeCriterion(1, "chain-record probability closed forms for d=1,2", "exact rational arithmetic vs 1/n and 1/(2n)");
  int mismatches = 0;
  const auto p1 = chainRecordProbs(1, 200), p2 = chainRecordProbs(2, 200);
  for (long n = 2; n <= 200; ++n) {
    mismatches += p1[n - 1] != ExactRational::fraction(1, n);
    mismatches += p2[n - 1] != ExactRational::fraction(1, 2 * n);
  }
  mismatches += p1[0] != ExactRational(1);
  mismatches += p2[0] != ExactRational(1);
  c.value = mismatches;
  c.pass = mismatches == 0;
  c.detail = "n=2..200, mismatches=" + std::to_string(mismatches);
  return c;
}

inline CriterionResult criterion2(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(2, "p_2 = 2^-d exactly; Monte Carlo P(X_2 < X_1) at d=3",
                    "g(1) = 2^-d; Monte Carlo within 4 SE of 1/8");
  int mismatches = 0;
  for (unsigned d = 1; d <= 6; ++d) mismatches += chainRecordProb(d, 2) != ExactRational(mpz_class(1), mpz_class(1) << d);
  const auto s = estimate(
      "p2-monte-carlo",
      [](RngStream& rng) {
        const Mark x1 = sampleMark(rng, 3), x2 = sampleMark(rng, 3);
        return dominates(x2, x1) ? 1.0 : 0.0;
      },
      100'000, o.seed, o.workers, {{"d", "3"}});
  const double z = zScore(s.value, *s.stdError, 0.125);
  c.value = z;
  c.target = 0.0;
  c.tolerance = kSigmaBand;
  c.pass = mismatches == 0 && z <= kSigmaBand;
  c.detail = "exact mismatches d=1..6: " + std::to_string(mismatches) + "; estimate=" + fmt(s.value) +
             " se=" + fmt(*s.stdError) + " z=" + fmt(z);
  return c;
}

inline CriterionResult criterion3() {
  CriterionResult c = makeCriterion(3, "strong <= chain <= weak record probabilities", "exact rational comparison, n<=100, d<=5");
  int violations = 0;
  for (unsigned d = 1; d <= 5; ++d) {
    const auto chain = chainRecordProbs(d, 100), weak = weakRecordProbs(d, 100);
    for (std::uint64_t n = 1; n <= 100; ++n) {
      const auto strong = strongRecordProb(d, n);
      violations += !(strong <= chain[n - 1] && chain[n - 1] <= weak[n - 1]);
    }
  }
  c.value = violations;
  c.pass = violations == 0;
  c.detail = "violations=" + std::to_string(violations);
  return c;
}

inline CriterionResult criterion4() {
  CriterionResult c = makeCriterion(4, "poissonisation identity", "series m_1(t) vs e^-t sum t^n/n! p_{n+1} from exact p_n");
  c.target = 0.0;
  c.tolerance = 1e-10;
  double worst = 0.0;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 3; ++d) {
    const auto p = chainRecordProbs(d, 80);
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      const double err = std::abs(momentSeries(d, 1, t, 1e-15) - poissonisedChainProb(d, t, p));
      worst = std::max(worst, err);
      detail << "d=" << d << ",t=" << fmt(t) << ":" << fmt(err) << " ";
    }
  }
  c.value = worst;
  c.pass = worst < c.tolerance;
  c.detail = detail.str();
  return c;
}

inline CriterionResult criterion5() {
  CriterionResult c = makeCriterion(5, "renewal-type equation residual", "finite-difference derivative and quadrature of E[W^b m_b(tW)]");
  c.target = 0.0;
  c.tolerance = 1e-6;
  double worst = 0.0;
  std::ostringstream detail;
  for (unsigned beta = 1; beta <= 2; ++beta) {
    for (unsigned d = 1; d <= 2; ++d) {
      for (double t : {0.5, 1.0, 2.0}) {
        const double r = std::abs(renewalResidual(d, beta, t));
        worst = std::max(worst, r);
        detail << "b=" << beta << ",d=" << d << ",t=" << fmt(t) << ":" << fmt(r) << " ";
      }
    }
  }
  c.value = worst;
  c.pass = worst < c.tolerance;
  c.detail = detail.str();
  return c;
}

inline CriterionResult criterion6(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(6, "three simulators agree on the law of N_n",
                    "pairwise chi-square two-sample tests, Bonferroni over 18 tests");
  constexpr int kTests = 18;
  const double alpha = kSignificance / kTests;
  c.target = alpha;
  c.tolerance = alpha;
  double minP = 1.0;
  int rejections = 0;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 3; ++d) {
    for (std::uint64_t n : {10ULL, 100ULL}) {
      const auto direct = chainCounts(Method::Direct, d, n, 100'000, o);
      const auto sojourn = chainCounts(Method::Sojourn, d, n, 100'000, o);
      const auto insertion = chainCounts(Method::Insertion, d, n, 100'000, o);
      const std::array<std::pair<const char*, TwoSampleResult>, 3> tests{{
          {"direct/sojourn", twoSampleTest(direct, sojourn, alpha)},
          {"direct/insertion", twoSampleTest(direct, insertion, alpha)},
          {"sojourn/insertion", twoSampleTest(sojourn, insertion, alpha)},
      }};
      for (const auto& [label, t] : tests) {
        minP = std::min(minP, t.pValue);
        rejections += t.reject;
        detail << "d=" << d << ",n=" << n << "," << label << ":p=" << fmt(t.pValue) << " ";
      }
    }
  }
  c.value = minP;
  c.pass = rejections == 0;
  c.detail = "rejections=" + std::to_string(rejections) + " " + detail.str();
  return c;
}

inline CriterionResult criterion7(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(7, "Monte Carlo record probabilities and mean count vs exact",
                    "exact p_n (n<=20) and sum of p_m (n=100); 4 SE");
  c.target = 0.0;
  c.tolerance = kSigmaBand;
  constexpr std::uint64_t kReplicates = 100'000;
  double worst = 0.0;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 3; ++d) {
    const std::string tag = experimentTag("record-indicators", {{"d", std::to_string(d)}, {"n", "20"}});
    const auto masks = runReplicates(kReplicates, o.workers, [&](std::size_t i) {
      RngStream rng(o.seed, deriveStreamId(tag, i));
      const auto trace = simulateDirect(rng, d, 20);
      std::uint32_t mask = 0;
      for (auto time : trace.recordTimes) mask |= 1u << (time - 1);
      return mask;
    });
    const auto exact = chainRecordProbs(d, 20);
    double worstD = 0.0;
    for (std::uint64_t n = 1; n <= 20; ++n) {
      std::vector<double> hits(kReplicates);
      for (std::size_t i = 0; i < kReplicates; ++i) hits[i] = (masks[i] >> (n - 1)) & 1u;
      const auto s = summarize("p_hat", hits, o.seed);
      worstD = std::max(worstD, zScore(s.value, *s.stdError, exact[n - 1].toDouble()));
    }
    const auto counts = chainCounts(Method::Direct, d, 100, kReplicates, o);
    const auto s = summarize("N_100", counts, o.seed);
    const double target = expectedChainCount(d, 100).toDouble();
    const double zMean = zScore(s.value, *s.stdError, target);
    worst = std::max({worst, worstD, zMean});
    detail << "d=" << d << ": max z(p_n)=" << fmt(worstD) << ", E N_100 est=" << fmt(s.value)
           << " exact=" << fmt(target) << " z=" << fmt(zMean) << "; ";
  }
  c.value = worst;
  c.pass = worst <= kSigmaBand;
  c.detail = detail.str();
  return c;
}

inline CriterionResult criterion8(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(8, "moments of the limit variable Y", "exact E[Y], E[Y^2]; 4 SE over 1e6 series samples");
  c.target = 0.0;
  c.tolerance = kSigmaBand;
  double worst = 0.0;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 3; ++d) {
    LimitsRequest r{d, 1'000'000, o.seed, 1e-12, o.workers};
    const auto y = sampleYs(r);
    std::vector<double> y2(y.size());
    std::transform(y.begin(), y.end(), y2.begin(), [](double v) { return v * v; });
    for (unsigned beta = 1; beta <= 2; ++beta) {
      const auto s = summarize("Y^beta", beta == 1 ? y : y2, o.seed);
      const double target = limitMoment(d, beta).toDouble();
      const double z = zScore(s.value, *s.stdError, target);
      worst = std::max(worst, z);
      detail << "d=" << d << ",beta=" << beta << ": est=" << fmt(s.value) << " exact=" << fmt(target)
             << " z=" << fmt(z) << "; ";
    }
  }
  c.value = worst;
  c.pass = worst <= kSigmaBand;
  c.detail = detail.str();
  return c;
}

inline CriterionResult criterion9(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(9, "compensator identity E[int_0^t B ds] = E[N_t]", "paired difference, 4 SE, t=5, d=2");
  c.target = 0.0;
  c.tolerance = kSigmaBand;
  const std::string tag = experimentTag("compensator", {{"d", "2"}, {"t", "5"}});
  struct Pair {
    double integral = 0.0, jumps = 0.0;
  };
  const auto pairs = runReplicates(100'000, o.workers, [&](std::size_t i) {
    RngStream rng(o.seed, deriveStreamId(tag, i));
    const auto path = simulatePoissonPaced(rng, 2, 5.0);
    return Pair{path.integral(5.0), static_cast<double>(path.jumpCount())};
  });
  std::vector<double> diff(pairs.size()), integral(pairs.size()), jumps(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    diff[i] = pairs[i].integral - pairs[i].jumps;
    integral[i] = pairs[i].integral;
    jumps[i] = pairs[i].jumps;
  }
  const auto s = summarize("difference", diff, o.seed);
  const double z = zScore(s.value, *s.stdError, 0.0);
  c.value = z;
  c.pass = z <= kSigmaBand;
  c.detail = "mean integral=" + fmt(sampleMoments(integral).mean) + " mean jumps=" + fmt(sampleMoments(jumps).mean) +
             " diff=" + fmt(s.value) + " se=" + fmt(*s.stdError);
  return c;
}

inline CriterionResult criterion10(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(10, "log-n slopes of mean and variance of N_n",
                    "regression over n=1e3..1e6; mean slope within 5% of 1/d, variance slope within 15% of 1/d^2");
  c.target = 0.0;
  c.tolerance = 1.0;  // value is the worst |relative error| / band
  double worst = 0.0;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 2; ++d) {
    std::vector<std::pair<double, double>> means, variances;
    for (std::uint64_t n : {1'000ULL, 10'000ULL, 100'000ULL, 1'000'000ULL}) {
      const auto counts = chainCounts(Method::Sojourn, d, n, 10'000, o);
      const auto m = sampleMoments(counts);
      const double logN = std::log(static_cast<double>(n));
      means.emplace_back(logN, m.mean);
      variances.emplace_back(logN, m.variance);
    }
    const double meanSlope = regressionSlope(means), varSlope = regressionSlope(variances);
    const double meanRel = std::abs(meanSlope * d - 1.0), varRel = std::abs(varSlope * d * d - 1.0);
    worst = std::max({worst, meanRel / 0.05, varRel / 0.15});
    detail << "d=" << d << ": mean slope=" << fmt(meanSlope) << " (target " << fmt(1.0 / d) << ")"
           << ", var slope=" << fmt(varSlope) << " (target " << fmt(1.0 / (d * d)) << "); ";
  }
  c.value = worst;
  c.pass = worst <= 1.0;
  c.detail = detail.str();
  return c;
}

inline std::vector<double> windowCounts(const LimitWindow& w, std::uint64_t windows, const AcceptanceOptions& o) {
  LimitsRequest r{2, windows, o.seed, 1e-10, o.workers};
  std::vector<double> counts(windows, 0.0);
  for (const auto& [i, p] : sampleWindows(r, w)) counts[i] += 1.0;
  return counts;
}

inline CriterionResult criterion11(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(11, "hyperbolic invariance of the limit point process",
                    "chi-square two-sample test of window counts, A vs its image under (s,t)->(2s,t/2)");
  c.target = kSignificance;
  c.tolerance = kSignificance;
  const LimitWindow a{0.25, 1.0, 4.0};
  const auto countsA = windowCounts(a, 10'000, o);
  const auto countsB = windowCounts(a.hyperbolicShift(2.0), 10'000, o);
  const auto t = twoSampleTest(countsA, countsB, kSignificance);
  c.value = t.pValue;
  c.pass = !t.reject;
  c.detail = "d=2, A=[0.25,1]x[0,4], statistic=" + fmt(t.statistic) + " df=" + std::to_string(t.degreesOfFreedom) +
             " mean counts " + fmt(sampleMoments(countsA).mean) + " vs " + fmt(sampleMoments(countsB).mean);
  return c;
}

inline CriterionResult criterion12(const AcceptanceOptions& o) {
  CriterionResult c = makeCriterion(12, "byte-identical reruns across worker counts", "rendered outputs compared byte for byte");
  std::vector<SimulationRequest> requests;
  auto add = [&](Quantity q, Method m, unsigned d, std::optional<std::uint64_t> n, std::optional<double> t) {
    SimulationRequest r;
    r.quantity = q;
    r.method = m;
    r.d = d;
    r.n = n;
    r.t = t;
    r.replicates = 3'000;
    r.seed = o.seed;
    requests.push_back(r);
  };
  add(Quantity::ChainCount, Method::Direct, 3, 50, std::nullopt);
  add(Quantity::ChainCount, Method::Sojourn, 2, 1'000'000, std::nullopt);
  add(Quantity::ChainCount, Method::Insertion, 2, 100, std::nullopt);
  add(Quantity::RecordIndicator, Method::Sojourn, 2, 20, std::nullopt);
  add(Quantity::RenewalCount, Method::Sojourn, 2, 10'000, std::nullopt);
  add(Quantity::Compensator, Method::Sojourn, 2, std::nullopt, 5.0);
  add(Quantity::Height, Method::Sojourn, 1, std::nullopt, 2.0);
  int mismatches = 0;
  for (auto r : requests) {
    std::string first;
    for (unsigned workers : {1u, 4u, 1u, 3u}) {
      r.workers = workers;
      const auto s = runSimulation(r);
      const std::string text = renderSummaryJson(s, "") + renderSummaryCsv(s, "");
      if (first.empty()) first = text;
      else mismatches += text != first;
    }
  }
  std::string firstY, firstWindow;
  for (unsigned workers : {1u, 4u}) {
    LimitsRequest r{2, 2'000, o.seed, 1e-12, workers};
    std::string y, w;
    for (double v : sampleYs(r)) y += formatDouble(v) + "\n";
    for (const auto& [i, p] : sampleWindows(r, LimitWindow{0.25, 1.0, 4.0})) {
      w += std::to_string(i) + "," + formatDouble(p.xi) + "," + formatDouble(p.sigma) + "\n";
    }
    if (firstY.empty()) {
      firstY = y;
      firstWindow = w;
    } else {
      mismatches += (y != firstY) + (w != firstWindow);
    }
  }
  c.value = mismatches;
  c.pass = mismatches == 0;
  c.detail = "mismatching reruns=" + std::to_string(mismatches);
  return c;
}

}  // namespace detail

inline std::vector<int> suiteCriteria(std::string_view suite) {
  if (suite == "exact") return {1, 2, 3, 4, 5};
  if (suite == "oracle") return {6, 7, 8, 9, 11, 12};
  if (suite == "asymptotic") return {10};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  throw InputError("unknown suite '" + std::string(suite) + "' (exact, oracle, asymptotic, all)");
}

inline CriterionResult runCriterion(int id, const AcceptanceOptions& o = {}) {
  switch (id) {
    case 1: return detail::criterion1();
    case 2: return detail::criterion2(o);
    case 3: return detail::criterion3();
    case 4: return detail::criterion4();
    case 5: return detail::criterion5();
    case 6: return detail::criterion6(o);
    case 7: return detail::criterion7(o);
    case 8: return detail::criterion8(o);
    case 9: return detail::criterion9(o);
    case 10: return detail::criterion10(o);
    case 11: return detail::criterion11(o);
    case 12: return detail::criterion12(o);
    default: throw InputError("no acceptance criterion " + std::to_string(id));
  }
}

}  // namespace chainrec
