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


#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/exact_engine.hpp"
#include "chainrec/record_core.hpp"
#include "chainrec/samplers.hpp"
#include "chainrec/stats.hpp"

namespace chainrec {
namespace {

constexpr double kBand = 4.0;
constexpr double kAlpha = 0.01;

struct MeanSe {
  double mean, se;
};

MeanSe meanSe(const std::vector<double>& x) {
  const auto m = sampleMoments(x);
  return {m.mean, std::sqrt(m.variance / static_cast<double>(x.size()))};
}

template <class F>
std::vector<double> draw(std::string_view tag, std::size_t count, F&& f) {
  return collect(f, count, 2024, tag);
}

::testing::AssertionResult withinSe(const std::vector<double>& x, double target) {
  const auto ms = meanSe(x);
  if (std::abs(ms.mean - target) < kBand * ms.se) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "mean " << ms.mean << " se " << ms.se << " target " << target;
}

#define EXPECT_WITHIN_SE(sample, target) EXPECT_TRUE(withinSe(sample, target))

TEST(SampleW, Moments) {
  EXPECT_WITHIN_SE(draw("w1", 100000, [](RngStream& r) { return sampleW(r, 1); }), 0.5);
  EXPECT_WITHIN_SE(draw("w2", 100000, [](RngStream& r) { return sampleW(r, 2); }), 0.25);
  for (unsigned d : {1u, 2u, 3u}) {
    const auto x = draw("logw", 100000, [d](RngStream& r) { return -std::log(sampleW(r, d)); });
    EXPECT_WITHIN_SE(x, static_cast<double>(d));
    const double mean = sampleMoments(x).mean;
    std::vector<double> sq;
    for (double v : x) sq.push_back((v - mean) * (v - mean));
    EXPECT_WITHIN_SE(sq, static_cast<double>(d));
  }
}

TEST(SampleW, Errors) {
  RngStream rng(1, 1);
  EXPECT_THROW(sampleW(rng, 0), InputError);
  EXPECT_THROW(simulateDirect(rng, 2, 0), InputError);
  EXPECT_THROW(simulateSojourn(rng, 0, 5), InputError);
  EXPECT_THROW(simulatePoissonPaced(rng, 2, 0.0), InputError);
  EXPECT_THROW(sampleY(rng, 2, 0.0), InputError);
}

TEST(Simulators, FirstIndexIsAlwaysARecord) {
  RngStream rng(1, 2);
  EXPECT_EQ(simulateDirect(rng, 3, 1).recordTimes, std::vector<std::uint64_t>{1});
  EXPECT_EQ(simulateSojourn(rng, 3, 1).recordTimes, std::vector<std::uint64_t>{1});
  EXPECT_EQ(simulateInsertion(rng, 3, 1), 1u);
}

TEST(Simulators, Deterministic) {
  RngStream a(9, 3), b(9, 3);
  const auto ta = simulateDirect(a, 2, 500), tb = simulateDirect(b, 2, 500);
  EXPECT_EQ(ta.recordTimes, tb.recordTimes);
  EXPECT_TRUE(std::ranges::equal(ta.heights.negLogHeights(), tb.heights.negLogHeights()));
}

TEST(SimulateDirect, MeanCountMatchesExact) {
  const auto n3 = draw("direct-3", 100000, [](RngStream& r) { return simulateDirect(r, 2, 3).count(); });
  EXPECT_WITHIN_SE(n3, expectedChainCount(2, 3).toDouble());
  const auto n7 = draw("direct-7", 100000, [](RngStream& r) { return simulateDirect(r, 2, 7).count(); });
  EXPECT_WITHIN_SE(n7, expectedChainCount(2, 7).toDouble());
}

TEST(SimulateInsertion, ClassicalRecordsInOneDimension) {
  const auto x = draw("ins-d1", 100000, [](RngStream& r) { return simulateInsertion(r, 1, 50); });
  EXPECT_WITHIN_SE(x, expectedWeakCount(1, 50).toDouble());
}

TEST(Simulators, ThreeWayAgreement) {
  const std::size_t reps = 20000;
  const auto a = draw("3w-direct", reps, [](RngStream& r) { return simulateDirect(r, 2, 100).count(); });
  const auto b = draw("3w-sojourn", reps, [](RngStream& r) { return simulateSojourn(r, 2, 100).count(); });
  const auto c = draw("3w-insertion", reps, [](RngStream& r) { return simulateInsertion(r, 2, 100); });
  const double alpha = kAlpha / 3;
  EXPECT_FALSE(twoSampleTest(a, b, alpha).reject);
  EXPECT_FALSE(twoSampleTest(a, c, alpha).reject);
  EXPECT_FALSE(twoSampleTest(b, c, alpha).reject);
  EXPECT_WITHIN_SE(a, expectedChainCount(2, 100).toDouble());
}

// H_k after the k-th chain record of an unbounded uniform sequence versus a
// product of k independent factors.
TEST(SimulateDirect, HeightLaw) {
  for (unsigned k = 1; k <= 3; ++k) {
    const auto fromRecords = draw("height-records", 4000, [k](RngStream& r) {
      ChainDetector det;
      std::vector<double> x(2);
      unsigned seen = 0;
      for (std::uint64_t m = 0; m < 50'000'000; ++m) {
        for (double& c : x) c = r.uniform();
        if (det.process(x) && ++seen == k) return x[0] * x[1];
      }
      return 0.0;
    });
    const auto products = draw("height-products", 4000, [k](RngStream& r) {
      double h = 1.0;
      for (unsigned i = 0; i < k; ++i) h *= sampleW(r, 2);
      return h;
    });
    EXPECT_FALSE(ksTwoSample(fromRecords, products, kAlpha).reject) << "k=" << k;
  }
  RngStream rng(3, 3);
  const auto t = simulateDirect(rng, 2, 1);
  EXPECT_TRUE(t.heights.size() == 1 && t.heights[0] > 0.0 && t.heights[0] < 1.0);
}

// Given H_1 in a narrow bin, T_2 - T_1 is geometric with parameter H_1.
TEST(SimulateDirect, SojournLaw) {
  std::vector<double> gaps, geometric;
  RngStream ref(77, 1);
  for (std::uint64_t rep = 0; rep < 40000; ++rep) {
    RngStream rng(77, deriveStreamId("sojourn-law", rep));
    const auto t = simulateDirect(rng, 2, 300);
    const double h1 = t.heights[0];
    if (h1 < 0.2 || h1 > 0.25 || t.count() < 2) continue;
    gaps.push_back(static_cast<double>(t.recordTimes[1] - 1));
    geometric.push_back(sampleGeometricGap(ref, t.heights.negLogHeight(0)));
  }
  ASSERT_GT(gaps.size(), 2000u);
  const auto r = chiSquareTwoSample(gaps, geometric, kAlpha);
  EXPECT_FALSE(r.reject) << "p=" << r.pValue;
  EXPECT_GT(r.degreesOfFreedom, 5u);
}

TEST(SampleGeometricGap, Support) {
  RngStream rng(4, 4);
  EXPECT_EQ(sampleGeometricGap(rng, 0.0), 1.0);
  EXPECT_GT(sampleGeometricGap(rng, 80.0), 1e30);
  EXPECT_TRUE(std::isinf(sampleGeometricGap(rng, 800.0)));
  const auto x = draw("geom", 100000, [](RngStream& r) { return sampleGeometricGap(r, -std::log(0.01)); });
  for (double v : x) ASSERT_GE(v, 1.0);
  EXPECT_WITHIN_SE(x, 100.0);
}

TEST(SimulateDirect, LogTransformCorrespondence) {
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    RngStream rng(5, rep);
    std::vector<Mark> marks;
    const auto t = simulateDirect(rng, 3, 2000, &marks);
    ASSERT_EQ(marks.size(), 2000u);
    EXPECT_EQ(upperChainRecordIndices(logTransform(marks)), t.recordTimes);
    EXPECT_EQ(chainRecordIndices(marks), t.recordTimes);
  }
}

TEST(RenewalCount, Example) {
  ChainRecordTrace t(2);
  for (double h : {0.5, 0.2, 0.05}) t.heights.pushNegLog(-std::log(h));
  EXPECT_EQ(renewalCount(t, 10), 2u);
  ChainRecordTrace shallow(2);
  shallow.heights.pushNegLog(-std::log(0.5));
  EXPECT_THROW(renewalCount(shallow, 10), InputError);
  RngStream rng(6, 6);
  const auto k = renewalCount(shallow, 10, rng);
  EXPECT_GE(k, 1u);
  EXPECT_LT(shallow.heights[shallow.heights.size() - 1], 0.1);
}

TEST(RenewalCount, MeanGrowsLikeLogNOverD) {
  const double n = 1e4;
  const auto k = draw("renewal", 100000, [n](RngStream& r) {
    auto t = simulateSojourn(r, 2, static_cast<std::uint64_t>(n));
    return renewalCount(t, static_cast<std::uint64_t>(n), r);
  });
  const double target = std::log(n) / 2.0;
  const auto ms = meanSe(k);
  EXPECT_LT(std::abs(ms.mean - target), 0.1 * target + kBand * ms.se) << ms.mean;
}

TEST(SimulateInsertion, CoupledBound) {
  std::size_t tight = 0;
  const std::size_t reps = 20000;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    RngStream rng(8, deriveStreamId("coupled", rep));
    const auto run = simulateInsertionRun(rng, 2, 1000);
    ASSERT_LE(run.records, 1 + run.renewalCount + run.belowReciprocal);
    tight += run.records <= run.renewalCount + run.belowReciprocal;
  }
  const double fraction = static_cast<double>(tight) / reps;
  RecordProperty("fraction_N_le_K_plus_xi", std::to_string(fraction));
  EXPECT_GT(fraction, 0.5);
}

TEST(PoissonPaced, StatesAreProductsOfFactors) {
  RngStream rng(10, 10), replay(10, 10);
  const auto path = simulatePoissonPaced(rng, 2, 50.0, 3.0);
  double b = 3.0, t = 0.0;
  for (std::size_t k = 0; k < path.jumpCount(); ++k) {
    t += replay.exponential() / b;
    b *= sampleW(replay, 2);
    EXPECT_DOUBLE_EQ(path.jumpTimes[k], t);
    EXPECT_DOUBLE_EQ(path.heightsAfterJump[k], b);
  }
  EXPECT_GT(path.jumpCount(), 0u);
  EXPECT_EQ(path.stateAt(0.0), 3.0);
  EXPECT_EQ(path.finalState(), b);
  EXPECT_EQ(path.jumpsUpTo(50.0), path.jumpCount());
}

TEST(PoissonPaced, Compensator) {
  std::vector<double> diff;
  for (double v : draw("compensator", 20000, [](RngStream& r) {
         const auto p = simulatePoissonPaced(r, 2, 5.0);
         return p.integral(5.0) - static_cast<double>(p.jumpCount());
       })) {
    diff.push_back(v);
  }
  EXPECT_WITHIN_SE(diff, 0.0);
}

TEST(PoissonPaced, MeanMatchesMomentSeries) {
  for (unsigned d : {1u, 2u}) {
    for (double t : {1.0, 2.0, 5.0}) {
      const auto b = draw("paced-mean", 100000, [d, t](RngStream& r) { return simulatePoissonPaced(r, d, t).finalState(); });
      EXPECT_WITHIN_SE(b, momentSeries(d, 1, t)) << "d=" << d << " t=" << t;
    }
  }
}

TEST(PoissonPaced, SelfSimilarity) {
  const auto scaled = draw("self-sim-a", 20000, [](RngStream& r) { return 2.0 * simulatePoissonPaced(r, 2, 2.0, 1.0).finalState(); });
  const auto started = draw("self-sim-b", 20000, [](RngStream& r) { return simulatePoissonPaced(r, 2, 1.0, 2.0).finalState(); });
  EXPECT_FALSE(ksTwoSample(scaled, started, kAlpha).reject);
}

TEST(SampleW0, Mean) {
  for (unsigned d = 1; d <= 4; ++d) {
    const auto x = draw("w0-mean", 100000, [d](RngStream& r) { return sampleW0(r, d); });
    EXPECT_WITHIN_SE(x, (1.0 - std::ldexp(1.0, -static_cast<int>(d))) / d) << "d=" << d;
  }
}

// Empirical CDF of W_0 against the integral of the stationary density.
TEST(SampleW0, MatchesStationaryDensity) {
  for (unsigned d : {1u, 3u}) {
    auto x = draw("w0-law", 20000, [d](RngStream& r) { return sampleW0(r, d); });
    std::sort(x.begin(), x.end());
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double s = i / 100.0;
      const double F = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [d](double u) {
            const double e = std::exp(-u);
            return e > 0.0 ? stationaryDensity(d, e) * e : 0.0;
          }, -std::log(s),
          std::numeric_limits<double>::infinity());
      const double Fn = static_cast<double>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) / x.size();
      worst = std::max(worst, std::abs(F - Fn));
    }
    EXPECT_LT(worst, 1.63 / std::sqrt(static_cast<double>(x.size()))) << "d=" << d;
  }
}

TEST(SampleY, Moments) {
  const auto y1 = draw("y1", 200000, [](RngStream& r) { return sampleY(r, 1).value; });
  EXPECT_WITHIN_SE(y1, 1.0);
  const auto y2 = draw("y2", 200000, [](RngStream& r) { return sampleY(r, 2).value; });
  EXPECT_WITHIN_SE(y2, 0.5);
  std::vector<double> sq;
  for (double v : y2) sq.push_back(v * v);
  EXPECT_WITHIN_SE(sq, 2.0 / 3.0);
}

TEST(SampleY, ProductFormInDimensionTwo) {
  const auto a = draw("y-series", 20000, [](RngStream& r) { return sampleY(r, 2).value; });
  const auto b = draw("y-product", 20000, [](RngStream& r) { return sampleYProductForm(r); });
  EXPECT_FALSE(ksTwoSample(a, b, kAlpha).reject);
}

TEST(SampleY, TighterToleranceUsesMoreTerms) {
  RngStream a(12, 1), b(12, 1);
  EXPECT_LE(sampleY(a, 2, 1e-3).terms, sampleY(b, 2, 1e-12).terms);
}

TEST(LimitProcess, SkeletonStructure) {
  for (unsigned d : {1u, 2u, 3u}) {
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
      RngStream rng(13, deriveStreamId("skeleton", rep * 4 + d));
      const auto pts = sampleLimitSkeleton(rng, d, 0.1, 4.0, 1e-10);
      bool sawZero = false, sawMinusOne = false;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].k == 0) {
          sawZero = true;
          EXPECT_GT(pts[i].xi, 0.0);
          EXPECT_LE(pts[i].xi, 1.0);
        }
        if (pts[i].k == -1) {
          sawMinusOne = true;
          EXPECT_GT(pts[i].xi, 1.0);
        }
        if (i > 0) {
          ASSERT_EQ(pts[i].k, pts[i - 1].k + 1);
          ASSERT_LT(pts[i].xi, pts[i - 1].xi);
          ASSERT_GT(pts[i].sigma, pts[i - 1].sigma);
        }
      }
      EXPECT_TRUE(sawZero && sawMinusOne);
      EXPECT_GT(pts.front().xi, 4.0);
    }
  }
}

TEST(LimitProcess, TopPointBelowOneIsStationary) {
  const auto xi0 = draw("xi0", 20000, [](RngStream& r) {
    for (const auto& p : sampleLimitSkeleton(r, 2, 0.5, 1.0, 1e-6)) {
      if (p.k == 0) return p.xi;
    }
    return -1.0;
  });
  const auto w0 = draw("w0-ref", 20000, [](RngStream& r) { return sampleW0(r, 2); });
  EXPECT_FALSE(ksTwoSample(xi0, w0, kAlpha).reject);
}

TEST(LimitProcess, WindowFilter) {
  RngStream rng(14, 14);
  const LimitWindow w{0.25, 1.0, 4.0};
  const auto win = sampleLimitProcess(rng, 2, w, 1e-10);
  for (const auto& p : win.points) EXPECT_TRUE(w.contains(p.xi, p.sigma));
  const auto shifted = w.hyperbolicShift(2.0);
  EXPECT_DOUBLE_EQ(shifted.sLo, 0.5);
  EXPECT_DOUBLE_EQ(shifted.sHi, 2.0);
  EXPECT_DOUBLE_EQ(shifted.tHi, 2.0);
  EXPECT_THROW(sampleLimitProcess(rng, 2, w, 0.0), InputError);
}

TEST(LimitProcess, HyperbolicInvariance) {
  const LimitWindow a{0.25, 1.0, 4.0};
  for (unsigned d : {1u, 3u}) {
    const auto base = draw("hyp-a", 5000, [&](RngStream& r) { return sampleLimitProcess(r, d, a, 1e-10).points.size(); });
    const auto image = draw("hyp-b", 5000, [&](RngStream& r) {
      return sampleLimitProcess(r, d, a.hyperbolicShift(2.0), 1e-10).points.size();
    });
    EXPECT_FALSE(twoSampleTest(base, image, kAlpha).reject) << "d=" << d;
  }
}

}  // namespace
}  // namespace chainrec
