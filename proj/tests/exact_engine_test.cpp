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
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "chainrec/error.hpp"
#include "chainrec/exact_engine.hpp"
#include "oracles.hpp"

namespace chainrec {
namespace {

ExactRational q(long num, long den) { return ExactRational::fraction(num, den); }

TEST(Mellin, Examples) {
  EXPECT_EQ(mellin(2, ExactRational(1)), q(1, 4));
  EXPECT_EQ(mellin(1, ExactRational(0)), ExactRational(1));
  EXPECT_EQ(mellin(3, ExactRational(2)), q(1, 27));
  EXPECT_THROW(mellin(2, ExactRational(-1)), DomainError);
  EXPECT_DOUBLE_EQ(MellinTransform(3)(1.0), 0.125);
}

TEST(Mellin, MomentsByFiniteDifferences) {
  for (unsigned d = 1; d <= 5; ++d) {
    const MellinTransform g(d);
    const double h = 1e-4;
    const double mu = (g(-h) - g(h)) / (2 * h);  // E[-log W]
    const double second = (g(h) - 2 * g(0.0) + g(-h)) / (h * h);
    EXPECT_NEAR(mu, g.mu(), 1e-6);
    EXPECT_NEAR(second - mu * mu, g.sigma2(), 1e-4);
  }
}

TEST(ChainRecordProb, Examples) {
  EXPECT_EQ(chainRecordProb(1, 5), q(1, 5));
  EXPECT_EQ(chainRecordProb(2, 7), q(1, 14));
  EXPECT_EQ(chainRecordProb(3, 2), q(1, 8));
  for (unsigned d = 1; d <= 6; ++d) EXPECT_EQ(chainRecordProb(d, 1), ExactRational(1));
}

TEST(ChainRecordProb, MatchesTermByTermSum) {
  for (unsigned d = 1; d <= 4; ++d) {
    const auto p = chainRecordProbs(d, 60);
    for (unsigned n = 1; n <= 60; ++n) {
      EXPECT_EQ(p[n - 1], ExactRational(testing::naiveChainProb(d, n))) << "d=" << d << " n=" << n;
    }
  }
}

TEST(ChainRecordProb, StrictlyDecreasing) {
  for (unsigned d = 1; d <= 5; ++d) {
    const auto p = chainRecordProbs(d, 150);
    for (std::size_t n = 1; n < p.size(); ++n) EXPECT_LT(p[n], p[n - 1]) << "d=" << d << " n=" << n + 1;
  }
}

TEST(ChainRecordProb, CapIsExplicit) {
  EXPECT_THROW(chainRecordProb(2, 501), CapExceeded);
  EXPECT_THROW(chainRecordProbs(2, 20, ExactLimits{10, 10000}), CapExceeded);
  try {
    chainRecordProb(2, 600);
  } catch (const CapExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("increase"), std::string::npos);
  }
  EXPECT_THROW(chainRecordProb(0, 5), InputError);
  EXPECT_THROW(chainRecordProb(2, 0), InputError);
}

TEST(StrongAndWeak, Examples) {
  EXPECT_EQ(strongRecordProb(2, 3), q(1, 9));
  EXPECT_EQ(weakRecordProb(1, 4), q(1, 4));
  for (unsigned d = 1; d <= 5; ++d) EXPECT_EQ(weakRecordProb(d, 1), ExactRational(1));
  const auto w = weakRecordProbs(1, 40);
  for (unsigned n = 1; n <= 40; ++n) EXPECT_EQ(w[n - 1], q(1, n));
}

TEST(StrongAndWeak, Ordering) {
  for (unsigned d = 1; d <= 4; ++d) {
    const auto p = chainRecordProbs(d, 60);
    const auto w = weakRecordProbs(d, 60);
    for (unsigned n = 1; n <= 60; ++n) {
      EXPECT_LE(strongRecordProb(d, n), p[n - 1]);
      EXPECT_LE(p[n - 1], w[n - 1]);
    }
  }
}

TEST(ExpectedCounts, Examples) {
  EXPECT_EQ(expectedStrongCount(2, 3), q(49, 36));
  EXPECT_EQ(expectedWeakCount(1, 3), q(11, 6));
  EXPECT_EQ(expectedChainCount(2, 3), q(17, 12));
}

TEST(ExpectedCounts, WeakCountIsSumOfWeakProbabilities) {
  for (unsigned d = 1; d <= 4; ++d) {
    const auto w = weakRecordProbs(d, 50);
    const auto e = expectedWeakCounts(d, 50);
    ExactRational sum(0);
    for (unsigned n = 1; n <= 50; ++n) {
      sum += w[n - 1];
      EXPECT_EQ(e[n - 1], sum) << "d=" << d << " n=" << n;
    }
  }
}

TEST(ExpectedCounts, ChainCountIsSumOfProbabilities) {
  const auto p = chainRecordProbs(3, 30);
  ExactRational sum(0);
  for (const auto& v : p) sum += v;
  EXPECT_EQ(expectedChainCount(3, 30), sum);
}

TEST(MomentSeries, Examples) {
  for (unsigned d = 1; d <= 3; ++d) {
    for (unsigned beta = 1; beta <= 2; ++beta) EXPECT_EQ(momentSeries(d, beta, 0.0), 1.0);
  }
  for (double t : {0.1, 1.0, 3.0, 20.0}) EXPECT_NEAR(momentSeries(1, 1, t), -std::expm1(-t) / t, 1e-14);

  const auto p = chainRecordProbs(2, 80);
  double poissonised = 0.0, w = std::exp(-2.0);
  for (unsigned n = 0; n < 80; ++n) {
    poissonised += w * p[n].toDouble();
    w *= 2.0 / (n + 1);
  }
  EXPECT_NEAR(momentSeries(2, 1, 2.0), poissonised, 1e-13);
}

TEST(MomentSeries, Monotone) {
  for (unsigned d = 1; d <= 3; ++d) {
    double prev = 1.0;
    for (double t = 0.25; t <= 30.0; t += 0.25) {
      const double m = momentSeries(d, 1, t);
      EXPECT_LT(m, prev);
      EXPECT_GT(m, 0.0);
      prev = m;
    }
  }
}

TEST(MomentSeries, LargeTAsymptotics) {
  for (unsigned d = 1; d <= 3; ++d) {
    const double v = 1000.0 * momentSeries(d, 1, 1000.0, 1e-12);
    EXPECT_NEAR(v, 1.0 / d, 0.05 / d) << "d=" << d;
  }
}

TEST(MomentSeries, DigitCeiling) {
  EXPECT_EQ(momentSeriesDigits(0.5, 1e-15), 30u);
  EXPECT_GT(momentSeriesDigits(1000.0, 1e-12), 430u);
  EXPECT_THROW(momentSeries(2, 1, 1e5), CapExceeded);
  EXPECT_THROW(momentSeries(2, 1, 50.0, 1e-15, ExactLimits{500, 40}), CapExceeded);
  EXPECT_THROW(momentSeries(2, 0, 1.0), InputError);
  EXPECT_THROW(momentSeries(2, 1, -1.0), InputError);
}

TEST(LimitMoment, Examples) {
  EXPECT_EQ(limitMoment(1, 1), ExactRational(1));
  EXPECT_EQ(limitMoment(2, 1), q(1, 2));
  EXPECT_EQ(limitMoment(2, 2), q(2, 3));
  EXPECT_EQ(limitMoment(3, 2), q(8, 21));
  for (unsigned beta = 1; beta <= 6; ++beta) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), beta);
    EXPECT_EQ(limitMoment(1, beta), ExactRational(f, 1)) << "beta=" << beta;
  }
}

// E[Y^beta] = (1/d) prod_{r=1}^{beta-1} r / (1 - g(r)).
TEST(LimitMoment, ProductForm) {
  for (unsigned d = 1; d <= 5; ++d) {
    for (unsigned beta = 1; beta <= 6; ++beta) {
      ExactRational v = q(1, d);
      for (unsigned r = 1; r < beta; ++r) v *= ExactRational(static_cast<long>(r)) / (ExactRational(1) - mellin(d, ExactRational(static_cast<long>(r))));
      EXPECT_EQ(limitMoment(d, beta), v);
    }
  }
}

TEST(LimitMoment, ApproachedBySeries) {
  const double t = 200.0;
  EXPECT_NEAR(t * t * momentSeries(2, 2, t, 1e-12), 2.0 / 3.0, 0.02);
}

TEST(Densities, Examples) {
  EXPECT_DOUBLE_EQ(cdfW(1, 0.3), 0.3);
  for (unsigned d = 1; d <= 5; ++d) EXPECT_DOUBLE_EQ(cdfW(d, 1.0), 1.0);
  for (double s : {0.01, 0.3, 0.9, 1.0}) EXPECT_NEAR(stationaryDensity(1, s), 1.0, 1e-15);
  EXPECT_NEAR(densityW(2, std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_THROW(cdfW(2, 0.0), DomainError);
  EXPECT_THROW(densityW(2, 1.5), DomainError);
}

TEST(Densities, IntegrateToOne) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (unsigned d = 1; d <= 5; ++d) {
    const double a = integrator.integrate([d](double s) { return densityW(d, s); }, 0.0, 1.0);
    const double b = integrator.integrate([d](double s) { return stationaryDensity(d, s); }, 0.0, 1.0);
    EXPECT_NEAR(a, 1.0, 1e-9) << "d=" << d;
    EXPECT_NEAR(b, 1.0, 1e-9) << "d=" << d;
  }
}

TEST(Densities, CdfIsIntegralOfDensity) {
  for (unsigned d = 1; d <= 4; ++d) {
    for (double s : {0.05, 0.3, 0.7}) {
      const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [d](double x) {
            const double s = std::exp(-x);
            return s > 0.0 ? densityW(d, s) * s : 0.0;
          }, -std::log(s),
          std::numeric_limits<double>::infinity());
      EXPECT_NEAR(v, cdfW(d, s), 1e-10);
    }
  }
}

}  // namespace
}  // namespace chainrec
