#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "xxzdrop/qcore.hpp"

using namespace xxz;

TEST(Params, QuarterGivesExactRationals) {
  const auto p = params_from_q(0.25);
  EXPECT_NEAR(p.delta, 2.125, 1e-15);
  EXPECT_NEAR(p.a_field, 15.0 / 34.0, 1e-15);
  EXPECT_NEAR(p.gamma, 9.0 / 17.0, 1e-15);
}

TEST(Params, HalfGivesExactRationals) {
  const auto p = params_from_q(0.5);
  EXPECT_NEAR(p.delta, 1.25, 1e-15);
  EXPECT_NEAR(p.a_field, 0.3, 1e-15);
  EXPECT_NEAR(p.gamma, 0.2, 1e-15);
}

TEST(Params, RejectsQOutsideOpenUnitInterval) {
  EXPECT_THROW(params_from_q(1.0), std::domain_error);
  EXPECT_THROW(params_from_q(0.0), std::domain_error);
  EXPECT_THROW(params_from_q(-0.2), std::domain_error);
  EXPECT_THROW(params_from_q(std::nan("")), std::domain_error);
  EXPECT_THROW(params_from_delta(1.0), std::domain_error);
  EXPECT_THROW(params_from_delta(0.3), std::domain_error);
}

TEST(Params, DeltaInversionExactSurds) {
  EXPECT_EQ(params_from_delta(2.125).q, 0.25);
  EXPECT_EQ(params_from_delta(1.25).q, 0.5);
}

TEST(Params, RandomQConsistency) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 500; ++i) {
    const double q = u(rng);
    const auto p = params_from_q(q);
    EXPECT_LT(oracle::rel_err(p.delta, (q + 1 / q) / 2), 1e-14);
    // q-forms of sqrt(1 - 1/D^2)/2 and 1 - 1/D, no cancellation near q = 1
    EXPECT_LT(oracle::rel_err(p.a_field, (1 - q * q) / (2 * (1 + q * q))), 1e-14);
    EXPECT_LT(oracle::rel_err(p.gamma, (1 - q) * (1 - q) / (1 + q * q)), 1e-14);
    EXPECT_LT(oracle::rel_err(p.a_field, 0.5 * std::sqrt(1 - 1 / (p.delta * p.delta))), 1e-10);
    EXPECT_GT(p.a_field, 0.0);
    EXPECT_LT(p.a_field, 0.5);
    EXPECT_GT(p.gamma, 0.0);
    EXPECT_LT(p.gamma, 1.0);
    EXPECT_LT(oracle::rel_err(params_from_delta(p.delta).q, q), 1e-14);
  }
}

TEST(Qbinom, SmallValues) {
  EXPECT_EQ(qbinom(4, 0, 0.37), 1.0);
  EXPECT_DOUBLE_EQ(qbinom(2, 1, 0.25), 1.0625);
  const double t = 1.0 / 16;
  EXPECT_NEAR(qbinom(4, 2, 0.25), 1 + t + 2 * t * t + t * t * t + t * t * t * t, 1e-15);
  EXPECT_NEAR(qbinom(4, 2, 0.25), 1.07057189, 1e-8);
  EXPECT_EQ(qbinom(3, -1, 0.3), 0.0);
  EXPECT_EQ(qbinom(3, 4, 0.3), 0.0);
  EXPECT_THROW(qbinom(-1, 0, 0.3), std::domain_error);
}

TEST(Qbinom, MatchesSubsetExpansion) {
  for (double q : {0.3, 0.7, 0.93})
    for (int m = 0; m <= 14; ++m)
      for (int k = 0; k <= m; ++k)
        EXPECT_LT(oracle::rel_err(qbinom(m, k, q), oracle::qbinom_subsets(m, k, q * q)), 1e-13)
            << m << ' ' << k << ' ' << q;
}

TEST(Qbinom, MatchesProductAndPartitionRatio) {
  for (double q : {0.3, 0.7})
    for (int m = 0; m <= 30; ++m)
      for (int k = 0; k <= m; ++k) {
        const double v = qbinom(m, k, q);
        EXPECT_LT(oracle::rel_err(v, double(oracle::qbinom_product(m, k, (long double)q * q))), 1e-13);
        EXPECT_LT(oracle::rel_err(v, fq(m, q) / (fq(k, q) * fq(m - k, q))), 1e-12);
      }
}

TEST(Qbinom, BinomialTheorem) {
  for (double q : {0.3, 0.55, 0.8})
    for (int L = 0; L <= 12; ++L)
      for (double x : {0.3, 1.0, 2.0}) {
        double lhs = 1.0;
        for (int k = 1; k <= L; ++k) lhs *= 1 + std::pow(q, 2 * k) * x;
        double rhs = 0.0;
        for (int n = 0; n <= L; ++n) rhs += qbinom(L, n, q) * std::pow(q, n * (n + 1)) * std::pow(x, n);
        EXPECT_LT(oracle::rel_err(lhs, rhs), 1e-12);
      }
}

TEST(Qbinom, OrdinaryBinomial) {
  EXPECT_EQ(binom(10, 3), 120.0);
  EXPECT_EQ(binom(40, 20), 137846528820.0);
  EXPECT_EQ(binom(3, 5), 0.0);
  EXPECT_EQ(binom(3, -1), 0.0);
}

TEST(QBinomialTableTest, SymmetryBoundsConvention) {
  for (double q : {0.3, 0.7}) {
    QBinomialTable tab(q, 25);
    const double cap = 1.0 / fq(fq_infinity, q);
    for (int m = 0; m <= 25; ++m) {
      EXPECT_EQ(tab(m, -1), 0.0);
      EXPECT_EQ(tab(m, m + 1), 0.0);
      for (int k = 0; k <= m; ++k) {
        EXPECT_NEAR(tab(m, k), tab(m, m - k), 1e-13 * tab(m, k));
        EXPECT_GE(tab(m, k), 1.0);
        EXPECT_LE(tab(m, k), cap * (1 + 1e-14));
        EXPECT_LT(oracle::rel_err(tab(m, k), qbinom(m, k, q)), 1e-13);
      }
    }
    EXPECT_THROW(tab(26, 0), std::out_of_range);
  }
}

TEST(Fq, Values) {
  EXPECT_EQ(fq(0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(fq(1, 0.25), 0.9375);
  long double prod = 1.0L;
  for (int k = 1; k < 40; ++k) prod *= 1.0L - std::pow(0.0625L, k);
  EXPECT_NEAR(fq(fq_infinity, 0.25), double(prod), 1e-15);
  EXPECT_NEAR(fq(fq_infinity, 0.25), 0.9335947074, 1e-10);
  EXPECT_EQ(fq(5, 0.0), 1.0);
}

TEST(Fq, MonotoneAndConvergent) {
  for (double q : {0.1, 0.3, 0.7, 0.9}) {
    double prev = 1.0;
    for (int n = 0; n <= 200; ++n) {
      const double f = fq(n, q);
      EXPECT_LE(f, prev);
      prev = f;
    }
    long double direct = 1.0L;
    for (int k = 1; k < 5000; ++k) direct *= 1.0L - std::pow((long double)q, 2 * k);
    EXPECT_LT(oracle::rel_err(fq(fq_infinity, q), double(direct)), 1e-14);
    EXPECT_LE(fq(fq_infinity, q), prev * (1 + 1e-15));
  }
}

TEST(KinkGapGamma, ClosedValues) {
  EXPECT_NEAR(kink_gap_gamma_L(2, 3.7), 1.0, 1e-15);
  EXPECT_NEAR(kink_gap_gamma_L(3, 2.125), 13.0 / 17.0, 1e-15);
  EXPECT_NEAR(kink_gap_gamma_L(12, 2.125), 0.5454466, 1e-7);
  EXPECT_THROW(kink_gap_gamma_L(1, 2.0), std::domain_error);
  EXPECT_THROW(kink_gap_gamma_L(4, 1.0), std::domain_error);
}

TEST(KinkGapGamma, DominatesBulkGap) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0001, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double d = u(rng);
    for (int L = 2; L <= 40; ++L) EXPECT_GE(kink_gap_gamma_L(L, d), 1 - 1 / d);
  }
}
