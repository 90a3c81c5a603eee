#include "oracles.hpp"

#include "primelab/errors.hpp"
#include "primelab/pbin.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace primelab;

namespace {

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(k);
    for (auto& v : p) v = u(rng);
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(PBParams, Validation) {
    EXPECT_THROW(PBParams({}), DomainError);
    EXPECT_THROW(PBParams({0.5, 1.5}), DomainError);
    EXPECT_THROW(PBParams({-0.1}), DomainError);
    EXPECT_THROW(PBParams({std::nan("")}), DomainError);
    const PBParams p({0.25, 0.25, 0.5});
    EXPECT_EQ(p.k(), 3u);
    EXPECT_DOUBLE_EQ(p.m(), 1.0);
    EXPECT_FALSE(p.is_equal());
    EXPECT_TRUE(PBParams({0.3, 0.3}).is_equal());
}

TEST(PbPmf, MatchesEnumeration) {
    std::mt19937_64 rng(2024);
    for (std::size_t k = 1; k <= 12; ++k) {
        for (int rep = 0; rep < 4; ++rep) {
            const auto probs = random_probs(rng, k);
            const auto want = oracle::pb_enumerate(probs);
            const PBParams params(probs);
            for (std::size_t q = 0; q <= k; ++q) EXPECT_LE(rel(pb_pmf(params, q), want[q]), 1e-12) << k << ":" << q;
        }
    }
}

TEST(PbPmf, ExactRationalAgrees) {
    const PBParams params({0.5, 0.25, 0.125, 0.75});
    const auto want = oracle::pb_enumerate(params.probs());
    for (std::size_t q = 0; q <= 4; ++q) EXPECT_DOUBLE_EQ(pb_pmf_exact(params, q), want[q]);
    EXPECT_THROW(pb_pmf_exact(PBParams(std::vector<double>(21, 0.5)), 1), SizeError);
}

TEST(PbPmf, WorkedExamples) {
    EXPECT_DOUBLE_EQ(pb_pmf(PBParams({0.5, 0.5}), 1), 0.5);
    EXPECT_DOUBLE_EQ(pb_pmf(PBParams({1.0, 0.0, 1.0}), 2), 1.0);
    EXPECT_DOUBLE_EQ(pb_pmf(PBParams({1.0, 0.0, 1.0}), 1), 0.0);
    EXPECT_THROW(pb_pmf(PBParams({0.5}), 2), IndexError);
}

TEST(PbPmf, DistributionIdentities) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto probs = random_probs(rng, 40);
        const auto d = pb_distribution(probs);
        double total = 0.0, mean = 0.0, second = 0.0;
        for (std::size_t q = 0; q < d.size(); ++q) {
            total += d[q];
            mean += q * d[q];
            second += double(q) * q * d[q];
        }
        const double m = std::accumulate(probs.begin(), probs.end(), 0.0);
        double var = 0.0;
        for (double p : probs) var += p * (1 - p);
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NEAR(mean, m, 1e-10 * m);
        EXPECT_NEAR(second - mean * mean, var, 1e-10 * std::max(1.0, var));
    }
}

TEST(Binomial, MatchesOracle) {
    for (std::size_t k : {1, 5, 30, 200}) {
        for (double p : {0.0, 0.1, 0.5, 0.93, 1.0}) {
            const auto want = oracle::binomial_pmf_table(k, p);
            for (std::size_t q = 0; q <= k; ++q) {
                const double got = binomial_pmf(k, p, q);
                if (want[q] < 1e-250) EXPECT_LT(got, 1e-240);
                else EXPECT_LE(rel(got, want[q]), 1e-11) << k << " " << p << " " << q;
            }
        }
    }
}

TEST(TailRegion, Classification) {
    EXPECT_EQ(classify({0, 2.0}, 9.0), TailRegion::lower);      // 0 < 9 - 6
    EXPECT_EQ(classify({16, 2.0}, 9.0), TailRegion::upper);     // 16 > 9 + 6
    EXPECT_EQ(classify({9, 2.0}, 9.0), TailRegion::not_applicable);
    EXPECT_EQ(classify({3, 2.0}, 9.0), TailRegion::not_applicable); // boundary excluded
    EXPECT_EQ(classify({0, 0.9}, 9.0), TailRegion::not_applicable);
    EXPECT_EQ(classify({0, 2.0, TailSide::upper}, 9.0), TailRegion::not_applicable);
    EXPECT_STREQ(to_string(TailRegion::not_applicable), "na");
}

TEST(Extremal, EqualPointBeatsPerturbationInTail) {
    // k = 6, m = 3, q = 0 lies in the lower tail once A = 1.5 (0 < 3 - 1.5 sqrt 3).
    const auto equal = check_extremal(PBParams({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}), {0, 1.5});
    EXPECT_EQ(equal.verdict, ExtremalVerdict::satisfied);
    const auto skew = check_extremal(PBParams({0.9, 0.1, 0.5, 0.5, 0.5, 0.5}), {0, 1.5});
    EXPECT_EQ(skew.verdict, ExtremalVerdict::satisfied);
    EXPECT_LT(skew.h_value, skew.binomial_value);
    EXPECT_EQ(check_extremal(PBParams({0.1, 0.9}), {1, 0.9}).verdict, ExtremalVerdict::not_applicable);
}

TEST(Extremal, ViolationReportsWitness) {
    // m = 0.3775, so q = 1 sits above m + 1.01 sqrt(m) and a skewed vector
    // puts more mass on S = 1 than the equal-probability one.
    const PBParams skewed({0.015, 0.01, 0.35, 0.0025});
    const auto r = check_extremal(skewed, {1, 1.01});
    EXPECT_EQ(r.region, TailRegion::upper);
    EXPECT_EQ(r.verdict, ExtremalVerdict::violated);
    EXPECT_GT(r.h_value, r.binomial_value);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(*r.witness, skewed);
}

TEST(Extremal, SearchFindsSmallMeanCounterexample) {
    SearchOptions opts;
    opts.A = 1.01;
    opts.grid = 40;
    const auto r = extremal_search(4, 0.375, 1, opts);
    EXPECT_EQ(r.region, TailRegion::upper);
    EXPECT_EQ(r.verdict, ExtremalVerdict::violated);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_NEAR(r.witness->m(), 0.375, 1e-12);
    EXPECT_NEAR(pb_pmf(*r.witness, 1), r.h_value, 1e-15);
}

TEST(Extremal, SearchConfirmsEqualMaxInTails) {
    SearchOptions opts;
    opts.grid = 12;
    opts.tolerance = 1e-12;
    for (std::size_t k : {4, 6}) {
        for (double m : {1.0, 2.0}) {
            for (std::size_t q = 0; q <= k; ++q) {
                const auto r = extremal_search(k, m, q, opts);
                if (r.region == TailRegion::not_applicable) continue;
                EXPECT_EQ(r.verdict, ExtremalVerdict::satisfied) << k << " " << m << " " << q;
                EXPECT_NEAR(r.binomial_value, binomial_pmf(k, m / k, q), 1e-15);
                EXPECT_GT(r.points_examined, 0u);
            }
        }
    }
}

TEST(Extremal, SearchFindsInteriorMaximumAboveBinomial) {
    // q = m = 1, k = 4: a vector (1, 0, 0, 0) gives P(S = 1) = 1 > binomial.
    SearchOptions opts;
    const auto r = extremal_search(4, 1.0, 1, opts);
    EXPECT_EQ(r.region, TailRegion::not_applicable);
    EXPECT_FALSE(r.equal_is_max);
    EXPECT_NEAR(r.h_value, 1.0, 1e-12);
    ASSERT_TRUE(r.witness.has_value());
}

TEST(Extremal, SearchSizeLimits) {
    SearchOptions opts;
    EXPECT_THROW(extremal_search(13, 2.0, 0, opts), SizeError);
    EXPECT_THROW(extremal_search(4, 5.0, 0, opts), DomainError);
}

TEST(Curvature, SmallCases) {
    // -(1/2) + 2 - (1/2): with k = 4, p = 1/2, q = 2 the restricted h is 3/8 + t^2/2.
    EXPECT_NEAR(curvature_expression(4, 0.5, 2), 1.0, 1e-15);
    EXPECT_NEAR(restricted_second_difference(4, 0.5, 2), 2.0 * 0.5, 1e-6);
    EXPECT_NEAR(curvature_expression(100, 0.5, 1), -96.0, 1e-12);
    EXPECT_GT(curvature_expression(20, 0.3, 2) * restricted_second_difference(20, 0.3, 2), 0.0);
    EXPECT_THROW(curvature_expression(4, 0.0, 2), DomainError);
    EXPECT_THROW(curvature_expression(4, 0.5, 0), DomainError);
    EXPECT_THROW(curvature_expression(4, 0.5, 4), DomainError);
}

TEST(Curvature, EndpointFormsAreContinuous) {
    // The q = 1 and q = k - 1 special forms agree with the general expression.
    for (double p : {0.2, 0.5, 0.7}) {
        EXPECT_NEAR(curvature_expression(10, p, 1), curvature_expression_real(10, p, 1), 1e-12);
        EXPECT_NEAR(curvature_expression(10, p, 9), curvature_expression_real(10, p, 9), 1e-12);
    }
}

TEST(Curvature, RootsZeroExpression) {
    for (std::size_t k : {200, 1000}) {
        for (double p : {0.3, 0.5, 0.8}) {
            const auto r = q_roots(k, p);
            EXPECT_LT(r.q_minus, k * p);
            EXPECT_GT(r.q_plus, k * p);
            EXPECT_NEAR(curvature_expression_real(k, p, r.q_minus), 0.0, 1e-9);
            EXPECT_NEAR(curvature_expression_real(k, p, r.q_plus), 0.0, 1e-9);
        }
    }
    const auto half = q_roots(1000, 0.5);
    EXPECT_NEAR(half.q_minus, 500.0 - std::sqrt(250.0), 1e-9);
    EXPECT_NEAR(half.q_plus, 500.0 + std::sqrt(250.0), 1e-9);
}

TEST(Curvature, RootsInsideWindow) {
    for (std::size_t k : {1000, 10000}) {
        for (double p : {0.1, 0.5, 0.9}) {
            const double m = k * p;
            if (m < 100) continue;
            const auto r = q_roots(k, p);
            EXPECT_GT(r.q_minus, m - 2 * std::sqrt(m));
            EXPECT_LT(r.q_plus, m + 2 * std::sqrt(m));
        }
    }
}

TEST(Curvature, SecondDifferenceMatchesScaledExpression) {
    for (std::size_t k : {6, 12}) {
        for (double p : {0.25, 0.5}) {
            for (std::size_t q = 1; q < k; ++q) {
                const double fd = restricted_second_difference(k, p, q);
                const double predicted = curvature_scale(k, p, q) * curvature_expression(k, p, q);
                EXPECT_NEAR(fd, predicted, 1e-5 * std::max(1.0, std::abs(predicted))) << k << " " << p << " " << q;
            }
        }
    }
}

TEST(Stationarity, EqualPointIsStationary) {
    EXPECT_LT(stationarity_residual(PBParams(std::vector<double>(8, 0.3)), 3), 1e-8);
    EXPECT_GT(stationarity_residual(PBParams({0.1, 0.2, 0.6, 0.9}), 2), 1e-3);
    EXPECT_THROW(stationarity_residual(PBParams({0.0, 0.5}), 1), DomainError);
}
