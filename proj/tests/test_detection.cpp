#define BOOST_MATH_OVERFLOW_ERROR_POLICY ignore_error
#include "ncr/detection.hpp"
#include "ncr/distributions.hpp"
#include "ncr/errors.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace ncr;

namespace {

// Q1(a, b) as the survival function of a non-central chi-square with 2 dof.
double marcum_oracle(double a, double b) {
    boost::math::non_central_chi_squared d(2.0, a * a);
    return boost::math::cdf(boost::math::complement(d, b * b));
}

}  // namespace

TEST(RhoThreshold, KnownValue) {
    // 1 - 0.6^2 = 0.64 and 0.64^(N-1) with N = 3 gives 0.4096.
    EXPECT_NEAR(rho_threshold_for_pfa(0.4096, 3), 0.6, 1e-14);
    EXPECT_NEAR(pfa_for_rho_threshold(0.6, 3), 0.4096, 1e-14);
}

TEST(RhoThreshold, RoundTrip) {
    for (int n : {3, 10, 100, 1000}) {
        for (double pfa : {1e-6, 1e-3, 0.1, 0.5, 0.9}) {
            const double t = rho_threshold_for_pfa(pfa, n);
            EXPECT_NEAR(pfa_for_rho_threshold(t, n), pfa, 1e-12 * std::max(1.0, pfa));
        }
    }
}

TEST(RhoThreshold, TendsToZeroAsPfaTendsToOne) {
    EXPECT_LT(rho_threshold_for_pfa(1.0 - 1e-12, 10), 1e-6);
}

TEST(RhoThreshold, MatchesNullCdf) {
    for (double pfa : {0.01, 0.3}) {
        const double t = rho_threshold_for_pfa(pfa, 20);
        EXPECT_NEAR(1.0 - cdf_rho_hat_null(t, 20), pfa, 1e-12);
    }
}

TEST(RhoThreshold, RejectsInvalidInput) {
    EXPECT_THROW(rho_threshold_for_pfa(0.0, 10), DomainError);
    EXPECT_THROW(rho_threshold_for_pfa(1.0, 10), DomainError);
    EXPECT_THROW(rho_threshold_for_pfa(0.1, 2), DomainError);
    EXPECT_THROW(pfa_for_rho_threshold(1.5, 10), DomainError);
}

TEST(RocRhoClosedForm, MatchesMarcumOracle) {
    for (double rho : {0.1, 0.3, 0.6}) {
        for (int n : {50, 200}) {
            const double pfa = 0.01;
            const double d = 1.0 - rho * rho;
            const double a = rho * std::sqrt(2.0 * n) / d;
            const double b = std::sqrt(2.0 * n * (1.0 - std::pow(pfa, 1.0 / (n - 1)))) / d;
            EXPECT_NEAR(roc_rho_closed_form(pfa, rho, n), marcum_oracle(a, b), 1e-9);
        }
    }
}

TEST(RocRhoClosedForm, ApproachesPfaAtLargeNUnderNull) {
    for (double pfa : {1e-3, 0.1, 0.5}) {
        EXPECT_LT(std::abs(roc_rho_closed_form(pfa, 0.0, 10000) - pfa), 1e-3);
    }
}

TEST(RocRhoClosedForm, MonotoneInRho) {
    double prev = 0.0;
    for (double rho = 0.0; rho <= 0.9; rho += 0.05) {
        const double pd = roc_rho_closed_form(0.01, rho, 100);
        EXPECT_GE(pd, prev - 1e-12);
        prev = pd;
    }
}

TEST(RocRhoLegacy, NullGivesPfaExactly) {
    for (double pfa : {1e-4, 0.05, 0.5, 0.99}) {
        EXPECT_NEAR(roc_rho_closed_form_legacy(pfa, 0.0, 100), pfa, 1e-12);
    }
}

TEST(RocRhoLegacy, ConvergesToCurrentFormAtLargeN) {
    for (double rho : {0.0, 0.02}) {
        double gap = 0.0;
        for (double pfa : default_pfa_grid()) {
            gap = std::max(gap, std::abs(roc_rho_closed_form_legacy(pfa, rho, 500) -
                                         roc_rho_closed_form(pfa, rho, 500)));
        }
        EXPECT_LT(gap, 1e-3) << "rho=" << rho;
    }
}

// The two thresholds differ at O(1/N); the worst gap over rho roughly halves
// each time N doubles.
TEST(RocRhoLegacy, WorstCaseGapShrinksLikeOneOverN) {
    auto worst = [](int n) {
        double gap = 0.0;
        for (double rho = 0.0; rho <= 0.6; rho += 0.005) {
            for (double pfa : default_pfa_grid()) {
                gap = std::max(gap, std::abs(roc_rho_closed_form_legacy(pfa, rho, n) -
                                             roc_rho_closed_form(pfa, rho, n)));
            }
        }
        return gap;
    };
    const double g1 = worst(1000), g2 = worst(2000), g4 = worst(4000);
    EXPECT_NEAR(g1 / g2, 2.0, 0.3);
    EXPECT_NEAR(g2 / g4, 2.0, 0.3);
    EXPECT_LT(worst(10000), 1e-3);
}

TEST(RocRhoLegacy, AgreesWithDdnClosedFormAtSmallRho) {
    for (int n : {100, 200}) {
        double gap = 0.0;
        for (double pfa : default_pfa_grid()) {
            gap = std::max(gap, std::abs(roc_rho_closed_form_legacy(pfa, 0.02, n) -
                                         roc_ddn_closed_form(pfa, 0.02, n)));
        }
        EXPECT_LT(gap, 1e-3) << "N=" << n;
    }
}

TEST(RocRhoExact, NullGivesPfa) {
    for (double pfa : {1e-3, 0.1, 0.7}) {
        EXPECT_NEAR(roc_rho_exact(pfa, 0.0, 10), pfa, 1e-8);
        EXPECT_NEAR(roc_rho_exact(pfa, 0.0, 200), pfa, 1e-8);
    }
}

TEST(RocRhoExact, DominatesPfaAndIsMonotone) {
    double prev = 0.0;
    for (double pfa : default_pfa_grid()) {
        const double pd = roc_rho_exact(pfa, 0.3, 20);
        EXPECT_GE(pd, pfa - 1e-8);
        EXPECT_GE(pd, prev - 1e-9);
        prev = pd;
    }
}

TEST(RocRhoExact, ClosedFormCloseAtModerateN) {
    for (double pfa : {1e-3, 0.1}) {
        EXPECT_LT(std::abs(roc_rho_exact(pfa, 0.2, 100) - roc_rho_closed_form(pfa, 0.2, 100)),
                  0.01);
    }
}

TEST(DdnThreshold, RayleighRoundTrip) {
    for (double pfa : {1e-5, 0.01, 0.5}) {
        const double t = ddn_threshold_for_pfa(pfa, 1.5, 0.7, 40, ThresholdMode::RayleighApprox);
        EXPECT_NEAR(ddn_pfa_for_threshold_rayleigh(t, 1.5, 0.7, 40), pfa, 1e-12 * std::max(1.0, pfa));
    }
}

TEST(DdnThreshold, ExactThresholdHitsPfa) {
    for (int n : {1, 5, 10, 100}) {
        for (double pfa : {1e-4, 0.1, 0.9}) {
            const double t = ddn_threshold_for_pfa(pfa, 1.0, 1.0, n);
            EXPECT_NEAR(sf_ddn_exact(t, 1.0, 1.0, 0.0, n), pfa, 1e-8 * std::max(pfa, 1e-2))
                << "N=" << n << " pfa=" << pfa;
        }
    }
}

TEST(DdnThreshold, ExactApproachesRayleighAtLargeN) {
    for (double pfa : {1e-3, 0.1}) {
        const double te = ddn_threshold_for_pfa(pfa, 1.0, 1.0, 500, ThresholdMode::Exact);
        const double ta = ddn_threshold_for_pfa(pfa, 1.0, 1.0, 500, ThresholdMode::RayleighApprox);
        EXPECT_LT(std::abs(te - ta) / ta, 0.01);
    }
}

TEST(DdnThreshold, TendsToZeroAsPfaTendsToOne) {
    EXPECT_LT(ddn_threshold_for_pfa(1.0 - 1e-12, 1.0, 1.0, 10, ThresholdMode::RayleighApprox), 1e-4);
    EXPECT_LT(ddn_threshold_for_pfa(1.0 - 1e-12, 1.0, 1.0, 10, ThresholdMode::Exact), 1e-3);
}

TEST(RocDdnClosedForm, MatchesMarcumOracleAndNull) {
    for (double rho : {0.0, 0.1, 0.4}) {
        const double pfa = 0.02;
        EXPECT_NEAR(roc_ddn_closed_form(pfa, rho, 30),
                    marcum_oracle(rho * std::sqrt(60.0), std::sqrt(-2.0 * std::log(pfa))), 1e-9);
    }
    EXPECT_NEAR(roc_ddn_closed_form(0.3, 0.0, 30), 0.3, 1e-12);
}

TEST(RocDdnClosedForm, OverestimatesExactAtSmallN) {
    EXPECT_GT(roc_ddn_closed_form(0.1, 0.2, 10), roc_ddn_exact(0.1, 1.0, 1.0, 0.2, 10));
}

TEST(RocDdnExact, NullGivesPfa) {
    for (double pfa : {1e-3, 0.2, 0.8}) {
        EXPECT_NEAR(roc_ddn_exact(pfa, 1.0, 1.0, 0.0, 10), pfa, 1e-8);
    }
}

TEST(RocDdnExact, ScaleInvariant) {
    for (double pfa : {1e-3, 0.1, 0.6}) {
        const double ref = roc_ddn_exact(pfa, 1.0, 1.0, 0.3, 15);
        EXPECT_NEAR(roc_ddn_exact(pfa, 2.0, 0.5, 0.3, 15), ref, 1e-8);
        EXPECT_NEAR(roc_ddn_exact(pfa, 3.0, 7.0, 0.3, 15), ref, 1e-8);
    }
}

TEST(RocDdnExact, LargeNSucceeds) {
    RocParams p;
    p.rho = 0.2;
    p.n = 200;
    const auto curve = build_roc_curve(Detector::Ddn, RocMethod::Exact, p, default_pfa_grid());
    EXPECT_EQ(curve.failed_points(), 0u);
}

TEST(RocComparison, RhoHatBeatsDdnAtHighRho) {
    for (double pfa : default_pfa_grid()) {
        EXPECT_GE(roc_rho_exact(pfa, 0.8, 10), roc_ddn_exact(pfa, 1.0, 1.0, 0.8, 10) - 1e-9)
            << "pfa=" << pfa;
    }
}

TEST(RocCurve, DefaultGridShape) {
    const auto g = default_pfa_grid();
    ASSERT_EQ(g.size(), 60u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-4);
    EXPECT_DOUBLE_EQ(g.back(), 0.99);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(RocCurve, InvalidGridThrows) {
    RocParams p;
    EXPECT_THROW(build_roc_curve(Detector::RhoHat, RocMethod::Exact, p, {}), DomainError);
    EXPECT_THROW(build_roc_curve(Detector::RhoHat, RocMethod::Exact, p, {0.1, 1.0}), DomainError);
    EXPECT_THROW(build_roc_curve(Detector::RhoHat, RocMethod::Exact, p, {0.0}), DomainError);
}

TEST(RocCurve, FailedPointIsRecordedNotThrown) {
    RocParams p;
    p.rho = 0.9999;
    p.n = 100000;
    const auto curve = build_roc_curve(Detector::RhoHat, RocMethod::Exact, p, {0.1});
    ASSERT_EQ(curve.points.size(), 1u);
    EXPECT_FALSE(curve.points[0].ok());
    EXPECT_EQ(curve.points[0].status.rfind("failed:", 0), 0u);
    EXPECT_TRUE(std::isnan(curve.points[0].pd));
    EXPECT_EQ(curve.failed_points(), 1u);
}

TEST(RocCurve, MonteCarloMatchesExactForRhoHat) {
    RocParams p;
    p.rho = 0.4;
    p.n = 10;
    p.trials = 100000;
    p.seed = 7;
    const std::vector<double> grid{1e-3, 0.01, 0.1, 0.3, 0.7};
    const auto mc = build_roc_curve(Detector::RhoHat, RocMethod::MonteCarlo, p, grid);
    const auto ex = build_roc_curve(Detector::RhoHat, RocMethod::Exact, p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ASSERT_TRUE(mc.points[i].ok());
        EXPECT_LT(std::abs(mc.points[i].pd - ex.points[i].pd), 0.01) << "pfa=" << grid[i];
    }
}

TEST(RocCurve, MonteCarloMatchesExactForDdn) {
    RocParams p;
    p.rho = 0.5;
    p.n = 10;
    p.trials = 100000;
    p.seed = 11;
    const std::vector<double> grid{1e-3, 0.01, 0.1, 0.3, 0.7};
    const auto mc = build_roc_curve(Detector::Ddn, RocMethod::MonteCarlo, p, grid);
    const auto ex = build_roc_curve(Detector::Ddn, RocMethod::Exact, p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LT(std::abs(mc.points[i].pd - ex.points[i].pd), 0.01) << "pfa=" << grid[i];
    }
}

TEST(Parsing, DetectorAndMethodNames) {
    EXPECT_EQ(parse_detector("rho"), Detector::RhoHat);
    EXPECT_EQ(parse_detector("glr"), Detector::RhoHat);
    EXPECT_EQ(parse_detector("ddn"), Detector::Ddn);
    EXPECT_EQ(parse_roc_method("exact"), RocMethod::Exact);
    EXPECT_EQ(parse_roc_method("approx"), RocMethod::ClosedForm);
    EXPECT_EQ(parse_roc_method("mc"), RocMethod::MonteCarlo);
    EXPECT_THROW(parse_detector("bogus"), DomainError);
    EXPECT_THROW(parse_roc_method("bogus"), DomainError);
}
