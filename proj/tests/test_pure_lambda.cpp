#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gfield/pure_lambda.hpp"

using namespace gfield;

namespace {
const double kLog2 = std::numbers::ln2;
const double kRth = 2.0 / 1.1;
}  // namespace

TEST(PureModel, RejectsBadParameters) {
    EXPECT_THROW(PureModel(0, 0.1, 1.0), DomainError);
    EXPECT_THROW(PureModel(2, 0.0, 1.0), DomainError);
    EXPECT_THROW(PureModel(2, 0.1, -1.0), DomainError);
    EXPECT_THROW(xi(PureModel(2, 0.1, 1.0), 1.5), DomainError);
    EXPECT_THROW(Lmod(PureModel(2, 0.1, 1.0), -0.1), DomainError);
}

TEST(PureModel, XiAndRho) {
    const PureModel q(2, 0.1, 1.76);
    EXPECT_EQ(xi(q, 1.0), 0.0);
    EXPECT_NEAR(rho(q, 1.0), std::sqrt(1.76 * 0.1 / 2), 1e-15);
    EXPECT_TRUE(std::isinf(rho(q, 0.0)));
    EXPECT_EQ(snr(q, 0.0), 0.0);
    // hand evaluation at m = 0.5: xi = 7.5, slope = 1
    EXPECT_NEAR(rho(q, 0.5), std::sqrt(1.76 * 0.1 * 8.5), 1e-14);
    const PureModel lin(1, 0.1, 1.3);
    EXPECT_NEAR(rho(lin, 0.0), std::sqrt(1.3 * 1.1), 1e-14);
}

TEST(Landscape, QuadraticReferenceValues) {
    const PureModel p(2, 0.1, 1.76);
    EXPECT_EQ(Lmod(p, 0.0), shannon_capacity(0.1));
    EXPECT_NEAR(Lmod(p, 0.0), 1.19894763639919, 1e-12);
    EXPECT_NEAR(Lmod(p, 1.0), 1.21802992061546, 1e-3);
    EXPECT_NEAR(Lmod(p, 0.03), 1.19894235677482, 1e-3);
    // local minimum sits near m = 0.03
    const auto grid = landscape(p, 0.001);
    double best = 1e9, at = -1;
    for (const auto& g : grid)
        if (g.m > 0.0 && g.m < 0.2 && g.L < best) best = g.L, at = g.m;
    EXPECT_NEAR(at, 0.03, 0.01);
    EXPECT_NEAR(best, 1.19894235677482, 1e-3);
    EXPECT_EQ(grid.size(), 1001u);
    EXPECT_EQ(grid.back().m, 1.0);
}

TEST(Landscape, LinearReferenceValue) {
    EXPECT_NEAR(Lmod(PureModel(1, 0.1, 1.76), 0.0), 1.10816262622021, 1e-3);
}

TEST(Landscape, ZeroPinnedToCapacityForHigherOrders) {
    for (int lam : {2, 3, 5})
        for (double s2 : {0.01, 0.1, 1.0})
            for (double R : {0.3, 1.0, 4.0}) EXPECT_NEAR(Lmod(PureModel(lam, s2, R), 0.0), shannon_capacity(s2), 1e-12);
}

TEST(Iteration, ZeroIsFixedForHigherOrders) {
    const auto r = converge(PureModel(2, 0.1, 1.0), 0.0);
    EXPECT_EQ(r.m, 0.0);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);
}

TEST(Iteration, LinearConvergesToReferenceValue) {
    const auto r = converge(PureModel(1, 0.1, 1.5), 0.5);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.m, 0.7902, 0.005);
}

TEST(Iteration, InformativeBranchIsAFixedPoint) {
    const PureModel p(2, 0.1, 2.5);
    const auto r = converge(p, 0.99);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::fabs(fixed_point_map(p, r.m) - r.m), 1e-9);
    // above the threshold there is no informative fixed point left
    EXPECT_LT(r.m, 1e-6);
}

TEST(Overlap, QuadraticJumpsAroundThreshold) {
    EXPECT_NEAR(overlap(PureModel(2, 0.1, 0.8 * kRth)), 1.0, 1e-3);
    EXPECT_EQ(overlap(PureModel(2, 0.1, 1.2 * kRth)), 0.0);
}

TEST(Overlap, CubicAllOrNothing) {
    const double rs = r_star(0.1);
    EXPECT_NEAR(overlap(PureModel(3, 0.1, 0.95 * rs)), 1.0, 1e-3);
    EXPECT_EQ(overlap(PureModel(3, 0.1, 1.05 * rs)), 0.0);
}

TEST(Overlap, LinearReferenceValues) {
    EXPECT_NEAR(overlap(PureModel(1, 0.1, 1.5)), 0.7902, 0.005);
    EXPECT_NEAR(overlap(PureModel(1, 0.1, 3.0)), 0.3085, 0.005);
}

TEST(Overlap, NonincreasingInLoad) {
    for (int lam : {1, 2, 3}) {
        double prev = 2.0;
        for (double R = 0.2; R <= 3.0; R += 0.1) {
            const double m = overlap(PureModel(lam, 0.1, R));
            EXPECT_LE(m, prev + 1e-9) << lam << " " << R;
            prev = m;
        }
    }
}

TEST(Overlap, GlobalMinimumBeatsAlgorithmicOverlap) {
    for (double R : {1.2, 1.5, 1.7, 1.9, 2.5}) {
        const PureModel p(2, 0.1, R);
        EXPECT_LE(Lmod(p, overlap(p)), Lmod(p, amp_overlap(p)) + 1e-12) << R;
    }
}

TEST(ZeroOverlap, LinearOverlapNeverZero) {
    for (double s2 : {0.01, 0.1, 0.5, 2.0})
        for (double R : {0.2, 1.0, 3.0, 6.0}) {
            const PureModel p(1, s2, R);
            EXPECT_GT(fixed_point_map(p, 0.0), 1e-10) << s2 << " " << R;
            const double h = 1e-4;
            EXPECT_LE((Lmod(p, 2 * h) - Lmod(p, 0.0)) / (2 * h), 0.0) << s2 << " " << R;
            EXPECT_GT(overlap(p), 0.0);
        }
}

TEST(ZeroOverlap, QuadraticZeroChangesCurvatureAtThreshold) {
    const double h = 1e-3;
    auto curv = [&](double R) {
        const PureModel p(2, 0.1, R);
        return Lmod(p, 2 * h) - 2 * Lmod(p, h) + Lmod(p, 0.0);
    };
    EXPECT_LT(curv(kRth * 0.99), 0.0);
    EXPECT_GT(curv(kRth * 1.01), 0.0);
}

TEST(ZeroOverlap, MapSlopeAtZeroIsOneAtThreshold) {
    const PureModel p(2, 0.1, kRth);
    const double h = 1e-7;
    EXPECT_NEAR(fixed_point_map(p, h) / h, 1.0, 1e-5);
}

TEST(Thresholds, ClosedForms) {
    EXPECT_NEAR(shannon_capacity(0.1), 1.19894763639919, 1e-12);
    EXPECT_NEAR(r_th_quadratic(0.1), 1.81818181818182, 1e-12);
    EXPECT_NEAR(r_star(0.1), 1.19894763639919 / kLog2, 1e-12);
    EXPECT_NEAR(critical_sigma2_quadratic(), 0.084, 0.001);
    const double s = critical_sigma2_quadratic();
    EXPECT_NEAR(r_th_quadratic(s), r_star(s), 1e-10);
    EXPECT_THROW(shannon_capacity(0.0), DomainError);
}

TEST(Bounds, BracketLandscape) {
    for (int lam : {1, 2, 3})
        for (double R : {0.5, 1.76, 3.0})
            for (double m = 0.05; m <= 1.0; m += 0.05) {
                const PureModel p(lam, 0.1, R);
                const auto b = bounds_cor2(p, m);
                const double l = Lmod(p, m);
                EXPECT_LE(b.lower, l + 1e-12);
                EXPECT_GE(b.upper, l - 1e-12);
                EXPECT_NEAR(b.upper - b.lower, 0.5 * R * snr(p, m), 1e-12);
            }
}

TEST(Bounds, BracketLocalMinimum) {
    const auto b = bounds_cor2(PureModel(2, 0.1, 1.76), 0.03);
    EXPECT_LE(b.lower, 1.19894235677482);
    EXPECT_GE(b.upper, 1.19894235677482);
}

TEST(Probe, CriticalSlowingDown) {
    const auto starts = default_probe_starts();
    ASSERT_EQ(starts.size(), 100u);
    EXPECT_TRUE(convergence_probe(PureModel(2, 0.1, kRth), starts).capped);
    EXPECT_NEAR(convergence_probe(PureModel(2, 0.1, 3.0), starts).max_iterations, 49, 15);
    EXPECT_NEAR(convergence_probe(PureModel(2, 0.1, 0.4), starts).max_iterations, 7, 3);
}

TEST(AlgorithmicOverlap, DepartsFromOneNearAlgorithmicThreshold) {
    EXPECT_GT(amp_overlap(PureModel(2, 0.1, 1.36)), 0.9);
    EXPECT_LT(amp_overlap(PureModel(2, 0.1, 1.40)), 0.9);
    EXPECT_GT(amp_overlap(PureModel(1, 0.1, 1.0)), 0.0);
}

TEST(InfoRate, AllOrNothingCurve) {
    const double C = shannon_capacity(0.1);
    for (int lam : {3, 5})
        for (double R = 0.2; R <= 3.0; R += 0.1)
            EXPECT_NEAR(info_rate(PureModel(lam, 0.1, R)), std::min(R * kLog2, C), 5e-3) << lam << " " << R;
}

TEST(InfoRate, LinearReferenceValues) {
    EXPECT_NEAR(info_rate(PureModel(1, 0.1, 1.0)), 0.6907, 0.003);
    EXPECT_NEAR(info_rate(PureModel(1, 0.1, 6.0)), 1.1629, 0.003);
}
