#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "sbscatter/multiscale.hpp"

using namespace sbscatter;

namespace {

const cplx kTheta(0.0, kPi / 32.0);

}  // namespace

TEST(Fit, ExactLine) {
    const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.r2, 1.0, 1e-14);
}

TEST(Fit, PowerLawExponent) {
    std::vector<double> x, y;
    for (double v : {0.5, 0.1, 0.02, 0.004}) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, 1.5));
    }
    EXPECT_NEAR(fit_exponent(x, y).slope, 1.5, 1e-12);
}

TEST(Fit, FloorDropsPointsAndTooFewThrow) {
    EXPECT_THROW(fit_exponent({1, 2, 3}, {1, 0, 1e-20}), FitError);
    EXPECT_THROW(fit_line({1.0}, {1.0}), FitError);
    EXPECT_THROW(fit_line({1, 2}, {1, 2, 3}), FitError);
}

TEST(Fit, LorentzianRecoversParameters) {
    std::vector<double> x, y;
    for (int i = -50; i <= 50; ++i) {
        const double v = 1.0 + 0.01 * i;
        x.push_back(v);
        y.push_back(2.0 / ((v - 1.02) * (v - 1.02) + 0.05 * 0.05));
    }
    const auto f = fit_lorentzian(x, y);
    EXPECT_NEAR(f.center, 1.02, 1e-10);
    EXPECT_NEAR(f.half_width, 0.05, 1e-10);
    EXPECT_NEAR(f.fwhm(), 0.1, 1e-10);
}

TEST(Ladder, Cutoffs) {
    const auto c = ladder_cutoffs(0.5, 0.25, 6);
    ASSERT_EQ(c.size(), 6u);
    EXPECT_DOUBLE_EQ(c[0], 0.5);
    EXPECT_DOUBLE_EQ(c[2], 0.03125);
    EXPECT_DOUBLE_EQ(c[5], 0.5 * std::pow(0.25, 5));
}

TEST(Ladder, ParameterValidation) {
    ModelParams p;
    p.n_modes = 4;
    const auto grid = build_grid(p);
    const auto basis = std::make_shared<const FockBasis>(4, 1);
    EXPECT_THROW(build_ladder(p, kTheta, grid, basis, 1.5, 0.25, 3), ConfigError);
    EXPECT_THROW(build_ladder(p, kTheta, grid, basis, 0.5, 0.26, 3), ConfigError);
    EXPECT_THROW(build_ladder(p, kTheta, grid, basis, 0.5, 0.25, 0), ConfigError);
}

TEST(Ladder, WarnsBelowSmallestNode) {
    ModelParams p;
    p.g = 0.05;
    p.n_modes = 20;
    const auto grid = build_grid(p);
    const auto basis = std::make_shared<const FockBasis>(20, 1);
    const auto ladder = build_ladder(p, kTheta, grid, basis, 0.5, 0.1, 4);
    EXPECT_EQ(ladder.levels.size(), 4u);
    EXPECT_FALSE(ladder.warnings.empty());
}

TEST(Ladder, CutoffBelowGridIsExact) {
    ModelParams p;
    p.g = 0.05;
    p.n_modes = 40;
    const auto grid = build_grid(p);
    const auto basis = std::make_shared<const FockBasis>(40, 1);
    const auto ref = compute_resonances(p, kTheta, grid, basis, ResonanceOptions{0.0, false});
    const double below = 0.5 * grid.min_node();
    const auto ladder = build_ladder(p, kTheta, grid, basis, below, 0.25, 2);
    for (const auto& row : convergence_rows(ladder, ref)) {
        EXPECT_EQ(row.gap0, 0.0);
        EXPECT_EQ(row.gap1, 0.0);
    }
}

TEST(Ladder, ZeroCouplingHasNoGaps) {
    ModelParams p;
    p.n_modes = 30;
    const auto grid = build_grid(p);
    const auto basis = std::make_shared<const FockBasis>(30, 1);
    const auto ref = compute_resonances(p, kTheta, grid, basis);
    for (const auto& row : convergence_rows(build_ladder(p, kTheta, grid, basis, 0.5, 0.25, 3), ref)) {
        EXPECT_EQ(row.gap0, 0.0);
        EXPECT_EQ(row.gap1, 0.0);
        EXPECT_LT(row.proj_gap, 1e-14);
    }
}

TEST(Ladder, GapsShrinkWithCutoff) {
    ModelParams p;
    p.g = 0.05;
    p.n_modes = 300;
    const auto grid = build_grid(p);
    const auto basis = std::make_shared<const FockBasis>(300, 1);
    const auto ref = compute_resonances(p, kTheta, grid, basis, ResonanceOptions{0.0, false});
    const auto rep = convergence_report(build_ladder(p, kTheta, grid, basis, 0.5, 0.25, 6), ref);
    ASSERT_EQ(rep.rows.size(), 6u);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        EXPECT_LT(rep.rows[i].gap0, rep.rows[i - 1].gap0);
        EXPECT_LT(rep.rows[i].gap1, rep.rows[i - 1].gap1);
    }
    const double mu = p.mu;
    EXPECT_GE(rep.exponent0.slope, 1.0 + mu / 2.0 - 0.15);
    EXPECT_GE(rep.exponent1.slope, 1.0 + mu / 2.0 - 0.15);
    EXPECT_GE(rep.proj_exponent.slope, mu / 2.0 - 0.15);
}

TEST(Ladder, ProjectionGapLinearInCoupling) {
    ModelParams p;
    p.n_modes = 200;
    const auto grid = build_grid(p);
    const auto basis = std::make_shared<const FockBasis>(200, 1);
    const auto t = g_ratio_test(p, kTheta, grid, basis, 0.5, 0.25, 4, 0.025);
    EXPECT_EQ(t.g_high, 0.05);
    EXPECT_NEAR(t.mean_proj, 2.0, 0.3);
    // Eigenvalue gaps come from the second-order self-energy and scale like g².
    EXPECT_NEAR(t.mean_gap1, 4.0, 0.6);
}
