#include <cmath>
#include <complex>
#include <numeric>

#include <gtest/gtest.h>

#include "sbscatter/quadrature.hpp"

using namespace sbscatter;

TEST(GaussLegendre, TwoPointRuleOnUnitInterval) {
    const auto r = quad::mapped(quad::gauss_legendre(2), 0.0, 1.0);
    EXPECT_NEAR(r.nodes[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r.nodes[1], 0.5 + 0.5 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
    EXPECT_NEAR(r.weights[1], 0.5, 1e-15);
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
    for (std::size_t n : {1u, 3u, 8u, 17u, 64u}) {
        const auto r = quad::gauss_legendre(n);
        for (std::size_t deg = 0; deg < 2 * n; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], static_cast<double>(deg));
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1.0);
            EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " deg=" << deg;
        }
    }
}

TEST(GaussLegendre, NodesAscendingAndInsideInterval) {
    const auto r = quad::gauss_legendre(301);
    for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) EXPECT_LT(r.nodes[i], r.nodes[i + 1]);
    EXPECT_GT(r.nodes.front(), -1.0);
    EXPECT_LT(r.nodes.back(), 1.0);
    EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 2.0, 1e-13);
}

TEST(GaussLegendre, ZeroPointsRejected) { EXPECT_THROW(quad::gauss_legendre(0), ConfigError); }

TEST(Adaptive, SmoothRealIntegrand) {
    const auto r = quad::integrate([](double x) { return std::exp(-x * x); }, -3.0, 3.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, std::sqrt(M_PI) * std::erf(3.0), 1e-13);
}

TEST(Adaptive, NearPoleComplexIntegrand) {
    // ∫_0^2 dx / (x − 1 + iη) = log((1 + iη)/(−1 + iη))
    const double eta = 1e-4;
    const auto r = quad::integrate([&](double x) { return 1.0 / std::complex<double>(x - 1.0, eta); }, 0.0, 2.0,
                                   {1.0}, quad::Options{1e-14, 1e-12, 100000});
    const std::complex<double> exact = std::log(std::complex<double>(1.0, eta) / std::complex<double>(-1.0, eta));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(std::abs(r.value - exact), 0.0, 1e-10);
}

TEST(Adaptive, VectorValuedIntegrand) {
    const auto r = quad::integrate(
        [](double x) {
            Eigen::VectorXd v(2);
            v << std::sin(x), std::cos(x);
            return v;
        },
        0.0, M_PI);
    EXPECT_NEAR(r.value[0], 2.0, 1e-12);
    EXPECT_NEAR(r.value[1], 0.0, 1e-12);
}

TEST(Adaptive, EmptyIntervalIsZero) {
    const auto r = quad::integrate([](double x) { return x; }, 1.0, 1.0);
    EXPECT_EQ(r.value, 0.0);
}
