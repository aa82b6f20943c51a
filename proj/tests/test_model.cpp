#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>

#include <gtest/gtest.h>

#include "sbscatter/linalg.hpp"
#include "sbscatter/model.hpp"

using namespace sbscatter;

namespace {

ModelParams defaults() { return ModelParams{}; }

std::shared_ptr<const FockBasis> basis_for(std::size_t n_modes, std::size_t n_max) {
    return std::make_shared<const FockBasis>(n_modes, n_max);
}

Eigen::VectorXcd sorted_by_real(Eigen::VectorXcd v) {
    std::sort(v.data(), v.data() + v.size(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters

TEST(ModelParams, DefaultsValidate) { EXPECT_NO_THROW(defaults().validate()); }

TEST(ModelParams, MuOutsideRangeRejected) {
    ModelParams p;
    p.mu = 0.7;
    try {
        p.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("mu must lie in (0, 1/2)"), std::string::npos);
    }
}

TEST(ModelParams, ThetaRangeChecked) {
    ModelParams p;
    p.theta = cplx(0.0, 0.3);
    EXPECT_THROW(p.validate(), ConfigError);
    p.theta = cplx(2e-3, 0.05);
    EXPECT_THROW(p.validate(), ConfigError);
    p.theta = 0.0;
    EXPECT_NO_THROW(p.validate());
}

TEST(ModelParams, TailToleranceChecked) {
    ModelParams p;
    p.k_max = 2.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

// ---------------------------------------------------------------------------
// Form factor and dispersion

TEST(FormFactor, ValueAtOne) { EXPECT_NEAR(form_factor(defaults(), 1.0), std::exp(-1.0), 1e-15); }

TEST(FormFactor, ValueAtFour) {
    const double f = form_factor(defaults(), 4.0);
    EXPECT_NEAR(f, std::exp(-16.0) * std::pow(4.0, -0.25), 1e-22);
    EXPECT_NEAR(f, 7.96e-8, 0.01e-8);
}

TEST(FormFactor, DecaysBelowTailTolerance) {
    const ModelParams p;
    EXPECT_LT(form_factor(p, p.k_max), p.tail_tol);
}

TEST(FormFactor, NonPositiveMomentumRejected) {
    EXPECT_THROW(form_factor(defaults(), 0.0), DomainError);
    EXPECT_THROW(form_factor(defaults(), -1.0), DomainError);
    EXPECT_THROW(dilated_form_factor(defaults(), 0.0), DomainError);
    EXPECT_THROW(dilated_dispersion(defaults(), -2.0), DomainError);
}

TEST(DilatedFunctions, IdentityAtThetaZero) {
    const ModelParams p;
    EXPECT_EQ(dilated_dispersion(cplx(0.0, 0.0), 2.0), cplx(2.0, 0.0));
    EXPECT_NEAR(std::abs(dilated_form_factor(p, cplx(0.0, 0.0), 2.0) - form_factor(p, 2.0)), 0.0, 1e-17);
}

TEST(DilatedFunctions, DispersionAtPiOver32) {
    const cplx w = dilated_dispersion(cplx(0.0, kPi / 32.0), 2.0);
    EXPECT_NEAR(w.real(), 1.99037, 1e-5);
    EXPECT_NEAR(w.imag(), -0.196034, 1e-6);
}

TEST(DilatedFunctions, FormFactorAtPiOver32) {
    // e^{-θ(1+μ)} e^{-e^{-2θ}} at k = 1, θ = iπ/32, μ = 1/4.
    const cplx f = dilated_form_factor(defaults(), cplx(0.0, kPi / 32.0), 1.0);
    const cplx expected = std::exp(cplx(0.0, -5.0 * kPi / 128.0)) * std::exp(-std::exp(cplx(0.0, -kPi / 16.0)));
    EXPECT_NEAR(std::abs(f - expected), 0.0, 1e-15);
}

TEST(DilatedFunctions, AnalyticContinuationOfScaledFormFactor) {
    // For real θ, f^θ(k) = e^{-3θ/2} f(e^{-θ} k).
    const ModelParams p;
    const double th = 0.3, k = 1.7;
    const double direct = std::exp(-th * (1.0 + p.mu)) * std::exp(-std::exp(-2.0 * th) * k * k) *
                          std::pow(k, -0.5 + p.mu);
    const double scaled = std::exp(-1.5 * th) * form_factor(p, std::exp(-th) * k);
    EXPECT_NEAR(dilated_form_factor(p, cplx(th, 0.0), k).real(), direct, 1e-15);
    EXPECT_NEAR(direct, scaled, 1e-15);
}

// ---------------------------------------------------------------------------
// Grid

TEST(Grid, TwoPointGaussLegendre) {
    const RadialGrid g = build_grid(2, 1.0, GridRule::GaussLegendre);
    EXPECT_NEAR(g.nodes[0], 0.211325, 1e-6);
    EXPECT_NEAR(g.nodes[1], 0.788675, 1e-6);
    EXPECT_NEAR(g.weights[0], 0.5, 1e-15);
    EXPECT_NEAR(g.weights[1], 0.5, 1e-15);
}

TEST(Grid, WeightsSumToKmax) {
    const ModelParams p;
    for (const char* rule : {"gauss-legendre", "refined"}) {
        const RadialGrid g = build_grid(p, rule);
        EXPECT_EQ(g.size(), p.n_modes);
        EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), p.k_max, 1e-12) << rule;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) EXPECT_LT(g.nodes[i], g.nodes[i + 1]);
        EXPECT_GT(g.nodes.front(), 0.0);
    }
}

TEST(Grid, RefinedGridIsDenserNearE1) {
    const ModelParams p;
    const RadialGrid g = build_grid(p, "refined");
    EXPECT_LT(g.max_spacing(0.9, 1.1), 0.5 * g.max_spacing(3.0, 4.0));
    const RadialGrid plain = build_grid(p, "gauss-legendre");
    EXPECT_LT(g.max_spacing(0.9, 1.1), plain.max_spacing(0.9, 1.1));
}

TEST(Grid, UnknownRuleRejected) { EXPECT_THROW(build_grid(defaults(), "simpson"), ConfigError); }

// ---------------------------------------------------------------------------
// Couplings

TEST(Coupling, NormMatchesContinuum) {
    const ModelParams p;
    const RadialGrid g = build_grid(p);
    const Eigen::VectorXcd c = effective_coupling(p, cplx(0.0, 0.0), g);
    const auto oracle = quad::integrate(
        [&](double r) {
            const double f = form_factor(p, r);
            return 4.0 * kPi * r * r * f * f;
        },
        0.0, p.k_max, {1e-6, 1e-3, 1e-1}, quad::Options{1e-14, 1e-12, 100000});
    // Weak r^{1/2} endpoint behaviour limits the Gauss rule's accuracy.
    EXPECT_NEAR(c.squaredNorm(), oracle.value, 1e-5 * oracle.value);
}

TEST(Coupling, RealPositiveAtThetaZero) {
    const ModelParams p;
    const Eigen::VectorXcd c = effective_coupling(p, cplx(0.0, 0.0), build_grid(p));
    for (Index j = 0; j < c.size(); ++j) {
        EXPECT_EQ(c[j].imag(), 0.0);
        EXPECT_GT(c[j].real(), 0.0);
    }
}

// ---------------------------------------------------------------------------
// Basis

TEST(Basis, DimensionFormula) {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{1, 0}, {5, 1}, {7, 2}, {4, 3}, {60, 2}}) {
        const FockBasis b(n, m);
        EXPECT_EQ(static_cast<std::size_t>(b.dimension()), FockBasis::expected_dimension(n, m));
    }
    EXPECT_EQ(FockBasis::expected_dimension(60, 2), 2u * (1 + 60 + 1830));
}

TEST(Basis, VacuumForBothLevels) {
    const FockBasis b(4, 2);
    EXPECT_TRUE(b.occupation(0).empty());
    EXPECT_EQ(FockBasis::index(0, 0), 0);
    EXPECT_EQ(FockBasis::index(1, 0), 1);
    EXPECT_EQ(b.vacuum(1)[1], cplx(1.0, 0.0));
}

TEST(Basis, LookupRoundTrip) {
    const FockBasis b(6, 3);
    for (std::size_t i = 0; i < b.occupation_count(); ++i) EXPECT_EQ(b.find(b.occupation(i)).value(), i);
    EXPECT_FALSE(b.find({0, 0, 0, 0}).has_value());
}

// ---------------------------------------------------------------------------
// Hamiltonian

TEST(Hamiltonian, FreeSpectrumAtThetaZero) {
    ModelParams p;
    p.g = 0.0;
    const RadialGrid g = build_grid(5, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(5, 2);
    const auto h = assemble_hamiltonian(p, cplx(0.0, 0.0), g, b);
    const Eigen::VectorXcd ev = sorted_by_real(eigensolve(h.entries, false).values);
    Eigen::VectorXcd expected(b->dimension());
    for (Index i = 0; i < b->dimension(); ++i) {
        double e = FockBasis::level_of(i) ? p.e1 : 0.0;
        for (auto m : b->occupation(FockBasis::occupation_of(i))) e += g.nodes[m];
        expected[i] = e;
    }
    expected = sorted_by_real(expected);
    EXPECT_LT((ev - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Hamiltonian, DilatedFreeSpectrum) {
    ModelParams p;
    const cplx th(0.0, kPi / 32.0);
    const RadialGrid g = build_grid(4, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(4, 2);
    const auto h = assemble_hamiltonian(p, th, g, b);
    for (Index i = 0; i < b->dimension(); ++i) {
        cplx e = FockBasis::level_of(i) ? p.e1 : 0.0;
        for (auto m : b->occupation(FockBasis::occupation_of(i))) e += std::exp(-th) * g.nodes[m];
        EXPECT_NEAR(std::abs(h.entries(i, i) - e), 0.0, 1e-14);
    }
    EXPECT_NEAR((h.entries - Eigen::MatrixXcd(h.entries.diagonal().asDiagonal())).norm(), 0.0, 0.0);
}

TEST(Hamiltonian, HermitianAtThetaZeroSymmetricWhenDilated) {
    ModelParams p;
    p.g = 0.3;
    const RadialGrid g = build_grid(6, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(6, 2);
    const auto h0 = assemble_hamiltonian(p, cplx(0.0, 0.0), g, b);
    EXPECT_LT((h0.entries - h0.entries.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    const auto ht = assemble_hamiltonian(p, cplx(0.0, kPi / 32.0), g, b);
    EXPECT_TRUE(is_complex_symmetric(ht.entries));
    EXPECT_FALSE(is_hermitian(ht.entries));
}

TEST(Hamiltonian, ThetaZeroLimit) {
    ModelParams p;
    p.g = 0.2;
    const RadialGrid g = build_grid(5, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(5, 2);
    const auto h0 = assemble_hamiltonian(p, cplx(0.0, 0.0), g, b);
    const auto hs = assemble_hamiltonian(p, cplx(0.0, 1e-15), g, b);
    EXPECT_LT((h0.entries - hs.entries).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Hamiltonian, CutoffMonotoneAndFullCutoffDecouples) {
    ModelParams p;
    p.g = 0.2;
    const RadialGrid g = build_grid(8, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(8, 1);
    const auto full = assemble_hamiltonian(p, g, b, p.k_max);
    ModelParams free = p;
    free.g = 0.0;
    EXPECT_EQ((full.entries - assemble_hamiltonian(free, g, b).entries).cwiseAbs().maxCoeff(), 0.0);
    // A larger cutoff zeroes a superset of couplings.
    const auto lo = assemble_hamiltonian(p, g, b, 1.0), hi = assemble_hamiltonian(p, g, b, 3.0);
    for (Index c = 0; c < lo.entries.cols(); ++c)
        for (Index r = 0; r < lo.entries.rows(); ++r)
            if (lo.entries(r, c) == cplx(0.0, 0.0)) {
                EXPECT_EQ(hi.entries(r, c), cplx(0.0, 0.0));
            }
}

TEST(Hamiltonian, GridBasisMismatchRejected) {
    const RadialGrid g = build_grid(5, 6.0, GridRule::GaussLegendre);
    EXPECT_THROW(assemble_hamiltonian(defaults(), g, basis_for(4, 1)), AssemblyError);
}

TEST(Hamiltonian, ParityConserved) {
    ModelParams p;
    p.g = 0.4;
    const RadialGrid g = build_grid(4, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(4, 3);
    const auto h = assemble_hamiltonian(p, g, b);
    for (Index c = 0; c < h.dimension(); ++c)
        for (Index r = 0; r < h.dimension(); ++r)
            if (b->parity(r) != b->parity(c)) {
                EXPECT_EQ(h.entries(r, c), cplx(0.0, 0.0));
            }
}

// ---------------------------------------------------------------------------
// Field operators

TEST(Annihilator, KillsVacuum) {
    const RadialGrid g = build_grid(5, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(5, 2);
    const auto a = apply_annihilator(b, g, [](double r) { return cplx(std::sin(r), r); });
    EXPECT_EQ((a.entries * b->vacuum(0)).norm(), 0.0);
    EXPECT_EQ((a.entries * b->vacuum(1)).norm(), 0.0);
}

TEST(Annihilator, CanonicalCommutationOnInteriorSectors) {
    const RadialGrid g = build_grid(5, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(5, 3);
    const auto h = radial_reduction(g, [](double r) { return cplx(std::exp(-r), 0.3 * r); });
    const auto l = radial_reduction(g, [](double r) { return cplx(std::cos(r), -0.1); });
    const auto ah = annihilator(b, h).entries;
    const Eigen::MatrixXcd al_star = annihilator(b, l).entries.adjoint();
    const Eigen::MatrixXcd comm = ah * al_star - al_star * ah;
    const cplx hl = h.dot(l);
    for (Index c = 0; c < b->dimension(); ++c) {
        if (b->boson_number(c) >= b->n_max()) continue;
        for (Index r = 0; r < b->dimension(); ++r) {
            const cplx expected = r == c ? hl : cplx(0.0, 0.0);
            EXPECT_NEAR(std::abs(comm(r, c) - expected), 0.0, 1e-13 * (1.0 + h.squaredNorm() + l.squaredNorm()));
        }
    }
}

TEST(Annihilator, NormIdentityBelowTopSector) {
    const RadialGrid g = build_grid(4, 6.0, GridRule::GaussLegendre);
    auto b = basis_for(4, 3);
    const auto h = radial_reduction(g, [](double r) { return cplx(r * std::exp(-r), 0.0); });
    const auto a = annihilator(b, h).entries;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(b->dimension());
    for (Index i = 0; i < psi.size(); ++i)
        if (b->boson_number(i) < b->n_max()) psi[i] = cplx(std::sin(1.0 + i), std::cos(2.0 * i));
    const double lhs = (a.adjoint() * psi).squaredNorm() - (a * psi).squaredNorm();
    EXPECT_NEAR(lhs, h.squaredNorm() * psi.squaredNorm(), 1e-12);
}

TEST(Sigma1, SwapsLevels) {
    Eigen::VectorXcd v(4);
    v << 1.0, 2.0, 3.0, 4.0;
    const Eigen::VectorXcd s = apply_sigma1(v);
    EXPECT_EQ(s[0], cplx(2.0));
    EXPECT_EQ(s[1], cplx(1.0));
    EXPECT_EQ(s[2], cplx(4.0));
}
