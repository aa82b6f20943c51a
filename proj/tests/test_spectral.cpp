#include <cmath>
#include <complex>
#include <memory>

#include <gtest/gtest.h>

#include "sbscatter/spectral.hpp"

using namespace sbscatter;

namespace {

const cplx kTheta(0.0, kPi / 32.0);

struct Setup {
    ModelParams p;
    RadialGrid grid;
    std::shared_ptr<const FockBasis> basis;
};

Setup make(double g, std::size_t n_modes, std::size_t n_max = 1) {
    Setup s;
    s.p.g = g;
    s.p.n_modes = n_modes;
    s.p.n_max = n_max;
    s.grid = build_grid(s.p);
    s.basis = std::make_shared<const FockBasis>(n_modes, n_max);
    return s;
}

}  // namespace

TEST(Eigensolve, OneByOne) {
    Eigen::MatrixXcd a(1, 1);
    a(0, 0) = 1.0;
    const auto e = eigensolve(a);
    EXPECT_EQ(e.values[0], cplx(1.0));
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-15);
}

TEST(Eigensolve, HermitianInputGivesRealEigenvalues) {
    const Eigen::MatrixXcd r = Eigen::MatrixXcd::Random(40, 40);
    const Eigen::MatrixXcd h = r + r.adjoint();
    const auto e = eigensolve(h);
    EXPECT_TRUE(e.hermitian);
    EXPECT_LT(e.values.imag().cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((h * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-10);
}

TEST(Eigensolve, GeneralComplexUnitVectors) {
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(30, 30);
    const auto e = eigensolve(a);
    EXPECT_FALSE(e.hermitian);
    for (Index c = 0; c < e.size(); ++c) EXPECT_NEAR(e.vectors.col(c).norm(), 1.0, 1e-13);
    EXPECT_LT((a * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-10);
}

TEST(Eigensolve, BadInputRejected) {
    EXPECT_THROW(eigensolve(Eigen::MatrixXcd::Zero(2, 3)), SolverError);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(2, 2);
    a(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(eigensolve(a), SolverError);
}

TEST(Resonances, UnperturbedAtZeroCoupling) {
    auto s = make(0.0, 6, 2);
    const auto h = assemble_hamiltonian(s.p, kTheta, s.grid, s.basis);
    const auto r = locate_resonances(eigensolve(h), *s.basis, s.p, kTheta);
    EXPECT_EQ(r.lambda0, 0.0);
    EXPECT_EQ(r.lambda1, cplx(s.p.e1, 0.0));
    const auto r2 = compute_resonances(s.p, kTheta, s.grid, s.basis);
    EXPECT_EQ(r2.lambda0, 0.0);
    EXPECT_EQ(r2.lambda1, cplx(s.p.e1, 0.0));
    EXPECT_NEAR(r2.norm_psi0, 1.0, 0.0);
}

TEST(Resonances, SectorPipelineAgreesWithFullSolve) {
    auto s = make(0.08, 8, 2);
    const auto h = assemble_hamiltonian(s.p, kTheta, s.grid, s.basis);
    const auto full = locate_resonances(eigensolve(h), *s.basis, s.p, kTheta);
    const auto sect = compute_resonances(s.p, kTheta, s.grid, s.basis, ResonanceOptions{0.0, false});
    EXPECT_NEAR(full.lambda0, sect.lambda0, 1e-12);
    EXPECT_NEAR(std::abs(full.lambda1 - sect.lambda1), 0.0, 1e-12);
    EXPECT_NEAR(projection_distance(full.P1_theta, sect.P1_theta), 0.0, 1e-7);
}

TEST(Resonances, ImaginaryPartFollowsGoldenRule) {
    auto s = make(0.05, 300);
    const auto r = compute_resonances(s.p, kTheta, s.grid, s.basis);
    EXPECT_LT(r.lambda1.imag(), 0.0);
    EXPECT_NEAR(fgr_ratio(r, s.p), 1.0, 0.15);
    EXPECT_NEAR(r.E1, r.lambda1.imag() / (0.05 * 0.05), 1e-15);
    EXPECT_LT(std::abs(r.lambda0_imag), 1e-10);
}

TEST(Resonances, GroundOverlapSecondOrder) {
    // 3-mode toy: 1 − |⟨φ₀⊗Ω, v⟩|² = g² Σ_j c_j²/(e₁ + k_j)² + O(g⁴).
    auto s = make(0.05, 3, 1);
    const cplx zero(0.0, 0.0);
    const auto r = compute_resonances(s.p, zero, s.grid, s.basis);
    const Eigen::VectorXcd c = effective_coupling(s.p, zero, s.grid);
    double pt = 0.0;
    for (Index j = 0; j < c.size(); ++j) pt += std::norm(c[j]) / std::pow(s.p.e1 + s.grid.nodes[j], 2);
    pt *= s.p.g * s.p.g;
    EXPECT_GE(r.overlap0, 1.0 - 2.0 * pt);
    EXPECT_NEAR(1.0 - r.overlap0, pt, 0.05 * pt);
}

TEST(Resonances, GroundStateMatchesHermitianMinimum) {
    auto s = make(0.1, 40, 2);
    const auto r = compute_resonances(s.p, kTheta, s.grid, s.basis);
    const auto h = assemble_hamiltonian(s.p, cplx(0.0, 0.0), s.grid, s.basis);
    EXPECT_NEAR(r.lambda0, eigensolve_hermitian(h.entries, false).values.real().minCoeff(), 1e-6);
    EXPECT_LT(std::abs(r.lambda0_imag), 1e-6);
    EXPECT_GT(r.norm_psi0, 0.9);
    EXPECT_LE(r.norm_psi0, 1.0);
}

TEST(Resonances, ProjectionIdempotentAndCloseToFree) {
    double prev = 0.0;
    for (double g : {0.02, 0.04}) {
        auto s = make(g, 200);
        const auto r = compute_resonances(s.p, kTheta, s.grid, s.basis);
        const Eigen::MatrixXcd P = r.P1_theta.dense();
        EXPECT_LT((P * P - P).norm(), 1e-8);
        const double d = r.P1_theta.distance_to_unit(FockBasis::index(1, 0));
        if (prev > 0.0) {
            EXPECT_NEAR(d / prev, 2.0, 0.3);
        }
        prev = d;
    }
}

TEST(Resonances, AmbiguityWhenCouplingTooLarge) {
    auto s = make(30.0, 10, 1);
    EXPECT_THROW(compute_resonances(s.p, kTheta, s.grid, s.basis), AmbiguityError);
}

TEST(GoldenRule, ReferenceValue) {
    const ModelParams p;
    EXPECT_NEAR(fermi_golden_rule(p), -4.0 * kPi * kPi * std::exp(-2.0), 1e-14);
    EXPECT_NEAR(fermi_golden_rule(p), -5.3428, 1e-4);
}

TEST(GoldenRule, VanishesAsGapCloses) {
    ModelParams p;
    p.e1 = 1e-8;
    EXPECT_LT(std::abs(fermi_golden_rule(p)), 1e-6);
    EXPECT_TRUE(std::isnan(fgr_ratio(ResonanceData{}, p)));
}

TEST(Riesz, DiagonalMatrixElementaryProjection) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d.diagonal() << 0.0, 1.0, 2.0, cplx(3.0, -1.0);
    const Eigen::MatrixXcd P = riesz_projection(d, cplx(1.0, 0.0), 0.5, 64);
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(4, 4);
    e(1, 1) = 1.0;
    EXPECT_LT((P - e).norm(), 1e-12);
}

TEST(Riesz, MatchesEigenvectorDyads) {
    auto s = make(0.05, 100);
    const auto h = assemble_hamiltonian(s.p, kTheta, s.grid, s.basis);
    const auto odd = s.basis->sector(1);
    const Eigen::MatrixXcd ho = restrict_to(h.entries, odd);
    const auto eig = eigensolve(ho);
    const auto r = compute_resonances(s.p, kTheta, s.grid, s.basis, ResonanceOptions{0.0, false});
    Index i1 = 0;
    for (Index i = 0; i < eig.size(); ++i)
        if (std::abs(eig.values[i] - r.lambda1) < std::abs(eig.values[i1] - r.lambda1)) i1 = i;
    const Eigen::MatrixXcd P = riesz_projection(ho, r.lambda1, 0.05, 64, eig.values);
    EXPECT_NEAR(std::abs(P.trace() - 1.0), 0.0, 1e-8);
    EXPECT_LT(spectral_norm(P - spectral_projection(eig, i1)), 1e-8);
    EXPECT_LT(spectral_norm(P - restrict_to(r.P1_theta.dense(), odd)), 1e-8);
}

TEST(Riesz, ContourErrors) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d.diagonal() << 0.0, 1.0, 1.1;
    EXPECT_THROW(riesz_projection(d, cplx(1.05, 0.0), 0.2, 32), ContourError);
    EXPECT_THROW(riesz_projection(d, cplx(0.5, 0.0), 0.5, 32), ContourError);
    EXPECT_THROW(riesz_projection(d, cplx(5.0, 0.0), 0.5, 32), ContourError);
}

TEST(ThetaScan, ZeroCouplingHasNoDeviation) {
    auto s = make(0.0, 50);
    const auto scan = theta_scan(s.p, s.grid, s.basis, {cplx(0, kPi / 32), cplx(0, kPi / 24), cplx(0, kPi / 20)});
    EXPECT_EQ(scan.max_dev_lambda0, 0.0);
    EXPECT_EQ(scan.max_dev_lambda1, 0.0);
}

TEST(ThetaScan, GroundStateIndependentOfTheta) {
    auto s = make(0.05, 300);
    const auto scan = theta_scan(s.p, s.grid, s.basis, {cplx(0, kPi / 64), kTheta, cplx(0, kPi / 20)});
    EXPECT_LT(scan.max_dev_lambda0, 1e-8);
}

TEST(Resonances, RealDilationLeavesSpectrumUnchanged) {
    // Real θ is a unitary change of variables only in the continuum; on a grid it
    // still yields a Hermitian operator with λ₁ on the real axis.
    auto s = make(0.05, 40);
    const auto h = assemble_hamiltonian(s.p, cplx(0.1, 0.0), s.grid, s.basis);
    EXPECT_TRUE(is_hermitian(h.entries));
}

TEST(ThetaScan, DeviationShrinksUnderRefinement) {
    const std::vector<cplx> thetas{cplx(0, kPi / 32), cplx(0, kPi / 24), cplx(0, kPi / 20)};
    auto coarse = make(0.05, 200), fine = make(0.05, 400);
    const double d200 = theta_scan(coarse.p, coarse.grid, coarse.basis, thetas).max_dev_lambda1;
    const double d400 = theta_scan(fine.p, fine.grid, fine.basis, thetas).max_dev_lambda1;
    EXPECT_LT(d400, d200);
    EXPECT_LT(d400, 1e-3);
}

TEST(ResolventProbe, NormalOperatorDistance) {
    auto s = make(0.0, 20);
    const cplx zero(0.0, 0.0);
    const auto h = assemble_hamiltonian(s.p, zero, s.grid, s.basis);
    const auto ev = eigensolve(h.entries, false).values;
    const cplx z(s.p.e1, 0.3);
    const auto rows = resolvent_probe(h.entries, ev, {z}, s.p, kPi / 32, 0.125);
    double dist = 1e300;
    for (Index i = 0; i < ev.size(); ++i) dist = std::min(dist, std::abs(ev[i] - z));
    EXPECT_NEAR(rows[0].norm, 1.0 / dist, 1e-10);
}

TEST(ResolventProbe, PoleGrowthAndSkipping) {
    auto s = make(0.05, 60);
    const auto r = compute_resonances(s.p, kTheta, s.grid, s.basis);
    const auto h = assemble_hamiltonian(s.p, kTheta, s.grid, s.basis);
    const auto ev = eigensolve(h.entries, false).values;
    const auto rows = resolvent_probe(h.entries, ev, {r.lambda1 + 1e-3, r.lambda1 + 1e-4, r.lambda1}, s.p,
                                      kPi / 32, 0.125);
    EXPECT_NEAR(rows[1].norm / rows[0].norm, 10.0, 0.5);
    EXPECT_TRUE(rows[2].skipped);
}

TEST(ResolventProbe, RegionAFitConstant) {
    auto s = make(0.05, 60);
    const auto h = assemble_hamiltonian(s.p, kTheta, s.grid, s.basis);
    const auto ev = eigensolve(h.entries, false).values;
    std::vector<cplx> zs;
    for (double phi : {0.3, 1.2, 2.0, 2.8}) zs.push_back(s.p.e1 + 10.0 * std::exp(cplx(0.0, phi)));
    const auto rows = resolvent_probe(h.entries, ev, zs, s.p, kPi / 32, 0.125);
    double cmin = 1e300, cmax = 0.0;
    for (const auto& row : rows) {
        EXPECT_EQ(row.region, "A");
        const double c = row.norm * std::abs(row.z - s.p.e1);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    EXPECT_LT(cmax / cmin, 2.0);
}

TEST(ResolventProbe, RegionTags) {
    const ModelParams p;
    const double nu = kPi / 32, rho1 = 0.125;
    EXPECT_EQ(resolvent_region(cplx(-1.0, 0.0), p, nu, rho1), "A");
    EXPECT_EQ(resolvent_region(cplx(0.1, 0.0), p, nu, rho1), "B0");
    EXPECT_EQ(resolvent_region(cplx(1.1, 0.0), p, nu, rho1), "B1");
    EXPECT_EQ(resolvent_region(cplx(1.0, -0.5), p, nu, rho1), "none");
}
