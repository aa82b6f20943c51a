// spectral.hpp: ground state and resonance of the dilated Hamiltonian
//
// H^θ conserves the parity (level + boson number) mod 2, and φ₀⊗Ω, φ₁⊗Ω lie
// in different parity sectors. The resonance pipeline therefore solves the two
// sectors separately. H^θ is complex symmetric in the occupation basis, so the
// left eigenvector of an eigenvalue with right eigenvector v is vᵀ and the
// Riesz projection is v vᵀ / (vᵀv).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbscatter/errors.hpp"
#include "sbscatter/linalg.hpp"
#include "sbscatter/model.hpp"

namespace sbscatter {

/// Rank-one oblique projection P = right · leftᵀ with leftᵀ right = 1.
struct RankOneProjection {
    Eigen::VectorXcd right;
    Eigen::VectorXcd left;

    static RankOneProjection from_symmetric(const Eigen::VectorXcd& v) {
        const cplx vv = v.transpose() * v;
        if (std::abs(vv) < 1e-300) throw SolverError("eigenvector is quasi-null (vᵀv = 0)");
        return RankOneProjection{v, v / vv};
    }

    Eigen::MatrixXcd dense() const { return right * left.transpose(); }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return right * cplx(left.transpose() * x); }

    /// ‖P − e_i e_iᵀ‖ in spectral norm.
    double distance_to_unit(Index i) const {
        Eigen::MatrixXcd u(right.size(), 2), v(right.size(), 2);
        u.col(0) = right;
        v.col(0) = left.conjugate();
        u.col(1) = Eigen::VectorXcd::Unit(right.size(), i) * -1.0;
        v.col(1) = Eigen::VectorXcd::Unit(right.size(), i);
        return low_rank_norm(u, v);
    }
};

/// ‖P − Q‖ for two rank-one projections on the same space.
inline double projection_distance(const RankOneProjection& p, const RankOneProjection& q) {
    Eigen::MatrixXcd u(p.right.size(), 2), v(p.right.size(), 2);
    u.col(0) = p.right;
    v.col(0) = p.left.conjugate();
    u.col(1) = -q.right;
    v.col(1) = q.left.conjugate();
    return low_rank_norm(u, v);
}

struct ResonanceData {
    double g = 0.0;
    cplx theta{0.0, 0.0};
    double lambda0 = 0.0;
    double lambda0_imag = 0.0;  // residual imaginary part from the eigensolver
    cplx lambda1{0.0, 0.0};
    Eigen::VectorXcd psi0_theta;      // P₀^θ φ₀⊗Ω
    Eigen::VectorXcd psi0_bar_theta;  // P₀^θ̄ φ₀⊗Ω
    double norm_psi0 = 1.0;           // ‖Ψ_{λ₀}‖ of the undilated model
    RankOneProjection P0_theta;
    RankOneProjection P1_theta;
    double E1 = std::numeric_limits<double>::quiet_NaN();
    double overlap0 = 1.0;  // |⟨φ₀⊗Ω, v₀⟩|² for the unit eigenvector v₀
    double overlap1 = 1.0;
};

namespace detail {

// Index of the eigenvector with maximal squared overlap on `component`;
// near-ties are broken by distance to `target`.
inline std::pair<Index, double> best_overlap(const EigenDecomposition& eig, Index component, double target) {
    Index best = -1;
    double best_ov = -1.0;
    for (Index c = 0; c < eig.size(); ++c) {
        const double ov = std::norm(eig.vectors(component, c)) / eig.vectors.col(c).squaredNorm();
        if (best < 0 || ov > best_ov + 1e-12 ||
            (std::abs(ov - best_ov) <= 1e-12 && std::abs(eig.values[c] - target) < std::abs(eig.values[best] - target))) {
            best = c;
            best_ov = ov;
        }
    }
    return {best, best_ov};
}

inline void fill_ground(ResonanceData& out, const Eigen::VectorXcd& v, double overlap, cplx value) {
    out.lambda0 = value.real();
    out.lambda0_imag = value.imag();
    out.overlap0 = overlap;
    out.P0_theta = RankOneProjection::from_symmetric(v);
    out.psi0_theta = out.P0_theta.apply(Eigen::VectorXcd::Unit(v.size(), FockBasis::index(0, 0)));
    out.psi0_bar_theta = out.psi0_theta.conjugate();
    // ⟨Ψ^θ̄, Ψ^θ⟩ continues ‖Ψ_{λ₀}‖² analytically in θ.
    out.norm_psi0 = std::sqrt(std::abs(cplx(out.psi0_theta.transpose() * out.psi0_theta)));
}

}  // namespace detail

inline constexpr double kMinOverlap = 0.5;

/// Identifies λ₀ and λ₁ in a full eigendecomposition of a complex-symmetric H^θ.
inline ResonanceData locate_resonances(const EigenDecomposition& eig, const FockBasis& basis, const ModelParams& p,
                                       cplx theta) {
    if (eig.vectors.cols() != eig.size() || eig.size() != basis.dimension())
        throw AssemblyError("locate_resonances: decomposition does not match the basis");
    const auto [i0, ov0] = detail::best_overlap(eig, FockBasis::index(0, 0), 0.0);
    const auto [i1, ov1] = detail::best_overlap(eig, FockBasis::index(1, 0), p.e1);
    if (ov0 < kMinOverlap || ov1 < kMinOverlap || i0 == i1)
        throw AmbiguityError("locate_resonances: overlaps " + std::to_string(ov0) + ", " + std::to_string(ov1) +
                             " below 0.5 (coupling too large or grid too coarse)");
    ResonanceData out;
    out.g = p.g;
    out.theta = theta;
    detail::fill_ground(out, eig.vectors.col(i0), ov0, eig.values[i0]);
    out.lambda1 = eig.values[i1];
    out.overlap1 = ov1;
    out.P1_theta = RankOneProjection::from_symmetric(eig.vectors.col(i1));
    out.E1 = p.g > 0.0 ? out.lambda1.imag() / (p.g * p.g) : std::numeric_limits<double>::quiet_NaN();
    return out;
}

struct ResonanceOptions {
    double ir_cutoff = 0.0;
    bool hermitian_norm = true;  // take ‖Ψ_{λ₀}‖ from the θ = 0 Hermitian solve
};

/// Full pipeline: assemble H^θ, solve both parity sectors, identify λ₀, λ₁.
inline ResonanceData compute_resonances(const ModelParams& p, cplx theta, const RadialGrid& grid,
                                        const std::shared_ptr<const FockBasis>& basis,
                                        const ResonanceOptions& opts = {}) {
    const OperatorMatrix h = assemble_hamiltonian(p, theta, grid, basis, opts.ir_cutoff);
    const Index dim = basis->dimension();
    const auto even = basis->sector(0), odd = basis->sector(1);

    const EigenDecomposition e0 = eigensolve(restrict_to(h.entries, even));
    const EigenDecomposition e1 = eigensolve(restrict_to(h.entries, odd));
    // φ₀⊗Ω and φ₁⊗Ω are the first entries of their sectors.
    const auto [i0, ov0] = detail::best_overlap(e0, 0, 0.0);
    const auto [i1, ov1] = detail::best_overlap(e1, 0, p.e1);
    if (ov0 < kMinOverlap || ov1 < kMinOverlap)
        throw AmbiguityError("compute_resonances: overlaps " + std::to_string(ov0) + ", " + std::to_string(ov1) +
                             " below 0.5 (coupling too large or grid too coarse)");

    ResonanceData out;
    out.g = p.g;
    out.theta = theta;
    detail::fill_ground(out, embed(e0.vectors.col(i0), even, dim), ov0, e0.values[i0]);
    out.lambda1 = e1.values[i1];
    out.overlap1 = ov1;
    out.P1_theta = RankOneProjection::from_symmetric(embed(e1.vectors.col(i1), odd, dim));
    out.E1 = p.g > 0.0 ? out.lambda1.imag() / (p.g * p.g) : std::numeric_limits<double>::quiet_NaN();

    if (opts.hermitian_norm && theta != cplx{0.0, 0.0}) {
        const OperatorMatrix h0 = assemble_hamiltonian(p, cplx{0.0, 0.0}, grid, basis, opts.ir_cutoff);
        const EigenDecomposition s = eigensolve_hermitian(restrict_to(h0.entries, even));
        out.norm_psi0 = std::abs(s.vectors(0, detail::best_overlap(s, 0, 0.0).first));
    }
    return out;
}

inline ResonanceData compute_resonances(const ModelParams& p, const RadialGrid& grid,
                                        const std::shared_ptr<const FockBasis>& basis,
                                        const ResonanceOptions& opts = {}) {
    return compute_resonances(p, p.theta, grid, basis, opts);
}

/// E_I = −4π² e₁² f(e₁)²
inline double fermi_golden_rule(const ModelParams& p) {
    if (!(p.e1 > 0.0)) throw DomainError("fermi_golden_rule: e1 must be positive");
    const double f = form_factor(p, p.e1);
    return -4.0 * kPi * kPi * p.e1 * p.e1 * f * f;
}

/// Im λ₁ / (g² E_I); NaN when g = 0.
inline double fgr_ratio(const ResonanceData& r, const ModelParams& p) {
    if (!(r.g > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return r.lambda1.imag() / (r.g * r.g * fermi_golden_rule(p));
}

// ---------------------------------------------------------------------------
// Riesz projections

/// Projection onto the eigenspace of eigenvalue `i` from a full decomposition:
/// v_i times row i of V^{-1}.
inline Eigen::MatrixXcd spectral_projection(const EigenDecomposition& eig, Index i) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(eig.vectors.transpose());
    const Eigen::VectorXcd row = lu.solve(Eigen::VectorXcd::Unit(eig.size(), i));
    return eig.vectors.col(i) * row.transpose();
}

/// P = (2πi)^{-1} ∮ (z − H)^{-1} dz by the n_quad-point trapezoidal rule on the
/// circle |z − center| = radius. `eigenvalues` (all of H) are used to verify
/// that the circle encloses exactly one eigenvalue and stays off the spectrum.
inline Eigen::MatrixXcd riesz_projection(const Eigen::MatrixXcd& h, cplx center, double radius, int n_quad,
                                         const Eigen::VectorXcd& eigenvalues) {
    if (!(radius > 0.0) || n_quad < 3) throw ContourError("riesz_projection: invalid circle or quadrature size");
    const double margin = 10.0 * radius * std::numeric_limits<double>::epsilon();
    int inside = 0;
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const double d = std::abs(eigenvalues[i] - center);
        if (std::abs(d - radius) < margin) throw ContourError("riesz_projection: circle crosses the spectrum");
        if (d < radius) ++inside;
    }
    if (inside != 1)
        throw ContourError("riesz_projection: circle encloses " + std::to_string(inside) + " eigenvalues, expected 1");
    const Index n = h.rows();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 0; k < n_quad; ++k) {
        const cplx w = radius * std::exp(cplx(0.0, 2.0 * kPi * k / n_quad));
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu((center + w) * id - h);
        out += w * lu.solve(id);
    }
    return out / static_cast<double>(n_quad);
}

inline Eigen::MatrixXcd riesz_projection(const Eigen::MatrixXcd& h, cplx center, double radius, int n_quad = 64) {
    return riesz_projection(h, center, radius, n_quad, eigensolve(h, false).values);
}

inline OperatorMatrix riesz_projection(const OperatorMatrix& op, cplx center, double radius, int n_quad = 64) {
    return OperatorMatrix{op.basis, riesz_projection(op.entries, center, radius, n_quad)};
}

// ---------------------------------------------------------------------------
// θ-scan

struct ThetaScanRow {
    cplx theta;
    double lambda0;
    cplx lambda1;
};

struct ThetaScan {
    std::vector<ThetaScanRow> rows;
    double max_dev_lambda0 = 0.0;
    double max_dev_lambda1 = 0.0;
};

inline ThetaScan theta_scan(const ModelParams& p, const RadialGrid& grid,
                            const std::shared_ptr<const FockBasis>& basis, const std::vector<cplx>& thetas) {
    ThetaScan out;
    for (const cplx& th : thetas) {
        const ResonanceData r = compute_resonances(p, th, grid, basis, ResonanceOptions{0.0, false});
        out.rows.push_back(ThetaScanRow{th, r.lambda0, r.lambda1});
    }
    for (std::size_t a = 0; a < out.rows.size(); ++a)
        for (std::size_t b = a + 1; b < out.rows.size(); ++b) {
            out.max_dev_lambda0 = std::max(out.max_dev_lambda0, std::abs(out.rows[a].lambda0 - out.rows[b].lambda0));
            out.max_dev_lambda1 = std::max(out.max_dev_lambda1, std::abs(out.rows[a].lambda1 - out.rows[b].lambda1));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Resolvent probe

/// Region of the complex plane for the resolvent bounds, with δ = e₁, ν = Im θ
/// and ρ₁ = ρ₀ρ. Returns "A", "B0", "B1" or "none".
inline std::string resolvent_region(cplx z, const ModelParams& p, double nu, double rho1) {
    const double delta = p.e1, e0 = 0.0, e1 = p.e1;
    const bool a1 = z.real() < e0 - delta / 2.0;
    const bool a2 = z.imag() > delta * std::sin(nu) / 8.0;
    const bool a3 = z.real() > e1 + delta / 2.0 &&
                    z.imag() >= -std::sin(nu / 2.0) * (z.real() - (e1 + delta / 2.0));
    if (a1 || a2 || a3) return "A";
    const bool band = z.imag() >= -0.5 * rho1 * std::sin(nu) && z.imag() <= delta * std::sin(nu) / 8.0;
    if (band && std::abs(z.real() - e0) <= delta / 2.0) return "B0";
    if (band && std::abs(z.real() - e1) <= delta / 2.0) return "B1";
    return "none";
}

struct ResolventSample {
    cplx z;
    double norm = std::numeric_limits<double>::quiet_NaN();
    std::string region;
    bool skipped = false;
    std::string warning;
};

/// ‖(H − z)^{-1}‖ = 1/σ_min(H − z) at each sample; samples within `margin` of
/// an eigenvalue are skipped with a warning.
inline std::vector<ResolventSample> resolvent_probe(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& eigenvalues,
                                                    const std::vector<cplx>& zs, const ModelParams& p, double nu,
                                                    double rho1, double margin = 1e-8) {
    std::vector<ResolventSample> out;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
    for (const cplx& z : zs) {
        ResolventSample s;
        s.z = z;
        s.region = resolvent_region(z, p, nu, rho1);
        double dist = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < eigenvalues.size(); ++i) dist = std::min(dist, std::abs(eigenvalues[i] - z));
        if (dist < margin) {
            s.skipped = true;
            s.warning = "sample within margin of an eigenvalue";
        } else {
            s.norm = 1.0 / smallest_singular_value(h - z * id);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace sbscatter
