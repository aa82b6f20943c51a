// dynamics.hpp: propagation, contour representation of e^{-itH} and the
// identities for the asymptotic field operators a_t(h) = e^{itH} a(h_t) e^{-itH}

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbscatter/errors.hpp"
#include "sbscatter/fit.hpp"
#include "sbscatter/linalg.hpp"
#include "sbscatter/model.hpp"
#include "sbscatter/quadrature.hpp"

namespace sbscatter {

// ---------------------------------------------------------------------------
// Hermitian propagation

/// e^{-itH} through a cached Hermitian eigendecomposition.
class Propagator {
public:
    explicit Propagator(const Eigen::MatrixXcd& h) {
        if (h.rows() != h.cols() || !is_hermitian(h, 1e-12))
            throw ContractError("propagate: operator must be Hermitian (theta = 0)");
        eig_ = eigensolve_hermitian(0.5 * (h + h.adjoint()));
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& psi, double t) const {
        Eigen::VectorXcd coeff = eig_.vectors.adjoint() * psi;
        for (Index i = 0; i < coeff.size(); ++i) coeff[i] *= std::exp(cplx(0.0, -t * eig_.values[i].real()));
        return eig_.vectors * coeff;
    }

    /// e^{itH} A e^{-itH}
    Eigen::MatrixXcd heisenberg(const Eigen::MatrixXcd& a, double t) const {
        const Eigen::VectorXcd ph = phases(t);
        Eigen::MatrixXcd m = eig_.vectors.adjoint() * a * eig_.vectors;
        for (Index c = 0; c < m.cols(); ++c)
            for (Index r = 0; r < m.rows(); ++r) m(r, c) *= std::conj(ph[r]) * ph[c];
        return eig_.vectors * m * eig_.vectors.adjoint();
    }

    const EigenDecomposition& decomposition() const { return eig_; }
    double ground_energy() const { return eig_.values[0].real(); }

private:
    Eigen::VectorXcd phases(double t) const {
        Eigen::VectorXcd ph(eig_.size());
        for (Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(cplx(0.0, -t * eig_.values[i].real()));
        return ph;
    }

    EigenDecomposition eig_;
};

inline Eigen::VectorXcd propagate(const OperatorMatrix& op, const Eigen::VectorXcd& psi, double t) {
    return Propagator(op.entries).apply(psi, t);
}

// ---------------------------------------------------------------------------
// Contour representation

/// Γ(ε, R): inbound ray −R − u e^{iν/4}, real segment [−R, R] with the upper
/// half circle λ₀ − εe^{−is} around λ₀, outbound ray R + u e^{−iν/4}.
struct Contour {
    double epsilon = 0.1;
    double R = 10.0;
    double nu = kPi / 32.0;
    double ray_length = 0.0;  // set by truncate_rays
    double lambda0 = 0.0;

    /// Ray length where |e^{-itz}| drops below tail_tol.
    void truncate_rays(double t, double tail_tol = 1e-14) {
        ray_length = -std::log(tail_tol) / (t * std::sin(nu / 4.0));
    }
};

namespace detail {

// Pole-residue form of z ↦ ⟨ψ, (H − z)^{-1} φ⟩ for diagonalizable H.
struct ResolventElement {
    Eigen::VectorXcd poles;
    Eigen::VectorXcd residues;

    ResolventElement(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi) {
        const EigenDecomposition eig = eigensolve(h);
        poles = eig.values;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(eig.vectors);
        const Eigen::VectorXcd right = lu.solve(phi);
        const Eigen::VectorXcd left = eig.vectors.adjoint() * psi;
        residues = left.conjugate().cwiseProduct(right);
    }

    cplx operator()(cplx z) const {
        cplx s = 0.0;
        for (Index i = 0; i < poles.size(); ++i) s += residues[i] / (poles[i] - z);
        return s;
    }

    cplx propagated(double t) const {
        cplx s = 0.0;
        for (Index i = 0; i < poles.size(); ++i) s += residues[i] * std::exp(cplx(0.0, -t) * poles[i]);
        return s;
    }
};

}  // namespace detail

struct LaplaceResult {
    cplx value;
    cplx direct_dilated;  // ⟨ψ, e^{-itH^θ} φ⟩ from the eigendecomposition
    double quad_error = 0.0;
    bool converged = false;
};

/// (2πi)^{-1} ∫_Γ dz e^{-itz} ⟨ψ, (H^θ − z)^{-1} φ⟩ along Γ(ε, R), with the
/// dilated vectors taken equal to the basis vectors.
inline LaplaceResult laplace_matrix_element(const Eigen::MatrixXcd& h_theta, const Eigen::VectorXcd& phi,
                                            const Eigen::VectorXcd& psi, double t, Contour contour,
                                            double margin = 1e-6) {
    if (!(t > 0.0)) throw ContourError("laplace: t must be positive");
    if (!(contour.epsilon > 0.0 && contour.R > 0.0)) throw ContourError("laplace: epsilon and R must be positive");
    const detail::ResolventElement el(h_theta, phi, psi);
    if (contour.ray_length <= 0.0) contour.truncate_rays(t);
    const double l0 = contour.lambda0, eps = contour.epsilon, R = contour.R;
    if (!(l0 - eps > -R && l0 + eps < R)) throw ContourError("laplace: half circle does not fit inside [-R, R]");

    // Distance checks: the real segment and the rays must avoid the spectrum.
    const cplx din = std::exp(cplx(0.0, contour.nu / 4.0)), dout = std::exp(cplx(0.0, -contour.nu / 4.0));
    for (Index i = 0; i < el.poles.size(); ++i) {
        const cplx p = el.poles[i];
        if (std::abs(p - l0) < eps - margin) continue;  // enclosed by the half circle
        if (std::abs(std::abs(p - l0) - eps) < margin) throw ContourError("laplace: half circle meets an eigenvalue");
        if (p.real() > -R && p.real() < R && std::abs(p.imag()) < margin)
            throw ContourError("laplace: real segment meets an eigenvalue");
        if (p.imag() > margin) throw ContourError("laplace: eigenvalue above the contour");
        // Below the rays: Im p < slope line through ±R.
        if (p.real() >= R && p.imag() > -std::tan(contour.nu / 4.0) * (p.real() - R) - margin)
            throw ContourError("laplace: eigenvalue between the outbound ray and the real axis");
        if (p.real() <= -R && p.imag() > -std::tan(contour.nu / 4.0) * (-R - p.real()) - margin)
            throw ContourError("laplace: eigenvalue between the inbound ray and the real axis");
    }
    const cplx mit(0.0, -t);
    auto integrand = [&](cplx z) { return std::exp(mit * z) * el(z); };
    const quad::Options opts{1e-15, 1e-13, 400000};
    cplx total = 0.0;
    double err = 0.0;
    bool ok = true;
    auto add = [&](const quad::Result<cplx>& r) {
        total += r.value;
        err += r.error;
        ok = ok && r.converged;
    };
    const double L = contour.ray_length;
    // Inbound ray, traversed towards −R: z(u) = −R − u e^{iν/4}, u from L to 0.
    add(quad::integrate([&](double u) { return integrand(-R - u * din) * din; }, 0.0, L, {}, opts));
    // Real segment pieces.
    std::vector<double> cuts;
    for (Index i = 0; i < el.poles.size(); ++i) cuts.push_back(el.poles[i].real());
    add(quad::integrate([&](double x) { return integrand(cplx(x, 0.0)); }, -R, l0 - eps, cuts, opts));
    add(quad::integrate(
        [&](double s) {
            const cplx e = std::exp(cplx(0.0, -s));
            return integrand(l0 - eps * e) * (cplx(0.0, eps) * e);
        },
        0.0, kPi, {}, opts));
    add(quad::integrate([&](double x) { return integrand(cplx(x, 0.0)); }, l0 + eps, R, cuts, opts));
    // Outbound ray: z(u) = R + u e^{−iν/4}.
    add(quad::integrate([&](double u) { return integrand(R + u * dout) * dout; }, 0.0, L, {}, opts));

    LaplaceResult out;
    out.value = total / cplx(0.0, 2.0 * kPi);
    out.quad_error = err / (2.0 * kPi);
    out.converged = ok;
    out.direct_dilated = el.propagated(t);
    return out;
}

/// Default contour for a spectrum. On a finite grid the eigenvalue nearest λ₀
/// can sit slightly off the real axis, so ε is placed between it and the rest
/// of the spectrum with room to be halved; R reaches past all real parts.
inline Contour default_contour(const Eigen::VectorXcd& spectrum, double lambda0, double nu) {
    if (spectrum.size() == 0) throw ContourError("default_contour: empty spectrum");
    Index i0 = 0;
    for (Index i = 1; i < spectrum.size(); ++i)
        if (std::abs(spectrum[i] - lambda0) < std::abs(spectrum[i0] - lambda0)) i0 = i;
    const double d0 = std::abs(spectrum[i0] - lambda0);
    double d1 = std::numeric_limits<double>::infinity(), reach = std::abs(lambda0);
    for (Index i = 0; i < spectrum.size(); ++i) {
        reach = std::max(reach, std::abs(spectrum[i].real()));
        if (i != i0) d1 = std::min(d1, std::abs(spectrum[i] - lambda0));
    }
    Contour c;
    c.nu = nu;
    c.lambda0 = lambda0;
    if (std::isfinite(d1)) {
        if (!(d1 > 3.0 * d0)) throw ContourError("default_contour: eigenvalue at lambda0 is not isolated");
        c.epsilon = 2.0 * d1 / 3.0;
    } else {
        c.epsilon = std::max(0.5, 4.0 * d0);
    }
    c.R = reach + c.epsilon + 2.0;
    return c;
}

// ---------------------------------------------------------------------------
// Asymptotic field operators

/// Mode amplitudes of h_t: ĥ_j e^{-itω_j}.
inline Eigen::VectorXcd evolve_amplitudes(const Eigen::VectorXcd& h, const RadialGrid& grid, double t) {
    Eigen::VectorXcd out = h;
    for (Index j = 0; j < out.size(); ++j) out[j] *= std::exp(cplx(0.0, -t * grid.nodes[static_cast<std::size_t>(j)]));
    return out;
}

/// Matrix of a_t(ĥ) = e^{itH} a(ĥ_t) e^{-itH}.
inline Eigen::MatrixXcd a_t(const Propagator& prop, const FockBasis& basis, const RadialGrid& grid,
                            const Eigen::VectorXcd& h, double t) {
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(h.size());
    return prop.heisenberg(field_operator(basis, evolve_amplitudes(h, grid, t).conjugate(), zero), t);
}

inline OperatorMatrix a_t(const OperatorMatrix& op, const RadialGrid& grid, const RadialProfile& profile, double t) {
    const Propagator prop(op.entries);
    return OperatorMatrix{op.basis, a_t(prop, *op.basis, grid, radial_reduction(grid, profile), t)};
}

/// ⟨h, l⟩ for mode amplitudes (conjugate-linear in h).
inline cplx mode_inner(const Eigen::VectorXcd& h, const Eigen::VectorXcd& l) { return h.dot(l); }

struct IdentityResidual {
    double residual = 0.0;           // with the commutator g[V, a(h_s)] of the truncated model
    double residual_c_number = 0.0;  // with −g⟨h_s, f⟩σ₁, exact only off the top boson sector
    double psi_norm = 0.0;
    std::size_t panels = 0;
};

enum class SQuadrature { Adaptive, CompositeGauss };

/// Residual of a_t(h)ψ − a(h)ψ − i∫₀ᵗ e^{isH} g[V, a(h_s)] e^{-isH} ψ ds.
/// In the untruncated model g[V, a(h_s)] = −g⟨h_s, f⟩σ₁.
inline IdentityResidual finite_time_identity_check(const OperatorMatrix& op, const ModelParams& p,
                                                   const RadialGrid& grid, const Eigen::VectorXcd& h,
                                                   const Eigen::VectorXcd& psi, double t,
                                                   SQuadrature rule = SQuadrature::Adaptive, int panels = 0) {
    const FockBasis& basis = *op.basis;
    const Propagator prop(op.entries);
    const Eigen::VectorXcd f = effective_coupling(p, cplx(0.0, 0.0), grid);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(h.size());
    const Eigen::MatrixXcd V = [&] {
        Eigen::MatrixXcd field = field_operator(basis, f.conjugate(), f);
        Eigen::MatrixXcd out(field.rows(), field.cols());
        for (Index c = 0; c < field.cols(); ++c)
            for (Index r = 0; r < field.rows(); ++r)
                out(r ^ 1, c) = field(r, c);  // σ₁ swaps the level bit of the row index
        return out;
    }();

    auto commutator_term = [&](double s) -> Eigen::VectorXcd {
        const Eigen::MatrixXcd as = field_operator(basis, evolve_amplitudes(h, grid, s).conjugate(), zero);
        const Eigen::VectorXcd x = prop.apply(psi, s);
        const Eigen::VectorXcd y = p.g * (V * (as * x) - as * (V * x));
        return prop.apply(y, -s);
    };
    auto c_number_term = [&](double s) -> Eigen::VectorXcd {
        const cplx ov = mode_inner(evolve_amplitudes(h, grid, s), f);
        const Eigen::VectorXcd x = prop.apply(psi, s);
        return prop.apply(Eigen::VectorXcd(-p.g * ov * apply_sigma1(x)), -s);
    };

    IdentityResidual out;
    out.psi_norm = psi.norm();
    if (t == 0.0) return out;  // a_0(h) = a(h) and the integral is empty

    const Eigen::VectorXcd lhs = prop.apply(
        field_operator(basis, evolve_amplitudes(h, grid, t).conjugate(), zero) * prop.apply(psi, t), -t);
    const Eigen::VectorXcd a0 = field_operator(basis, h.conjugate(), zero) * psi;
    auto integrate_s = [&](auto&& fn) -> Eigen::VectorXcd {
        if (rule == SQuadrature::Adaptive) {
            const auto r = quad::integrate(fn, 0.0, t, {}, quad::Options{1e-14, 1e-13, 100000});
            out.panels = r.panels;
            return r.value;
        }
        const auto ref = quad::gauss_legendre(8);
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(psi.size());
        for (int k = 0; k < panels; ++k) {
            const auto m = quad::mapped(ref, t * k / panels, t * (k + 1) / panels);
            for (std::size_t i = 0; i < m.nodes.size(); ++i) acc += m.weights[i] * fn(m.nodes[i]);
        }
        out.panels = static_cast<std::size_t>(panels);
        return acc;
    };
    const Eigen::VectorXcd i1 = integrate_s(commutator_term);
    out.residual = (lhs - a0 - cplx(0.0, 1.0) * i1).norm();
    const Eigen::VectorXcd i2 = integrate_s(c_number_term);
    out.residual_c_number = (lhs - a0 - cplx(0.0, 1.0) * i2).norm();
    return out;
}

/// max over the pair (h, l) of |⟨a_t(h)*Ψ, a_t(l)*Ψ⟩ − ⟨a_t(l)Ψ, a_t(h)Ψ⟩ − ⟨h, l⟩‖Ψ‖²|
/// with Ψ = e^{itH} Q e^{-itH} ψ and Q the projection on fewer than n_max bosons.
inline double commutation_check(const Propagator& prop, const FockBasis& basis, const RadialGrid& grid,
                                const Eigen::VectorXcd& h, const Eigen::VectorXcd& l, const Eigen::VectorXcd& psi,
                                double t) {
    Eigen::VectorXcd x = prop.apply(psi, t);
    for (Index i = 0; i < x.size(); ++i)
        if (basis.boson_number(i) >= basis.n_max()) x[i] = 0.0;
    const Eigen::VectorXcd interior = prop.apply(x, -t);
    const Eigen::MatrixXcd ah = a_t(prop, basis, grid, h, t), al = a_t(prop, basis, grid, l, t);
    const cplx lhs = (ah.adjoint() * interior).dot(al.adjoint() * interior) - (al * interior).dot(ah * interior);
    return std::abs(lhs - mode_inner(h, l) * interior.squaredNorm());
}

/// ‖e^{-isH} a_t(h)* e^{isH} − a_{t−s}(h_s)*‖ in spectral norm.
inline double pull_through_check(const Propagator& prop, const FockBasis& basis, const RadialGrid& grid,
                                 const Eigen::VectorXcd& h, double t, double s) {
    const Eigen::MatrixXcd lhs = prop.heisenberg(a_t(prop, basis, grid, h, t).adjoint(), -s);
    const Eigen::MatrixXcd rhs = a_t(prop, basis, grid, evolve_amplitudes(h, grid, s), t - s).adjoint();
    return spectral_norm(lhs - rhs);
}

struct DecayRow {
    double t;
    double norm;
    bool beyond_recurrence = false;
};

struct VanishingCheck {
    std::vector<DecayRow> rows;
    double recurrence_time = 0.0;
    std::vector<std::string> warnings;
};

/// ‖a_t(h)Ψ_{λ₀}‖ = ‖a(h_t)Ψ_{λ₀}‖ for an eigenvector Ψ_{λ₀} of H.
inline VanishingCheck asymptotic_vanishing_check(const FockBasis& basis, const RadialGrid& grid,
                                                 const Eigen::VectorXcd& h, const Eigen::VectorXcd& psi0,
                                                 const std::vector<double>& ts, double support_a, double support_b) {
    VanishingCheck out;
    const double dk = grid.max_spacing(support_a, support_b);
    out.recurrence_time = dk > 0.0 ? 2.0 * kPi / dk : std::numeric_limits<double>::infinity();
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(h.size());
    for (double t : ts) {
        DecayRow row{t, (field_operator(basis, evolve_amplitudes(h, grid, t).conjugate(), zero) * psi0).norm(), false};
        if (std::abs(t) > 0.5 * out.recurrence_time) {
            row.beyond_recurrence = true;
            out.warnings.push_back("t = " + std::to_string(t) + " beyond half the grid recurrence time");
        }
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Overlap decay ⟨h_s, f⟩ = 4π ∫ dr r² conj(h(r)) e^{isr} f(r)

/// 4π ∫ r² |h(r)| f(r) dr, the s = 0 bound on |⟨h_s, f⟩|.
inline double overlap_scale(const ModelParams& p, const RadialProfile& h, double a, double b) {
    const auto rule = quad::mapped(quad::gauss_legendre(64), a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = rule.nodes[i];
        s += rule.weights[i] * r * r * std::abs(h(r)) * form_factor(p, r);
    }
    return 4.0 * kPi * s;
}

inline cplx continuum_overlap(const ModelParams& p, const RadialProfile& h, double a, double b, double s,
                              double abs_tol = 0.0) {
    if (abs_tol <= 0.0) abs_tol = 1e-15 * overlap_scale(p, h, a, b);
    // Panels sized to resolve the oscillation e^{isr}.
    std::vector<double> cuts;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(s) * (b - a) / kPi)));
    for (int i = 1; i < n; ++i) cuts.push_back(a + (b - a) * i / n);
    return 4.0 * kPi *
           quad::integrate(
               [&](double r) {
                   return r * r * std::conj(h(r)) * std::exp(cplx(0.0, s * r)) * form_factor(p, r);
               },
               a, b, cuts, quad::Options{abs_tol, 1e-12, 200000})
               .value;
}

struct OverlapDecay {
    std::vector<std::pair<double, double>> rows;      // (s, |⟨h_s, f⟩|)
    std::vector<std::pair<double, double>> envelope;  // (s, local maximum)
    LineFit fit;
};

/// Envelope exponent from local maxima of |⟨h_s, f⟩| over log-spaced windows.
inline OverlapDecay overlap_decay(const ModelParams& p, const RadialProfile& h, double a, double b, double s_min,
                                  double s_max, int windows = 24, int per_window = 32) {
    OverlapDecay out;
    const double scale = overlap_scale(p, h, a, b);
    const double ls = std::log(s_min), le = std::log(s_max);
    for (int w = 0; w < windows; ++w) {
        const double s0 = std::exp(ls + (le - ls) * w / windows), s1 = std::exp(ls + (le - ls) * (w + 1) / windows);
        double best = 0.0;
        for (int i = 0; i < per_window; ++i) {
            const double s = s0 + (s1 - s0) * i / per_window;
            const double v = std::abs(continuum_overlap(p, h, a, b, s, 1e-15 * scale));
            out.rows.emplace_back(s, v);
            best = std::max(best, v);
        }
        out.envelope.emplace_back(std::sqrt(s0 * s1), best);
    }
    std::vector<double> xs, ys;
    for (const auto& [s, v] : out.envelope) {
        xs.push_back(s);
        ys.push_back(v);
    }
    // Envelope points at the quadrature floor carry no decay information.
    out.fit = fit_exponent(xs, ys, 1e-13 * scale, 3);
    return out;
}

// ---------------------------------------------------------------------------
// Standard estimates

/// (H_f + 1)^{-1/2} as a diagonal for θ = 0.
inline Eigen::VectorXd free_weight(const FockBasis& basis, const RadialGrid& grid) {
    const Eigen::VectorXcd hf = field_energy_diagonal(basis, mode_dispersion(cplx(0.0, 0.0), grid));
    return (hf.real().array() + 1.0).rsqrt().matrix();
}

struct EstimateRatios {
    double creation = 0.0;      // ‖a(h)*(H_f+1)^{-1/2}‖ / (‖h‖ + ‖h/√ω‖)
    double annihilation = 0.0;  // ‖a(h)(H_f+1)^{-1/2}‖ / ‖h/√ω‖
    double interaction = 0.0;   // ‖V(H_f+1)^{-1/2}‖ / (‖f‖ + 2‖f/√ω‖)
    double vector_max = 0.0;    // largest ‖A x‖/(RHS ‖x‖) over random vectors
};

inline double weighted_norm(const Eigen::VectorXcd& h, const RadialGrid& grid) {
    double s = 0.0;
    for (Index j = 0; j < h.size(); ++j) s += std::norm(h[j]) / grid.nodes[static_cast<std::size_t>(j)];
    return std::sqrt(s);
}

/// Worst ratios over `trials` random profiles and random vectors.
inline EstimateRatios standard_estimate_check(const ModelParams& p, const RadialGrid& grid, const FockBasis& basis,
                                              int trials, std::uint64_t seed, int vectors_per_trial = 4) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const Eigen::VectorXd w = free_weight(basis, grid);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(static_cast<Index>(grid.size()));
    auto random_vector = [&](Index n) {
        Eigen::VectorXcd v(n);
        for (Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
        return v;
    };
    EstimateRatios out;
    auto vector_ratio = [&](const Eigen::MatrixXcd& a, double rhs) {
        for (int k = 0; k < vectors_per_trial; ++k) {
            const Eigen::VectorXcd x = random_vector(a.cols());
            out.vector_max = std::max(out.vector_max, (a * x).norm() / (rhs * x.norm()));
        }
    };

    const Eigen::VectorXcd f = effective_coupling(p, cplx(0.0, 0.0), grid);
    {
        Eigen::MatrixXcd field = field_operator(basis, f.conjugate(), f);
        Eigen::MatrixXcd v(field.rows(), field.cols());
        for (Index c = 0; c < field.cols(); ++c)
            for (Index r = 0; r < field.rows(); ++r) v(r ^ 1, c) = field(r, c);
        const Eigen::MatrixXcd a = v * w.asDiagonal();
        const double rhs = f.norm() + 2.0 * weighted_norm(f, grid);
        out.interaction = spectral_norm(a) / rhs;
        vector_ratio(a, rhs);
    }
    for (int trial = 0; trial < trials; ++trial) {
        const Eigen::VectorXcd h = random_vector(static_cast<Index>(grid.size()));
        const Eigen::MatrixXcd ann = field_operator(basis, h.conjugate(), zero) * w.asDiagonal();
        const Eigen::MatrixXcd cre = field_operator(basis, zero, h) * w.asDiagonal();
        const double hw = weighted_norm(h, grid);
        out.annihilation = std::max(out.annihilation, spectral_norm(ann) / hw);
        out.creation = std::max(out.creation, spectral_norm(cre) / (h.norm() + hw));
        vector_ratio(ann, hw);
        vector_ratio(cre, h.norm() + hw);
    }
    return out;
}

/// Ratio ‖a(h)(H_f+1)^{-1/2}‖ / ‖h/√ω‖ for h on a single mode of energy ω;
/// the exact value is sqrt(n_max ω / (n_max ω + 1)).
inline double single_mode_ratio(const RadialGrid& grid, const FockBasis& basis, std::size_t mode) {
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(static_cast<Index>(grid.size()));
    h[static_cast<Index>(mode)] = 1.0;
    const Eigen::MatrixXcd ann =
        field_operator(basis, h, Eigen::VectorXcd::Zero(h.size())) * free_weight(basis, grid).asDiagonal();
    return spectral_norm(ann) / weighted_norm(h, grid);
}

/// Bound chain for a_t(h)(H_f+1)^{-1/2}: returns {lhs, rhs}.
inline std::pair<double, double> a_t_bound(const Propagator& prop, const FockBasis& basis, const RadialGrid& grid,
                                           const Eigen::VectorXcd& h, double t) {
    const Eigen::VectorXd w = free_weight(basis, grid);
    const double lhs = spectral_norm(a_t(prop, basis, grid, h, t) * w.asDiagonal());
    const auto& eig = prop.decomposition();
    const double b = eig.values[0].real();
    Eigen::VectorXd s(eig.size());
    for (Index i = 0; i < s.size(); ++i) s[i] = eig.values[i].real() - b + 1.0;
    const Eigen::MatrixXcd inv_sqrt = eig.vectors * s.array().rsqrt().matrix().asDiagonal() * eig.vectors.adjoint();
    const Eigen::MatrixXcd sqrt_m = eig.vectors * s.array().sqrt().matrix().asDiagonal() * eig.vectors.adjoint();
    const Eigen::VectorXd hf = (w.array().square().inverse() - 1.0).max(0.0).sqrt().matrix();
    const double n1 = spectral_norm(hf.asDiagonal() * inv_sqrt);
    const double n2 = spectral_norm(sqrt_m * w.asDiagonal());
    return {lhs, weighted_norm(h, grid) * n1 * n2};
}

}  // namespace sbscatter
