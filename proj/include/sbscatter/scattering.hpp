// scattering.hpp: principal transition term, kernel, lineshape and a
// spectral-sum oracle for the one-photon transition matrix
//
// Photon profiles enter through their angular integrals ∫dΣ h(r, Σ), so that
// G(r) = r⁴ conj(h(r)) l(r) f(r)².

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sbscatter/errors.hpp"
#include "sbscatter/fit.hpp"
#include "sbscatter/linalg.hpp"
#include "sbscatter/model.hpp"
#include "sbscatter/quadrature.hpp"
#include "sbscatter/spectral.hpp"

namespace sbscatter {

struct PhotonProfile {
    RadialProfile radial_h;
    RadialProfile radial_l;
    double a = 0.0;  // common support [a, b]
    double b = 0.0;
};

/// Peak-normalized C^∞ bump exp(1 − 1/(1 − ((r − c)/w)²)) on (c − w, c + w).
inline double bump(double r, double center, double half_width) {
    const double y = (r - center) / half_width;
    const double z = 1.0 - y * y;
    return z > 0.0 ? std::exp(1.0 - 1.0 / z) : 0.0;
}

inline PhotonProfile bump_profile(double center, double half_width) {
    auto f = [center, half_width](double r) { return cplx(bump(r, center, half_width), 0.0); };
    return PhotonProfile{f, f, center - half_width, center + half_width};
}

/// Resonance-centered reference profile: c = Re λ₁ − λ₀, w = 0.2 e₁.
inline PhotonProfile reference_profile(const ResonanceData& res, const ModelParams& p) {
    return bump_profile(res.lambda1.real() - res.lambda0, 0.2 * p.e1);
}

struct GFunction {
    std::function<cplx(double)> eval;
    double a = 0.0;
    double b = 0.0;

    cplx operator()(double r) const { return (r > a && r < b) ? eval(r) : cplx(0.0, 0.0); }
};

inline GFunction build_G(const PhotonProfile& prof, const ModelParams& p) {
    if (!(prof.a > 0.0)) throw DomainError("build_G: profile support must stay away from 0");
    if (!(prof.b > prof.a)) throw DomainError("build_G: empty profile support");
    if (!(prof.b < p.k_max)) throw DomainError("build_G: profile support must lie inside (0, k_max)");
    const ModelParams q = p;
    auto h = prof.radial_h, l = prof.radial_l;
    return GFunction{[q, h, l](double r) {
                         const double f = form_factor(q, r);
                         return r * r * r * r * std::conj(h(r)) * l(r) * f * f;
                     },
                     prof.a, prof.b};
}

inline quad::Options tight_quadrature() { return quad::Options{1e-15, 1e-12, 200000}; }

// ---------------------------------------------------------------------------
// Principal term

struct PrincipalTerm {
    cplx T_P;
    cplx T_P_second_form;  // same integral written with M and E₁g²
    cplx M;
};

namespace detail {

inline std::vector<double> pole_breakpoints(double alpha, double width) {
    std::vector<double> out{alpha};
    for (double m : {1.0, 3.0, 10.0}) {
        out.push_back(alpha - m * width);
        out.push_back(alpha + m * width);
    }
    return out;
}

}  // namespace detail

inline PrincipalTerm principal_term(const GFunction& G, const ResonanceData& res, const ModelParams& p) {
    if (!(res.lambda1.imag() < 0.0)) throw DomainError("principal_term: invalid resonance, Im lambda1 must be negative");
    if (!(p.g > 0.0)) throw DomainError("principal_term: g must be positive");
    const double l0 = res.lambda0;
    const cplx l1 = res.lambda1;
    const double alpha = l1.real() - l0;
    const double nrm2 = res.norm_psi0 * res.norm_psi0;
    const double g2 = p.g * p.g;
    const double e1 = l1.imag() / g2;
    const auto bp = detail::pole_breakpoints(alpha, std::abs(l1.imag()));

    const auto first = quad::integrate(
        [&](double r) { return G(r) * alpha / ((r + l0 - l1) * (r - l0 + std::conj(l1))); }, G.a, G.b, bp,
        tight_quadrature());
    const auto second = quad::integrate(
        [&](double r) {
            return G(r) * (e1 * g2) / ((r + l0 - l1.real() - cplx(0.0, g2 * e1)) * (r - l0 + std::conj(l1)));
        },
        G.a, G.b, bp, tight_quadrature());

    PrincipalTerm out;
    out.M = cplx(0.0, 4.0 * kPi) * alpha / e1 / nrm2;
    out.T_P = cplx(0.0, 4.0 * kPi) * g2 / nrm2 * first.value;
    out.T_P_second_form = out.M * second.value;
    return out;
}

/// T_P(k, k′) for on-shell momenta.
inline cplx kernel(const ResonanceData& res, const ModelParams& p, double k, double kprime) {
    if (!(k > 0.0 && kprime > 0.0)) throw DomainError("kernel: momenta must be positive");
    const double l0 = res.lambda0;
    const cplx l1 = res.lambda1;
    const double g2 = p.g * p.g;
    const double e1 = l1.imag() / g2;
    const double nrm2 = res.norm_psi0 * res.norm_psi0;
    const cplx M = cplx(0.0, 4.0 * kPi) * (l1.real() - l0) / e1 / nrm2;
    return M * form_factor(p, k) * form_factor(p, kprime) * (e1 * g2) /
           ((kprime + l0 - l1.real() - cplx(0.0, g2 * e1)) * (kprime - l0 + std::conj(l1)));
}

/// ∫dr r⁴ conj(h(r)) l(r) T_P(r, r): the kernel integrated on shell.
inline cplx kernel_transition(const PhotonProfile& prof, const ResonanceData& res, const ModelParams& p) {
    const auto bp = detail::pole_breakpoints(res.lambda1.real() - res.lambda0, std::abs(res.lambda1.imag()));
    return quad::integrate(
               [&](double r) {
                   if (!(r > prof.a && r < prof.b)) return cplx(0.0, 0.0);
                   return r * r * r * r * std::conj(prof.radial_h(r)) * prof.radial_l(r) * kernel(res, p, r, r);
               },
               prof.a, prof.b, bp, tight_quadrature())
        .value;
}

// ---------------------------------------------------------------------------
// Lineshape

struct LineshapeRow {
    double kprime;
    cplx T;
    double absT2;
    double lorentz;  // |T|² with f(k)² f(k′)² |k′ − λ₀ + conj λ₁|^{-2} |M|² divided out
};

struct Lineshape {
    std::vector<LineshapeRow> rows;
    LorentzianFit fit;
    double argmax_kprime = 0.0;
    double expected_center = 0.0;
    double expected_fwhm = 0.0;
};

inline Lineshape lineshape_scan(const ResonanceData& res, const ModelParams& p, double k, double kmin, double kmax,
                                int n_points) {
    if (n_points < 3 || !(kmax > kmin) || !(kmin > 0.0)) throw ConfigError("lineshape: invalid k' scan range");
    Lineshape out;
    const double g2 = p.g * p.g;
    const double e1 = res.lambda1.imag() / g2;
    const double nrm2 = res.norm_psi0 * res.norm_psi0;
    const cplx M = cplx(0.0, 4.0 * kPi) * (res.lambda1.real() - res.lambda0) / e1 / nrm2;
    out.expected_center = res.lambda1.real() - res.lambda0;
    out.expected_fwhm = 2.0 * g2 * std::abs(e1);
    std::vector<double> xs, ys;
    double best = -1.0;
    for (int i = 0; i < n_points; ++i) {
        const double kp = kmin + (kmax - kmin) * i / (n_points - 1);
        const cplx T = kernel(res, p, k, kp);
        const double smooth = std::norm(M) * std::pow(form_factor(p, k) * form_factor(p, kp), 2) /
                              std::norm(kp - res.lambda0 + std::conj(res.lambda1));
        LineshapeRow row{kp, T, std::norm(T), std::norm(T) / smooth};
        if (row.absT2 > best) {
            best = row.absT2;
            out.argmax_kprime = kp;
        }
        xs.push_back(kp);
        ys.push_back(row.lorentz);
        out.rows.push_back(row);
    }
    out.fit = fit_lorentzian(xs, ys);
    return out;
}

// ---------------------------------------------------------------------------
// Principal value

/// P∫_a^b G(r)/(r − x) dr. For x inside (a, b) the singularity is subtracted:
/// ∫(G(r) − G(x))/(r − x) dr + G(x) log|(b − x)/(a − x)|.
template <typename F>
auto principal_value(F&& G, double a, double b, double x, const quad::Options& opts = tight_quadrature()) {
    using T = std::decay_t<decltype(G(a))>;
    const double eps = std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(x - a) <= eps || std::abs(x - b) <= eps)
        throw DomainError("principal_value: pole at an endpoint of the interval");
    if (x < a || x > b) return quad::integrate([&](double r) -> T { return G(r) / (r - x); }, a, b, {}, opts).value;
    const T gx = G(x);
    // Difference quotient; at r = x it is never evaluated by the Kronrod nodes of
    // the split panels, since x is a breakpoint.
    const T body = quad::integrate([&](double r) -> T { return (G(r) - gx) / (r - x); }, a, b, {x}, opts).value;
    return T(body + gx * std::log(std::abs((b - x) / (a - x))));
}

/// Principal value for a sampled function, interpolated by a natural cubic spline.
inline double principal_value(const std::vector<double>& r, const std::vector<double>& g, double x) {
    const std::size_t n = r.size();
    if (n < 3 || g.size() != n) throw DomainError("principal_value: need at least three samples");
    // Natural cubic spline second derivatives.
    std::vector<double> m(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
        const double rhs = 6.0 * ((g[i + 1] - g[i]) / h1 - (g[i] - g[i - 1]) / h0);
        const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
        c[i] = h1 / diag;
        d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = d[i] - c[i] * m[i + 1];
        if (i == 1) break;
    }
    auto spline = [&](double t) {
        auto it = std::upper_bound(r.begin(), r.end(), t);
        std::size_t i = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
        i = std::min(i, n - 2);
        const double h = r[i + 1] - r[i], A = (r[i + 1] - t) / h, B = (t - r[i]) / h;
        return A * g[i] + B * g[i + 1] + ((A * A * A - A) * m[i] + (B * B * B - B) * m[i + 1]) * h * h / 6.0;
    };
    return principal_value(spline, r.front(), r.back(), x);
}

// ---------------------------------------------------------------------------
// Spectral-sum oracle

struct OracleResult {
    cplx T;
    cplx T1;
    cplx T2;
    double lambda0 = 0.0;
    double norm_psi0 = 1.0;
    std::size_t modes_used = 0;
};

/// T = 2π g² ‖Ψ_{λ₀}‖^{-2} (T¹ − T²) from the undilated spectrum:
/// T¹ = Σ_m |c_m|² ∫G i/(r + λ₀ − E_m + i0), T² = Σ_m |c_m|² ∫G i/(r − λ₀ + E_m),
/// c_m = ⟨u_m, σ₁Ψ_{λ₀}⟩ over eigenpairs (E_m, u_m) of the odd sector.
inline OracleResult oracle_transition(const GFunction& G, const ModelParams& p, const RadialGrid& grid,
                                      const std::shared_ptr<const FockBasis>& basis, double weight_floor = 1e-18) {
    const OperatorMatrix h = assemble_hamiltonian(p, cplx(0.0, 0.0), grid, basis);
    const Index dim = basis->dimension();
    const auto even = basis->sector(0), odd = basis->sector(1);
    const EigenDecomposition se = eigensolve_hermitian(restrict_to(h.entries, even));
    const auto [i0, ov0] = detail::best_overlap(se, 0, 0.0);
    if (ov0 < kMinOverlap) throw AmbiguityError("oracle_transition: ground state overlap below 0.5");

    OracleResult out;
    out.lambda0 = se.values[i0].real();
    const Eigen::VectorXcd v = embed(se.vectors.col(i0), even, dim);
    const Eigen::VectorXcd psi = v * v[FockBasis::index(0, 0)];  // v ⟨v, φ₀⊗Ω⟩ for real v
    out.norm_psi0 = psi.norm();
    const Eigen::VectorXcd s1psi = restrict_to(apply_sigma1(psi), odd);

    const EigenDecomposition so = eigensolve_hermitian(restrict_to(h.entries, odd));
    const Eigen::VectorXcd c = so.vectors.adjoint() * s1psi;
    const double total = c.squaredNorm();
    for (Index m = 0; m < so.size(); ++m) {
        const double w = std::norm(c[m]);
        if (!(w > weight_floor * total)) continue;
        const double x = so.values[m].real() - out.lambda0;
        cplx t1;
        if (x > G.a && x < G.b)
            t1 = cplx(0.0, 1.0) * principal_value(G, G.a, G.b, x) + kPi * G(x);
        else
            t1 = cplx(0.0, 1.0) * quad::integrate([&](double r) { return G(r) / (r - x); }, G.a, G.b, {},
                                                  tight_quadrature()).value;
        const cplx t2 = cplx(0.0, 1.0) * quad::integrate([&](double r) { return G(r) / (r + x); }, G.a, G.b, {},
                                                         tight_quadrature()).value;
        out.T1 += w * t1;
        out.T2 += w * t2;
        ++out.modes_used;
    }
    out.T = 2.0 * kPi * p.g * p.g / (out.norm_psi0 * out.norm_psi0) * (out.T1 - out.T2);
    return out;
}

}  // namespace sbscatter
