// model.hpp: parameters, radial grid, truncated Fock basis and operator assembly
//
// The boson field is reduced to its isotropic (s-wave) channel: the form factor
// is radial, so only the angular average of the field couples to the atom. A
// radial grid {k_j, w_j} then carries per-mode amplitudes
//
//     c_j = sqrt(4π w_j) · k_j · f(k_j),      Σ_j |c_j|² ≈ ∫ d³k |f(k)|²,
//
// and the Fock space is the symmetric Fock space over C^{n_modes}, truncated at
// n_max bosons. States are indexed as 2·occupation + level, so the two atomic
// levels times the vacuum occupy indices 0 and 1.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sbscatter/errors.hpp"
#include "sbscatter/quadrature.hpp"

namespace sbscatter {

using cplx = std::complex<double>;
using Eigen::Index;

inline constexpr double kPi = std::numbers::pi;

struct ModelParams {
    double e1 = 1.0;         // excited atomic level (e0 = 0)
    double lambda_uv = 1.0;  // ultraviolet cutoff Λ
    double mu = 0.25;        // infrared regularization exponent, in (0, 1/2)
    double g = 0.0;          // coupling constant
    cplx theta{0.0, kPi / 32.0};
    double k_max = 6.0;
    std::size_t n_modes = 300;
    std::size_t n_max = 1;
    double tail_tol = 1e-12;    // bound on the Gaussian factor of f at k_max
    double nu_min = kPi / 64.0; // lower bound of Im θ for resonance studies

    /// Throws ConfigError naming the first violated invariant.
    void validate() const {
        if (!(e1 > 0.0)) throw ConfigError("e1 must be positive");
        if (!(lambda_uv > 0.0)) throw ConfigError("lambda_uv must be positive");
        if (!(mu > 0.0 && mu < 0.5)) throw ConfigError("mu must lie in (0, 1/2)");
        if (!(g >= 0.0)) throw ConfigError("g must be non-negative");
        if (theta != cplx{0.0, 0.0}) {
            if (!(std::abs(theta.real()) < 1e-3))
                throw ConfigError("Re theta must lie in (-1e-3, 1e-3)");
            if (!(theta.imag() > 0.0 && theta.imag() < kPi / 16.0))
                throw ConfigError("Im theta must lie in (0, pi/16)");
        }
        if (!(k_max > 0.0)) throw ConfigError("k_max must be positive");
        if (n_modes < 2) throw ConfigError("n_modes must be at least 2");
        if (!(tail_tol > 0.0)) throw ConfigError("tail_tol must be positive");
        const double tail = std::exp(-k_max * k_max / (lambda_uv * lambda_uv));
        if (!(tail < tail_tol))
            throw ConfigError("k_max too small: Gaussian tail exp(-k_max^2/Lambda^2) exceeds tail_tol");
        if (!(nu_min > 0.0 && nu_min < kPi / 16.0)) throw ConfigError("nu_min must lie in (0, pi/16)");
    }
};

/// Membership in the admissible dilation set for resonance computations.
inline bool in_dilation_set(cplx theta, double nu_min) {
    return std::abs(theta.real()) < 1e-3 && theta.imag() > nu_min && theta.imag() < kPi / 16.0;
}

// ---------------------------------------------------------------------------
// Form factor and dispersion

/// f(k) = exp(-k²/Λ²) k^{-1/2+μ}
inline double form_factor(const ModelParams& p, double k) {
    if (!(k > 0.0)) throw DomainError("form_factor: k must be positive");
    return std::exp(-k * k / (p.lambda_uv * p.lambda_uv)) * std::pow(k, -0.5 + p.mu);
}

/// Dilated form factor, the analytic continuation of (u_θ f)(k) = e^{-3θ/2} f(e^{-θ}k):
/// f^θ(k) = e^{-θ(1+μ)} exp(-e^{-2θ}k²/Λ²) k^{-1/2+μ}.
inline cplx dilated_form_factor(const ModelParams& p, cplx theta, double k) {
    if (!(k > 0.0)) throw DomainError("dilated_form_factor: k must be positive");
    const cplx gauss = std::exp(-std::exp(-2.0 * theta) * (k * k / (p.lambda_uv * p.lambda_uv)));
    return std::exp(-theta * (1.0 + p.mu)) * gauss * std::pow(k, -0.5 + p.mu);
}
inline cplx dilated_form_factor(const ModelParams& p, double k) { return dilated_form_factor(p, p.theta, k); }

/// ω^θ(k) = e^{-θ} k
inline cplx dilated_dispersion(cplx theta, double k) {
    if (!(k > 0.0)) throw DomainError("dilated_dispersion: k must be positive");
    return std::exp(-theta) * k;
}
inline cplx dilated_dispersion(const ModelParams& p, double k) { return dilated_dispersion(p.theta, k); }

// ---------------------------------------------------------------------------
// Radial grid

struct RadialGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double min_node() const { return nodes.front(); }

    /// Largest spacing between consecutive nodes inside [a, b].
    double max_spacing(double a, double b) const {
        double out = 0.0;
        for (std::size_t j = 0; j + 1 < nodes.size(); ++j)
            if (nodes[j + 1] >= a && nodes[j] <= b) out = std::max(out, nodes[j + 1] - nodes[j]);
        return out;
    }
};

enum class GridRule { GaussLegendre, Refined };

inline GridRule parse_grid_rule(std::string_view name) {
    if (name == "gauss-legendre" || name == "gauss_legendre") return GridRule::GaussLegendre;
    if (name == "refined") return GridRule::Refined;
    throw ConfigError("unknown quadrature rule '" + std::string(name) + "'");
}

inline std::string to_string(GridRule r) {
    return r == GridRule::GaussLegendre ? "gauss-legendre" : "refined";
}

/// Composite refinement: `fraction` of the nodes go into [center ± half_width].
struct RefineWindow {
    double center = 1.0;
    double half_width = 0.25;
    double fraction = 0.5;
};

inline RadialGrid build_grid(std::size_t n_modes, double k_max, GridRule rule,
                             std::optional<RefineWindow> window = std::nullopt) {
    if (n_modes < 2) throw ConfigError("build_grid: n_modes must be at least 2");
    if (!(k_max > 0.0)) throw ConfigError("build_grid: k_max must be positive");
    RadialGrid grid;
    auto append = [&grid](std::size_t n, double a, double b) {
        const auto r = quad::mapped(quad::gauss_legendre(n), a, b);
        grid.nodes.insert(grid.nodes.end(), r.nodes.begin(), r.nodes.end());
        grid.weights.insert(grid.weights.end(), r.weights.begin(), r.weights.end());
    };
    if (rule == GridRule::GaussLegendre) {
        append(n_modes, 0.0, k_max);
        return grid;
    }
    const RefineWindow w = window.value_or(RefineWindow{});
    const double lo = w.center - w.half_width, hi = w.center + w.half_width;
    if (!(lo > 0.0 && hi < k_max && w.half_width > 0.0))
        throw ConfigError("build_grid: refinement window must lie inside (0, k_max)");
    if (!(w.fraction > 0.0 && w.fraction < 1.0))
        throw ConfigError("build_grid: refinement fraction must lie in (0, 1)");
    if (n_modes < 6) throw ConfigError("build_grid: refined rule needs at least 6 modes");
    const auto inner = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(w.fraction * n_modes)));
    const std::size_t outer = n_modes - inner;
    const double outer_len = lo + (k_max - hi);
    auto n_left = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(outer * lo / outer_len)));
    n_left = std::min(n_left, outer - 1);
    append(n_left, 0.0, lo);
    append(inner, lo, hi);
    append(outer - n_left, hi, k_max);
    return grid;
}

inline RadialGrid build_grid(const ModelParams& p, std::string_view rule = "gauss-legendre",
                             std::optional<RefineWindow> window = std::nullopt) {
    if (!window && parse_grid_rule(rule) == GridRule::Refined)
        window = RefineWindow{p.e1, 0.25 * p.e1, 0.5};
    return build_grid(p.n_modes, p.k_max, parse_grid_rule(rule), window);
}

// ---------------------------------------------------------------------------
// Radial reduction of profiles

using RadialProfile = std::function<cplx(double)>;

/// ĥ_j = sqrt(4π w_j) k_j h(k_j) for a radial function h on R³.
inline Eigen::VectorXcd radial_reduction(const RadialGrid& grid, const RadialProfile& profile) {
    Eigen::VectorXcd out(static_cast<Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        out[static_cast<Index>(j)] = std::sqrt(4.0 * kPi * grid.weights[j]) * grid.nodes[j] * profile(grid.nodes[j]);
    return out;
}

/// Per-mode coupling amplitudes c_j = sqrt(4π w_j) k_j f^θ(k_j).
inline Eigen::VectorXcd effective_coupling(const ModelParams& p, cplx theta, const RadialGrid& grid) {
    return radial_reduction(grid, [&](double k) { return dilated_form_factor(p, theta, k); });
}
inline Eigen::VectorXcd effective_coupling(const ModelParams& p, const RadialGrid& grid) {
    return effective_coupling(p, p.theta, grid);
}

/// Per-mode dispersion e^{-θ}k_j.
inline Eigen::VectorXcd mode_dispersion(cplx theta, const RadialGrid& grid) {
    Eigen::VectorXcd out(static_cast<Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) out[static_cast<Index>(j)] = std::exp(-theta) * grid.nodes[j];
    return out;
}

// ---------------------------------------------------------------------------
// Truncated Fock basis

class FockBasis {
public:
    using Occupation = std::vector<std::uint32_t>;  // non-decreasing mode indices

    struct Removal {
        std::uint32_t mode;
        std::uint32_t count;  // occupation of `mode` before removal
        std::size_t target;   // occupation index after removing one boson
    };

    FockBasis(std::size_t n_modes, std::size_t n_max) : n_modes_(n_modes), n_max_(n_max) {
        if (n_modes == 0) throw ConfigError("FockBasis: n_modes must be positive");
        Occupation cur;
        occupations_.push_back(cur);
        for (std::size_t b = 1; b <= n_max; ++b) {
            cur.assign(b, 0);
            enumerate(cur, 0, 0);
        }
        for (std::size_t i = 0; i < occupations_.size(); ++i) lookup_.emplace(occupations_[i], i);
        removals_.resize(occupations_.size());
        for (std::size_t i = 0; i < occupations_.size(); ++i) {
            const auto& occ = occupations_[i];
            for (std::size_t pos = 0; pos < occ.size();) {
                std::size_t end = pos;
                while (end < occ.size() && occ[end] == occ[pos]) ++end;
                Occupation reduced = occ;
                reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(pos));
                removals_[i].push_back(Removal{occ[pos], static_cast<std::uint32_t>(end - pos), lookup_.at(reduced)});
                pos = end;
            }
        }
    }

    /// 2 · Σ_{b=0}^{n_max} C(n_modes + b − 1, b)
    static std::size_t expected_dimension(std::size_t n_modes, std::size_t n_max) {
        std::size_t total = 0, term = 1;  // C(n-1, 0)
        for (std::size_t b = 0; b <= n_max; ++b) {
            total += term;
            term = term * (n_modes + b) / (b + 1);
        }
        return 2 * total;
    }

    std::size_t n_modes() const { return n_modes_; }
    std::size_t n_max() const { return n_max_; }
    std::size_t occupation_count() const { return occupations_.size(); }
    Index dimension() const { return static_cast<Index>(2 * occupations_.size()); }

    static Index index(int level, std::size_t occupation) { return static_cast<Index>(2 * occupation) + level; }
    static int level_of(Index i) { return static_cast<int>(i % 2); }
    static std::size_t occupation_of(Index i) { return static_cast<std::size_t>(i / 2); }

    const Occupation& occupation(std::size_t occ) const { return occupations_.at(occ); }
    std::size_t boson_number(Index i) const { return occupations_[occupation_of(i)].size(); }
    std::optional<std::size_t> find(const Occupation& occ) const {
        auto it = lookup_.find(occ);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }
    const std::vector<Removal>& removals(std::size_t occ) const { return removals_[occ]; }

    /// Parity (level + boson number) mod 2 is conserved by H.
    int parity(Index i) const { return static_cast<int>((level_of(i) + boson_number(i)) % 2); }

    std::vector<Index> sector(int parity_value) const {
        std::vector<Index> out;
        for (Index i = 0; i < dimension(); ++i)
            if (parity(i) == parity_value) out.push_back(i);
        return out;
    }

    /// Unit vector φ_level ⊗ Ω.
    Eigen::VectorXcd vacuum(int level) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension());
        v[index(level, 0)] = 1.0;
        return v;
    }

private:
    void enumerate(Occupation& cur, std::size_t pos, std::uint32_t start) {
        if (pos == cur.size()) {
            occupations_.push_back(cur);
            return;
        }
        for (std::uint32_t m = start; m < n_modes_; ++m) {
            cur[pos] = m;
            enumerate(cur, pos + 1, m);
        }
    }

    std::size_t n_modes_;
    std::size_t n_max_;
    std::vector<Occupation> occupations_;
    std::map<Occupation, std::size_t> lookup_;
    std::vector<std::vector<Removal>> removals_;
};

struct OperatorMatrix {
    std::shared_ptr<const FockBasis> basis;
    Eigen::MatrixXcd entries;

    Index dimension() const { return entries.rows(); }
};

// ---------------------------------------------------------------------------
// Boson operators

/// Σ_j annihilate_j a_j + Σ_j create_j a_j^*, acting as identity on the atom.
inline Eigen::MatrixXcd field_operator(const FockBasis& basis, const Eigen::VectorXcd& annihilate,
                                       const Eigen::VectorXcd& create) {
    if (annihilate.size() != static_cast<Index>(basis.n_modes()) ||
        create.size() != static_cast<Index>(basis.n_modes()))
        throw AssemblyError("field_operator: coefficient length does not match the basis");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.dimension(), basis.dimension());
    for (std::size_t occ = 0; occ < basis.occupation_count(); ++occ) {
        for (const auto& r : basis.removals(occ)) {
            const double amp = std::sqrt(static_cast<double>(r.count));
            for (int level = 0; level < 2; ++level) {
                const Index src = FockBasis::index(level, occ), dst = FockBasis::index(level, r.target);
                out(dst, src) += annihilate[r.mode] * amp;
                out(src, dst) += create[r.mode] * amp;
            }
        }
    }
    return out;
}

/// a(ĥ) = Σ_j conj(ĥ_j) a_j for mode amplitudes ĥ.
inline OperatorMatrix annihilator(std::shared_ptr<const FockBasis> basis, const Eigen::VectorXcd& amplitudes) {
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(amplitudes.size());
    Eigen::MatrixXcd m = field_operator(*basis, amplitudes.conjugate(), zero);
    return OperatorMatrix{std::move(basis), std::move(m)};
}

/// a(ĥ) for the radial reduction of `profile` on the grid; adjoint() gives a(ĥ)^*.
inline OperatorMatrix apply_annihilator(std::shared_ptr<const FockBasis> basis, const RadialGrid& grid,
                                        const RadialProfile& profile) {
    if (basis->n_modes() != grid.size()) throw AssemblyError("apply_annihilator: grid/basis mismatch");
    return annihilator(std::move(basis), radial_reduction(grid, profile));
}

/// Diagonal of Σ_j ω_j n_j for per-mode energies ω.
inline Eigen::VectorXcd field_energy_diagonal(const FockBasis& basis, const Eigen::VectorXcd& omega) {
    Eigen::VectorXcd d(basis.dimension());
    for (std::size_t occ = 0; occ < basis.occupation_count(); ++occ) {
        cplx e = 0.0;
        for (auto m : basis.occupation(occ)) e += omega[m];
        d[FockBasis::index(0, occ)] = e;
        d[FockBasis::index(1, occ)] = e;
    }
    return d;
}

/// Swap of the atomic levels, σ₁ ⊗ 1.
inline Eigen::VectorXcd apply_sigma1(const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(v.size());
    for (Index i = 0; i + 1 < v.size(); i += 2) {
        out[i] = v[i + 1];
        out[i + 1] = v[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hamiltonian

/// K + H_f^θ + g V^θ on the truncated basis. Couplings of modes with
/// k_j < ir_cutoff are zeroed; their free energies are kept.
inline OperatorMatrix build_hamiltonian(const ModelParams& p, cplx theta, const RadialGrid& grid,
                                        std::shared_ptr<const FockBasis> basis, double ir_cutoff = 0.0) {
    if (!basis) throw AssemblyError("assemble_hamiltonian: null basis");
    if (basis->n_modes() != grid.size())
        throw AssemblyError("assemble_hamiltonian: basis has " + std::to_string(basis->n_modes()) +
                            " modes but grid has " + std::to_string(grid.size()) + " nodes");
    if (!(ir_cutoff >= 0.0)) throw AssemblyError("assemble_hamiltonian: ir_cutoff must be non-negative");

    Eigen::VectorXcd coupling = effective_coupling(p, theta, grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (grid.nodes[j] < ir_cutoff) coupling[static_cast<Index>(j)] = 0.0;

    const Index dim = basis->dimension();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    const Eigen::VectorXcd hf = field_energy_diagonal(*basis, mode_dispersion(theta, grid));
    for (Index i = 0; i < dim; ++i) h(i, i) = (FockBasis::level_of(i) == 1 ? p.e1 : 0.0) + hf[i];

    // g σ₁ ⊗ (a(f^θ̄) + a(f^θ)^*): both directions carry f^θ, so H^θ is complex symmetric.
    if (p.g != 0.0) {
        for (std::size_t occ = 0; occ < basis->occupation_count(); ++occ) {
            for (const auto& r : basis->removals(occ)) {
                const cplx amp = p.g * coupling[r.mode] * std::sqrt(static_cast<double>(r.count));
                for (int level = 0; level < 2; ++level) {
                    const Index src = FockBasis::index(level, occ);
                    const Index dst = FockBasis::index(1 - level, r.target);
                    h(dst, src) += amp;
                    h(src, dst) += amp;
                }
            }
        }
    }
    return OperatorMatrix{std::move(basis), std::move(h)};
}

using AssemblyHook = std::function<OperatorMatrix(const ModelParams&, cplx, const RadialGrid&,
                                                  const std::shared_ptr<const FockBasis>&, double)>;

/// Process-wide replacement for build_hamiltonian (e.g. a disk cache). Install
/// before any worker threads start.
inline AssemblyHook& assembly_hook() {
    static AssemblyHook hook;
    return hook;
}

inline OperatorMatrix assemble_hamiltonian(const ModelParams& p, cplx theta, const RadialGrid& grid,
                                           std::shared_ptr<const FockBasis> basis, double ir_cutoff = 0.0) {
    if (const auto& hook = assembly_hook()) return hook(p, theta, grid, basis, ir_cutoff);
    return build_hamiltonian(p, theta, grid, std::move(basis), ir_cutoff);
}

inline OperatorMatrix assemble_hamiltonian(const ModelParams& p, const RadialGrid& grid,
                                           std::shared_ptr<const FockBasis> basis, double ir_cutoff = 0.0) {
    return assemble_hamiltonian(p, p.theta, grid, std::move(basis), ir_cutoff);
}

/// Principal submatrix on the given indices.
inline Eigen::MatrixXcd restrict_to(const Eigen::MatrixXcd& m, const std::vector<Index>& idx) {
    const auto n = static_cast<Index>(idx.size());
    Eigen::MatrixXcd out(n, n);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) out(r, c) = m(idx[r], idx[c]);
    return out;
}

inline Eigen::VectorXcd restrict_to(const Eigen::VectorXcd& v, const std::vector<Index>& idx) {
    Eigen::VectorXcd out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
    return out;
}

inline Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const std::vector<Index>& idx, Index dim) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = v[static_cast<Index>(i)];
    return out;
}

}  // namespace sbscatter
