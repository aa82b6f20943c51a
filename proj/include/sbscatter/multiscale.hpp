// multiscale.hpp: infrared-cutoff ladder ρ_n = ρ₀ρⁿ and convergence rates
//
// Level n keeps every mode but zeroes the couplings of modes with k_j < ρ_n.
// The cut modes are then free, and the eigenvector of H^{(n),θ} selected by
// overlap has no boson in them, so its projection is P^{(n),θ} ⊗ P_Ω on the
// shared basis.

#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "sbscatter/errors.hpp"
#include "sbscatter/fit.hpp"
#include "sbscatter/model.hpp"
#include "sbscatter/spectral.hpp"

namespace sbscatter {

struct LadderLevel {
    int n = 0;
    double rho_n = 0.0;
    ResonanceData res;
};

struct CutoffLadder {
    double rho0 = 0.5;
    double rho = 0.25;
    int depth = 6;
    std::vector<LadderLevel> levels;
    std::vector<std::string> warnings;
};

inline std::vector<double> ladder_cutoffs(double rho0, double rho, int depth) {
    std::vector<double> out;
    for (int n = 0; n < depth; ++n) out.push_back(rho0 * std::pow(rho, n));
    return out;
}

inline CutoffLadder build_ladder(const ModelParams& p, cplx theta, const RadialGrid& grid,
                                 const std::shared_ptr<const FockBasis>& basis, double rho0, double rho, int depth) {
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw ConfigError("rho0 must lie in (0, 1)");
    // Closed at e1/4 so the default ρ = 0.25 at e₁ = 1 is admissible.
    if (!(rho > 0.0 && rho <= p.e1 / 4.0)) throw ConfigError("rho must lie in (0, e1/4]");
    if (depth < 1) throw ConfigError("ladder depth must be positive");
    CutoffLadder out{rho0, rho, depth, {}, {}};
    const auto cuts = ladder_cutoffs(rho0, rho, depth);
    for (int n = 0; n < depth; ++n) {
        if (cuts[n] < grid.min_node())
            out.warnings.push_back("level " + std::to_string(n) + ": rho_n below the smallest grid node");
        out.levels.push_back(
            LadderLevel{n, cuts[n], compute_resonances(p, theta, grid, basis, ResonanceOptions{cuts[n], false})});
    }
    return out;
}

struct ConvergenceRow {
    int n = 0;
    double rho_n = 0.0;
    double gap0 = 0.0;
    double gap1 = 0.0;
    double proj_gap = 0.0;  // ‖P₁^θ − P₁^{(n),θ} ⊗ P_Ω‖
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    LineFit exponent0;
    LineFit exponent1;
    LineFit proj_exponent;
};

inline std::vector<ConvergenceRow> convergence_rows(const CutoffLadder& ladder, const ResonanceData& reference) {
    std::vector<ConvergenceRow> rows;
    for (const auto& lv : ladder.levels)
        rows.push_back(ConvergenceRow{lv.n, lv.rho_n, std::abs(reference.lambda0 - lv.res.lambda0),
                                      std::abs(reference.lambda1 - lv.res.lambda1),
                                      projection_distance(reference.P1_theta, lv.res.P1_theta)});
    return rows;
}

/// Table plus log-log exponents over levels whose gap exceeds 1e-12.
inline ConvergenceReport convergence_report(const CutoffLadder& ladder, const ResonanceData& reference) {
    ConvergenceReport out;
    out.rows = convergence_rows(ladder, reference);
    std::vector<double> rho, g0, g1, gp;
    for (const auto& r : out.rows) {
        rho.push_back(r.rho_n);
        g0.push_back(r.gap0);
        g1.push_back(r.gap1);
        gp.push_back(r.proj_gap);
    }
    out.exponent0 = fit_exponent(rho, g0);
    out.exponent1 = fit_exponent(rho, g1);
    out.proj_exponent = fit_exponent(rho, gp);
    return out;
}

struct GRatioTest {
    double g_low = 0.0;
    double g_high = 0.0;
    std::vector<double> ratio_gap0, ratio_gap1, ratio_proj;  // per level, high / low
    double mean_gap0 = 0.0, mean_gap1 = 0.0, mean_proj = 0.0;
};

/// Gap ratios between couplings g and 2g at every ladder level.
inline GRatioTest g_ratio_test(ModelParams p, cplx theta, const RadialGrid& grid,
                               const std::shared_ptr<const FockBasis>& basis, double rho0, double rho, int depth,
                               double g_low) {
    auto rows_at = [&](double g) {
        p.g = g;
        const ResonanceData ref = compute_resonances(p, theta, grid, basis, ResonanceOptions{0.0, false});
        return convergence_rows(build_ladder(p, theta, grid, basis, rho0, rho, depth), ref);
    };
    const auto lo = rows_at(g_low), hi = rows_at(2.0 * g_low);
    GRatioTest out;
    out.g_low = g_low;
    out.g_high = 2.0 * g_low;
    std::size_t used = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i].gap0 > 1e-12 && lo[i].gap1 > 1e-12 && lo[i].proj_gap > 1e-12)) continue;
        out.ratio_gap0.push_back(hi[i].gap0 / lo[i].gap0);
        out.ratio_gap1.push_back(hi[i].gap1 / lo[i].gap1);
        out.ratio_proj.push_back(hi[i].proj_gap / lo[i].proj_gap);
        out.mean_gap0 += out.ratio_gap0.back();
        out.mean_gap1 += out.ratio_gap1.back();
        out.mean_proj += out.ratio_proj.back();
        ++used;
    }
    if (used == 0) throw FitError("g_ratio_test: no level with resolvable gaps");
    out.mean_gap0 /= static_cast<double>(used);
    out.mean_gap1 /= static_cast<double>(used);
    out.mean_proj /= static_cast<double>(used);
    return out;
}

}  // namespace sbscatter
