// studies.hpp: experiment drivers behind the command-line subcommands
//
// Each study turns an ExperimentConfig into a StudyResult: a JSON summary, CSV
// detail tables and a list of pass/fail checks against configured tolerances.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sbscatter/dynamics.hpp"
#include "sbscatter/experiment.hpp"
#include "sbscatter/multiscale.hpp"
#include "sbscatter/report.hpp"
#include "sbscatter/scattering.hpp"
#include "sbscatter/spectral.hpp"

namespace sbscatter {

// ---------------------------------------------------------------------------
// Worker pool

/// SBSCATTER_WORKERS, or the hardware concurrency when unset.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SBSCATTER_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("SBSCATTER_WORKERS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates f(0..n-1) on the pool; results keep index order. The first
/// exception thrown by any task is rethrown after all workers stop.
template <typename F>
auto parallel_map(std::size_t n, F&& f, unsigned workers = worker_count()) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i; !failed && (i = next++) < n;) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    const unsigned k = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (k <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < k; ++i) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Results

struct Check {
    int criterion = 0;  // acceptance criterion number; 0 for supporting checks
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<=", ">=", "within", "decreasing", ...
    bool pass = false;
    bool informational = false;  // reported but not part of the exit status
};

struct StudyResult {
    std::string name;
    json summary = json::object();
    std::vector<std::pair<std::string, CsvTable>> tables;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    bool complete = true;
    std::string error;

    bool passed() const {
        if (!complete) return false;
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.informational || c.pass; });
    }

    void check(int criterion, std::string check_name, double value, double threshold, std::string relation, bool pass,
               bool informational = false) {
        checks.push_back(Check{criterion, std::move(check_name), value, threshold, std::move(relation),
                               pass && std::isfinite(value), informational});
    }
};

inline json check_json(const Check& c) {
    return json{{"criterion", c.criterion}, {"name", c.name},   {"value", c.value},
                {"threshold", c.threshold}, {"relation", c.relation}, {"pass", c.pass},
                {"informational", c.informational}};
}

inline json result_json(const StudyResult& r, const ExperimentConfig& cfg) {
    json j;
    j["study"] = r.name;
    j["complete"] = r.complete;
    j["passed"] = r.passed();
    if (!r.error.empty()) j["error"] = r.error;
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    j["checks"] = checks;
    j["warnings"] = r.warnings;
    j["results"] = r.summary;
    json files = json::array();
    for (const auto& [name, t] : r.tables) files.push_back(name);
    j["csv"] = files;
    j["config"] = config_json(cfg);
    return j;
}

namespace detail {

/// Short form of a number for check labels.
inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline RadialGrid study_grid(const ExperimentConfig& cfg, const ModelParams& p) {
    return build_grid(p, cfg.grid.rule, cfg.window());
}

inline std::shared_ptr<const FockBasis> basis_for(const ModelParams& p) {
    return std::make_shared<const FockBasis>(p.n_modes, p.n_max);
}

inline ModelParams with(ModelParams p, double g, std::size_t n_modes, std::size_t n_max) {
    p.g = g;
    p.n_modes = n_modes;
    p.n_max = n_max;
    return p;
}

/// Every entry is strictly below its predecessor.
inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

/// Indices of `gs` sorted by decreasing g.
inline std::vector<std::size_t> by_decreasing(const std::vector<double>& gs) {
    std::vector<std::size_t> idx(gs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return gs[a] > gs[b]; });
    return idx;
}

/// Ψ_{λ₀} = ⟨v, φ₀⊗Ω⟩ v for the Hermitian ground vector v of the even sector.
inline Eigen::VectorXcd ground_vector(const OperatorMatrix& h) {
    const auto even = h.basis->sector(0);
    const auto eig = eigensolve_hermitian(restrict_to(h.entries, even));
    const auto [i0, ov] = best_overlap(eig, 0, 0.0);
    if (ov < kMinOverlap) throw AmbiguityError("ground vector: overlap with the bare ground state below 0.5");
    const Eigen::VectorXcd v = embed(eig.vectors.col(i0), even, h.basis->dimension());
    return v * std::conj(v[FockBasis::index(0, 0)]);
}

inline RadialProfile bump_radial(double center, double half_width) {
    return [=](double r) { return cplx(bump(r, center, half_width), 0.0); };
}

inline Eigen::VectorXcd random_unit(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
    return v.normalized();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// resonance: λ₀, λ₁, golden rule, θ-independence, Riesz projection

inline StudyResult resonance_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "resonance";
    const auto& rc = cfg.resonance;
    const cplx theta = cfg.model.theta;
    const double E_I = fermi_golden_rule(cfg.model);

    const auto runs = parallel_map(rc.g_list.size(), [&](std::size_t i) {
        const ModelParams p = detail::with(cfg.model, rc.g_list[i], cfg.model.n_modes, cfg.model.n_max);
        const auto grid = detail::study_grid(cfg, p);
        return compute_resonances(p, theta, grid, detail::basis_for(p));
    });

    CsvTable table({"g", "lambda0", "re_lambda1", "im_lambda1", "E1", "E_I", "fgr_ratio", "overlap0", "overlap1",
                    "norm_psi0"});
    json rows = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        const double ratio = fgr_ratio(r, cfg.model);
        table.add_row({r.g, r.lambda0, r.lambda1.real(), r.lambda1.imag(), r.E1, E_I, ratio, r.overlap0, r.overlap1,
                       r.norm_psi0});
        json row{{"g", r.g},           {"lambda0", r.lambda0},   {"lambda1", complex_json(r.lambda1)},
                 {"E1", r.E1},         {"fgr_ratio", ratio},     {"overlap0", r.overlap0},
                 {"overlap1", r.overlap1}, {"norm_psi0", r.norm_psi0}};
        if (!(r.g > 0.0)) {
            row["fgr_ratio_status"] = "undefined (g = 0)";
            out.warnings.push_back("golden-rule ratio undefined at g = 0");
        }
        rows.push_back(row);
    }
    out.summary["E_I"] = E_I;
    out.summary["couplings"] = rows;
    out.tables.emplace_back("resonance.csv", std::move(table));

    // Golden rule: deviation at the smallest g and monotone improvement.
    std::vector<double> gs, devs;
    for (std::size_t i : detail::by_decreasing(rc.g_list)) {
        if (!(rc.g_list[i] > 0.0)) continue;
        gs.push_back(rc.g_list[i]);
        devs.push_back(std::abs(fgr_ratio(runs[i], cfg.model) - 1.0));
    }
    if (!devs.empty()) {
        out.check(1, "golden-rule ratio deviation at g = " + detail::short_num(gs.back()), devs.back(), rc.fgr_tol, "<=",
                  devs.back() <= rc.fgr_tol);
        if (devs.size() > 1)
            out.check(1, "golden-rule deviation decreases with g", devs.back(), devs.front(), "decreasing",
                      detail::strictly_decreasing(devs));
    }

    // θ-independence at each grid size.
    std::vector<cplx> thetas;
    for (double t : rc.theta_im_list) thetas.emplace_back(theta.real(), t);
    const auto scans = parallel_map(rc.scan_n_modes.size(), [&](std::size_t i) {
        const ModelParams p = detail::with(cfg.model, rc.scan_g, rc.scan_n_modes[i], cfg.model.n_max);
        return theta_scan(p, detail::study_grid(cfg, p), detail::basis_for(p), thetas);
    });
    CsvTable scan_table({"n_modes", "theta_im", "lambda0", "re_lambda1", "im_lambda1"});
    json scan_json = json::array();
    std::vector<double> dev1;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        for (const auto& row : scans[i].rows)
            scan_table.add_row({static_cast<double>(rc.scan_n_modes[i]), row.theta.imag(), row.lambda0,
                                row.lambda1.real(), row.lambda1.imag()});
        scan_json.push_back({{"n_modes", rc.scan_n_modes[i]},
                             {"max_dev_lambda0", scans[i].max_dev_lambda0},
                             {"max_dev_lambda1", scans[i].max_dev_lambda1}});
        dev1.push_back(scans[i].max_dev_lambda1);
    }
    out.summary["theta_scan"] = scan_json;
    out.tables.emplace_back("theta_scan.csv", std::move(scan_table));
    if (!dev1.empty()) {
        const double tol = rc.theta_tol * cfg.model.e1;
        out.check(2, "max |lambda1(theta) - lambda1(theta')| at n_modes = " + std::to_string(rc.scan_n_modes.back()),
                  dev1.back(), tol, "<=", dev1.back() <= tol);
        if (dev1.size() > 1)
            out.check(2, "theta deviation decreases under grid refinement", dev1.back(), dev1.front(), "decreasing",
                      detail::strictly_decreasing(dev1));
    }

    // Riesz projection against the eigenvector dyad at the scan coupling.
    {
        const ModelParams p = detail::with(cfg.model, rc.scan_g, cfg.model.n_modes, cfg.model.n_max);
        const auto grid = detail::study_grid(cfg, p);
        const auto basis = detail::basis_for(p);
        const OperatorMatrix h = assemble_hamiltonian(p, theta, grid, basis);
        const ResonanceData r = compute_resonances(p, theta, grid, basis, ResonanceOptions{0.0, false});
        const Eigen::VectorXcd spectrum = eigensolve(h.entries, false).values;
        double gap = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < spectrum.size(); ++i) {
            const double d = std::abs(spectrum[i] - r.lambda1);
            if (d > 1e-10) gap = std::min(gap, d);
        }
        const double radius = 0.5 * gap;
        const Eigen::MatrixXcd riesz = riesz_projection(h.entries, r.lambda1, radius, rc.riesz_points);
        const Eigen::MatrixXcd dyad = r.P1_theta.dense();
        const double err = (riesz - dyad).norm() / dyad.norm();
        out.summary["riesz"] = {{"g", p.g}, {"radius", radius}, {"relative_error", err}};
        out.check(0, "Riesz projection matches eigenvector dyad", err, rc.riesz_tol, "<=", err <= rc.riesz_tol);

        // Resolvent norms on a coarse sample around both eigenvalues.
        const double nu = theta.imag();
        const double rho1 = cfg.multiscale.rho0 * cfg.multiscale.rho;
        std::vector<cplx> zs;
        for (double x : {-0.6, -0.2, 0.0, 0.3, 0.7, 1.0, 1.3, 1.7})
            for (double y : {0.2, 0.05, 0.0, -0.005})
                zs.emplace_back(x * p.e1, y * p.e1);
        CsvTable rt({"re_z", "im_z", "region", "resolvent_norm", "skipped"});
        for (const auto& s : resolvent_probe(h.entries, spectrum, zs, p, nu, rho1)) {
            rt.add_row(std::vector<std::string>{format_double(s.z.real()), format_double(s.z.imag()), s.region,
                                                format_double(s.norm), s.skipped ? "1" : "0"});
            if (s.skipped) out.warnings.push_back("resolvent sample " + format_double(s.z.real()) + "+" +
                                                  format_double(s.z.imag()) + "i: " + s.warning);
        }
        out.tables.emplace_back("resolvent.csv", std::move(rt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// multiscale: infrared-cutoff ladder and convergence exponents

inline StudyResult multiscale_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "multiscale";
    const auto& mc = cfg.multiscale;
    const cplx theta = cfg.model.theta;
    const ModelParams p = detail::with(cfg.model, mc.g, cfg.model.n_modes, cfg.model.n_max);
    const auto grid = detail::study_grid(cfg, p);
    const auto basis = detail::basis_for(p);

    // The ladder and the two-coupling ratio test are independent.
    struct Parts {
        std::optional<ConvergenceReport> report;
        std::vector<std::string> warnings;
        std::optional<GRatioTest> ratio;
    };
    const auto parts = parallel_map(2, [&](std::size_t which) {
        Parts part;
        if (which == 0) {
            const auto ref = compute_resonances(p, theta, grid, basis, ResonanceOptions{0.0, false});
            const auto ladder = build_ladder(p, theta, grid, basis, mc.rho0, mc.rho, mc.depth);
            part.warnings = ladder.warnings;
            part.report = convergence_report(ladder, ref);
        } else {
            part.ratio = g_ratio_test(p, theta, grid, basis, mc.rho0, mc.rho, mc.ratio_depth, mc.g_low);
        }
        return part;
    });
    const ConvergenceReport& rep = *parts[0].report;
    const GRatioTest& gr = *parts[1].ratio;
    out.warnings = parts[0].warnings;

    CsvTable table({"n", "rho_n", "gap0", "gap1", "proj_gap"});
    for (const auto& r : rep.rows) table.add_row({static_cast<double>(r.n), r.rho_n, r.gap0, r.gap1, r.proj_gap});
    out.tables.emplace_back("ladder.csv", std::move(table));
    CsvTable rt({"level", "ratio_gap0", "ratio_gap1", "ratio_proj"});
    for (std::size_t i = 0; i < gr.ratio_proj.size(); ++i)
        rt.add_row({static_cast<double>(i), gr.ratio_gap0[i], gr.ratio_gap1[i], gr.ratio_proj[i]});
    out.tables.emplace_back("g_ratio.csv", std::move(rt));

    auto fit_json = [](const LineFit& f) { return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}}; };
    out.summary["g"] = p.g;
    out.summary["exponent_gap0"] = fit_json(rep.exponent0);
    out.summary["exponent_gap1"] = fit_json(rep.exponent1);
    out.summary["exponent_projection"] = fit_json(rep.proj_exponent);
    out.summary["g_ratio"] = {{"g_low", gr.g_low},         {"g_high", gr.g_high},       {"mean_gap0", gr.mean_gap0},
                              {"mean_gap1", gr.mean_gap1}, {"mean_proj", gr.mean_proj}};

    const double gap_min = 1.0 + p.mu / 2.0 - mc.margin, proj_min = p.mu / 2.0 - mc.margin;
    out.check(7, "eigenvalue-gap exponent (lambda0)", rep.exponent0.slope, gap_min, ">=",
              rep.exponent0.slope >= gap_min);
    out.check(7, "eigenvalue-gap exponent (lambda1)", rep.exponent1.slope, gap_min, ">=",
              rep.exponent1.slope >= gap_min);
    out.check(7, "projection-gap exponent", rep.proj_exponent.slope, proj_min, ">=",
              rep.proj_exponent.slope >= proj_min);
    auto ratio_ok = [&](double v) { return std::abs(v - mc.ratio_target) <= mc.ratio_tol; };
    out.check(7, "eigenvalue-gap ratio under g doubling (lambda0)", gr.mean_gap0, mc.ratio_target, "within",
              ratio_ok(gr.mean_gap0));
    out.check(7, "eigenvalue-gap ratio under g doubling (lambda1)", gr.mean_gap1, mc.ratio_target, "within",
              ratio_ok(gr.mean_gap1));
    out.check(7, "projection-gap ratio under g doubling", gr.mean_proj, mc.ratio_target, "within",
              ratio_ok(gr.mean_proj));
    return out;
}

// ---------------------------------------------------------------------------
// scatter: principal term against the spectral-sum oracle

inline StudyResult scatter_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "scatter";
    const auto& sc = cfg.scatter;
    const cplx theta = cfg.model.theta;

    struct Point {
        ResonanceData res;
        PrincipalTerm tp;
        OracleResult oracle;
        double center = 0.0;
    };
    const auto points = parallel_map(sc.g_list.size(), [&](std::size_t i) {
        const ModelParams p = detail::with(cfg.model, sc.g_list[i], sc.n_modes, sc.n_max);
        const auto grid = detail::study_grid(cfg, p);
        const auto basis = detail::basis_for(p);
        Point pt;
        pt.res = compute_resonances(p, theta, grid, basis);
        pt.center = pt.res.lambda1.real() - pt.res.lambda0;
        const GFunction G = build_G(bump_profile(pt.center, sc.bump_half_width * p.e1), p);
        pt.tp = principal_term(G, pt.res, p);
        pt.oracle = oracle_transition(G, p, grid, basis);
        return pt;
    });

    CsvTable table({"g", "re_T_P", "im_T_P", "re_T_oracle", "im_T_oracle", "rel_dev", "abs_T_P_over_g2",
                    "form_mismatch", "center"});
    json rows = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        const double g = sc.g_list[i];
        const double dev = std::abs(pt.oracle.T - pt.tp.T_P) / std::abs(pt.tp.T_P);
        const double scaled = std::abs(pt.tp.T_P) / (g * g);
        const double mismatch = std::abs(pt.tp.T_P - pt.tp.T_P_second_form) / std::abs(pt.tp.T_P);
        table.add_row({g, pt.tp.T_P.real(), pt.tp.T_P.imag(), pt.oracle.T.real(), pt.oracle.T.imag(), dev, scaled,
                       mismatch, pt.center});
        rows.push_back({{"g", g},
                        {"T_P", complex_json(pt.tp.T_P)},
                        {"T_oracle", complex_json(pt.oracle.T)},
                        {"relative_deviation", dev},
                        {"abs_T_P_over_g2", scaled},
                        {"form_mismatch", mismatch},
                        {"lambda0", pt.res.lambda0},
                        {"lambda1", complex_json(pt.res.lambda1)},
                        {"profile_center", pt.center},
                        {"oracle_modes_used", pt.oracle.modes_used}});
    }
    out.summary["couplings"] = rows;
    out.tables.emplace_back("scatter.csv", std::move(table));

    std::vector<double> devs, scaled;
    bool have_dev_g = false;
    for (std::size_t i : detail::by_decreasing(sc.g_list)) {
        const auto& pt = points[i];
        const double dev = std::abs(pt.oracle.T - pt.tp.T_P) / std::abs(pt.tp.T_P);
        devs.push_back(dev);
        scaled.push_back(std::abs(pt.tp.T_P) / (sc.g_list[i] * sc.g_list[i]));
        const double mismatch = std::abs(pt.tp.T_P - pt.tp.T_P_second_form) / std::abs(pt.tp.T_P);
        out.check(0, "two forms of T_P agree at g = " + detail::short_num(sc.g_list[i]), mismatch, sc.form_tol, "<=",
                  mismatch <= sc.form_tol);
        if (sc.g_list[i] == sc.dev_g) {
            have_dev_g = true;
            out.check(3, "oracle deviation at g = " + detail::short_num(sc.dev_g), dev, sc.dev_tol, "<=",
                      dev <= sc.dev_tol);
        }
    }
    if (!have_dev_g) out.warnings.push_back("scatter.dev_g is not in scatter.g_list; deviation bound not checked");
    if (devs.size() > 1)
        out.check(3, "oracle deviation decreases with g", devs.back(), devs.front(), "decreasing",
                  detail::strictly_decreasing(devs));
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    out.check(5, "|T_P|/g^2 band max/min", *hi / *lo, sc.band, "<", *hi / *lo < sc.band);
    out.check(5, "|T_P|/g^2 lower bound", *lo, 0.0, ">", *lo > 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// lineshape: k'-scan and Lorentzian fit

inline StudyResult lineshape_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "lineshape";
    const auto& lc = cfg.lineshape;
    const ModelParams p = detail::with(cfg.model, lc.g, cfg.model.n_modes, cfg.model.n_max);
    const auto grid = detail::study_grid(cfg, p);
    const ResonanceData res = compute_resonances(p, cfg.model.theta, grid, detail::basis_for(p));
    const double x0 = res.lambda1.real() - res.lambda0;
    const double w = std::abs(res.lambda1.imag());
    const double lo = std::max(x0 - lc.span * w, 1e-6 * p.e1);
    const Lineshape ls = lineshape_scan(res, p, x0, lo, x0 + lc.span * w, lc.points);

    CsvTable table({"kprime", "re_T", "im_T", "abs_T2", "lorentz"});
    for (const auto& r : ls.rows) table.add_row({r.kprime, r.T.real(), r.T.imag(), r.absT2, r.lorentz});
    out.tables.emplace_back("lineshape.csv", std::move(table));

    const double center_dev = std::abs(ls.fit.center - ls.expected_center) / std::abs(ls.expected_center);
    const double fwhm_dev = std::abs(ls.fit.fwhm() - ls.expected_fwhm) / ls.expected_fwhm;
    const double argmax_dev = std::abs(ls.argmax_kprime - ls.expected_center) / std::abs(ls.expected_center);
    out.summary = {{"g", p.g},
                   {"lambda0", res.lambda0},
                   {"lambda1", complex_json(res.lambda1)},
                   {"expected_center", ls.expected_center},
                   {"expected_fwhm", ls.expected_fwhm},
                   {"fit_center", ls.fit.center},
                   {"fit_fwhm", ls.fit.fwhm()},
                   {"fit_amplitude", ls.fit.amplitude},
                   {"argmax_kprime", ls.argmax_kprime}};
    out.check(4, "Lorentzian center vs Re lambda1 - lambda0", center_dev, lc.center_tol, "<=",
              center_dev <= lc.center_tol);
    out.check(4, "Lorentzian FWHM vs 2 g^2 |E1|", fwhm_dev, lc.width_tol, "<=", fwhm_dev <= lc.width_tol);
    out.check(0, "argmax of |T|^2 vs Re lambda1 - lambda0", argmax_dev, lc.center_tol, "<=",
              argmax_dev <= lc.center_tol);
    return out;
}

// ---------------------------------------------------------------------------
// laplace: contour representation on random small models

inline StudyResult laplace_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "laplace";
    const auto& lc = cfg.laplace;
    const cplx theta(0.0, lc.nu);

    // Random spin-boson models with dimension at most max_dim. A draw whose
    // dilated spectrum has an eigenvalue other than λ₀ on or above the real
    // axis admits no contour Γ(ε, R); such draws are replaced and counted.
    struct Model {
        ModelParams p;
        OperatorMatrix h_theta;
        OperatorMatrix h0;
        Contour contour;
        Eigen::VectorXcd phi, psi;
    };
    std::vector<Model> models;
    int rejected = 0;
    {
        std::mt19937_64 rng(cfg.output.seed);
        std::uniform_real_distribution<double> gd(lc.g_min, lc.g_max);
        // n_max = 2 needs (n+1)(n+2) <= max_dim, n_max = 1 needs 2(n+1) <= max_dim.
        const auto cap2 = static_cast<std::size_t>((std::sqrt(4.0 * lc.max_dim + 1.0) - 3.0) / 2.0);
        const auto cap1 = static_cast<std::size_t>(lc.max_dim / 2 - 1);
        while (static_cast<int>(models.size()) < lc.models) {
            if (rejected > 50 * lc.models) throw ContourError("laplace: too many random models without a valid contour");
            Model m;
            m.p = cfg.model;
            m.p.g = gd(rng);
            m.p.n_max = (models.size() % 2 == 1 && cap2 >= 2) ? 2 : 1;
            const std::size_t cap = m.p.n_max == 2 ? cap2 : cap1;
            m.p.n_modes = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, cap))(rng);
            const auto grid = build_grid(m.p);
            const auto basis = detail::basis_for(m.p);
            m.h_theta = assemble_hamiltonian(m.p, theta, grid, basis);
            m.h0 = assemble_hamiltonian(m.p, cplx(0.0, 0.0), grid, basis);
            m.phi = detail::random_unit(basis->dimension(), rng);
            m.psi = detail::random_unit(basis->dimension(), rng);
            const Eigen::VectorXcd spectrum = eigensolve(m.h_theta.entries, false).values;
            Index i0 = 0;
            for (Index i = 1; i < spectrum.size(); ++i)
                if (spectrum[i].real() < spectrum[i0].real()) i0 = i;
            bool admissible = true;
            for (Index i = 0; i < spectrum.size(); ++i)
                if (i != i0 && spectrum[i].imag() > -1e-6) admissible = false;
            if (admissible) {
                try {
                    m.contour = default_contour(spectrum, spectrum[i0].real(), lc.nu);
                } catch (const ContourError&) {
                    admissible = false;
                }
            }
            if (!admissible) {
                ++rejected;
                continue;
            }
            models.push_back(std::move(m));
        }
    }
    if (rejected > 0)
        out.warnings.push_back(std::to_string(rejected) + " random models redrawn: no admissible contour");

    struct Row {
        int model;
        std::size_t dim;
        double g;
        double t;
        double err_direct;
        double err_dilated;
        double invariance;
        double quad_error;
    };
    const auto per_model = parallel_map(models.size(), [&](std::size_t k) {
        const Model& m = models[k];
        const Contour& c = m.contour;
        const Propagator prop(m.h0.entries);
        std::vector<Row> rows;
        for (double t : lc.t_list) {
            const auto base = laplace_matrix_element(m.h_theta.entries, m.phi, m.psi, t, c);
            Contour half = c, wide = c;
            half.epsilon *= 0.5;
            wide.R *= 2.0;
            const double inv =
                std::max(std::abs(laplace_matrix_element(m.h_theta.entries, m.phi, m.psi, t, half).value - base.value),
                         std::abs(laplace_matrix_element(m.h_theta.entries, m.phi, m.psi, t, wide).value - base.value));
            const cplx direct = m.psi.dot(prop.apply(m.phi, t));
            rows.push_back(Row{static_cast<int>(k), static_cast<std::size_t>(m.h0.dimension()), m.p.g, t,
                               std::abs(base.value - direct), std::abs(base.value - base.direct_dilated), inv,
                               base.quad_error});
        }
        return rows;
    });

    CsvTable table({"model", "dim", "g", "t", "err_vs_propagation", "err_vs_dilated_propagation",
                    "contour_invariance", "quad_error"});
    double max_direct = 0.0, max_dilated = 0.0, max_inv = 0.0;
    for (const auto& rows : per_model)
        for (const auto& r : rows) {
            table.add_row({static_cast<double>(r.model), static_cast<double>(r.dim), r.g, r.t, r.err_direct,
                           r.err_dilated, r.invariance, r.quad_error});
            max_direct = std::max(max_direct, r.err_direct);
            max_dilated = std::max(max_dilated, r.err_dilated);
            max_inv = std::max(max_inv, r.invariance);
        }
    out.tables.emplace_back("laplace.csv", std::move(table));
    out.summary = {{"models", lc.models},
                   {"redrawn_models", rejected},
                   {"theta_im", lc.nu},
                   {"max_err_vs_propagation", max_direct},
                   {"max_err_vs_dilated_propagation", max_dilated},
                   {"max_contour_invariance", max_inv}};
    out.check(6, "contour value vs e^{-itH} propagation", max_direct, lc.tol, "<=", max_direct <= lc.tol);
    out.check(6, "invariance under epsilon halving and R doubling", max_inv, lc.tol, "<=", max_inv <= lc.tol);
    out.check(6, "contour value vs e^{-itH^theta} on the same grid", max_dilated, lc.tol, "<=", max_dilated <= lc.tol,
              true);
    return out;
}

// ---------------------------------------------------------------------------
// asymptotics: identities for a_t(h) and the overlap decay

inline StudyResult asymptotics_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "asymptotics";
    const auto& ac = cfg.asymptotics;
    const cplx zero(0.0, 0.0);
    std::mt19937_64 rng(cfg.output.seed);

    // Finite-time identity on a random state.
    {
        const ModelParams p = detail::with(cfg.model, ac.g, ac.identity_n_modes, ac.identity_n_max);
        const auto grid = detail::study_grid(cfg, p);
        const OperatorMatrix h = assemble_hamiltonian(p, zero, grid, detail::basis_for(p));
        const Eigen::VectorXcd hv = radial_reduction(grid, detail::bump_radial(ac.profile_center, ac.identity_half_width));
        const Eigen::VectorXcd psi = detail::random_unit(h.dimension(), rng);
        const auto r = finite_time_identity_check(h, p, grid, hv, psi, ac.identity_t);
        const double coarse =
            finite_time_identity_check(h, p, grid, hv, psi, ac.identity_t, SQuadrature::CompositeGauss, 8).residual;
        const double fine =
            finite_time_identity_check(h, p, grid, hv, psi, ac.identity_t, SQuadrature::CompositeGauss, 16).residual;
        out.summary["identity"] = {{"t", ac.identity_t},
                                   {"residual", r.residual},
                                   {"residual_c_number", r.residual_c_number},
                                   {"psi_norm", r.psi_norm},
                                   {"panels", r.panels},
                                   {"composite_8_panels", coarse},
                                   {"composite_16_panels", fine}};
        out.check(8, "finite-time identity residual / |psi|", r.residual / r.psi_norm, ac.identity_tol, "<=",
                  r.residual <= ac.identity_tol * r.psi_norm);
        out.check(0, "composite s-rule residual drops 4x when panels double", coarse / fine, 4.0, ">=",
                  coarse >= 4.0 * fine, true);
    }

    // Commutation relation and pull-through on interior sectors.
    {
        const ModelParams p = detail::with(cfg.model, ac.g, ac.interior_n_modes, 2);
        const auto grid = detail::study_grid(cfg, p);
        const OperatorMatrix h = assemble_hamiltonian(p, zero, grid, detail::basis_for(p));
        const Propagator prop(h.entries);
        const Eigen::VectorXcd hv = radial_reduction(grid, detail::bump_radial(ac.profile_center, ac.identity_half_width));
        const Eigen::VectorXcd lv =
            radial_reduction(grid, detail::bump_radial(ac.profile_center * 1.2, 0.75 * ac.identity_half_width));
        const Eigen::VectorXcd psi0 = detail::ground_vector(h);
        double comm = 0.0, pull = 0.0;
        CsvTable table({"t", "commutation_residual", "pull_through_residual"});
        for (double t : ac.interior_t_list) {
            const double c = commutation_check(prop, *h.basis, grid, hv, lv, psi0, t);
            const double q = pull_through_check(prop, *h.basis, grid, hv, t, ac.interior_s);
            table.add_row({t, c, q});
            comm = std::max(comm, c);
            pull = std::max(pull, q);
        }
        out.tables.emplace_back("interior_identities.csv", std::move(table));
        out.summary["interior"] = {{"max_commutation_residual", comm}, {"max_pull_through_residual", pull}};
        out.check(8, "commutation relation on interior sectors", comm, ac.interior_tol, "<=", comm <= ac.interior_tol);
        out.check(8, "pull-through identity", pull, ac.interior_tol, "<=", pull <= ac.interior_tol);
    }

    // Vanishing of a_t(h)Ψ_{λ₀} on a grid refined around the profile.
    {
        ModelParams p = detail::with(cfg.model, ac.g, ac.vanishing_n_modes, 1);
        const RefineWindow w{ac.profile_center, std::max(cfg.grid.refine_half_width, ac.profile_half_width),
                             cfg.grid.refine_fraction};
        const auto grid = build_grid(p, "refined", w);
        const OperatorMatrix h = assemble_hamiltonian(p, zero, grid, detail::basis_for(p));
        const double a = ac.profile_center - ac.profile_half_width, b = ac.profile_center + ac.profile_half_width;
        const Eigen::VectorXcd hv = radial_reduction(grid, detail::bump_radial(ac.profile_center, ac.profile_half_width));
        const auto v = asymptotic_vanishing_check(*h.basis, grid, hv, detail::ground_vector(h), ac.vanishing_t_list, a, b);
        CsvTable table({"t", "norm", "beyond_recurrence"});
        for (const auto& r : v.rows) table.add_row({r.t, r.norm, r.beyond_recurrence ? 1.0 : 0.0});
        out.tables.emplace_back("vanishing.csv", std::move(table));
        for (const auto& wmsg : v.warnings) out.warnings.push_back(wmsg);
        const double n0 = v.rows.front().norm, nt = v.rows.back().norm;
        const double ratio = n0 > 0.0 ? nt / n0 : 0.0;
        out.summary["vanishing"] = {{"recurrence_time", v.recurrence_time},
                                    {"t_final", v.rows.back().t},
                                    {"norm_t0", n0},
                                    {"norm_final", nt},
                                    {"ratio", ratio}};
        out.check(8, "|a_t(h) Psi| at t = " + detail::short_num(v.rows.back().t) + " relative to t = 0", ratio,
                  ac.vanishing_ratio, "<=", ratio <= ac.vanishing_ratio);
        out.check(8, "final t below half the recurrence time", v.rows.back().t, 0.5 * v.recurrence_time, "<=",
                  !v.rows.back().beyond_recurrence);
    }

    // Overlap decay ⟨h_s, f⟩.
    {
        const double a = ac.profile_center - ac.overlap_half_width, b = ac.profile_center + ac.overlap_half_width;
        const auto d = overlap_decay(cfg.model, detail::bump_radial(ac.profile_center, ac.overlap_half_width), a, b,
                                     ac.overlap_s_min, ac.overlap_s_max);
        CsvTable table({"s", "abs_overlap"});
        for (const auto& [s, val] : d.rows) table.add_row({s, val});
        out.tables.emplace_back("overlap_decay.csv", std::move(table));
        CsvTable env({"s", "envelope"});
        for (const auto& [s, val] : d.envelope) env.add_row({s, val});
        out.tables.emplace_back("overlap_envelope.csv", std::move(env));
        out.summary["overlap_decay"] = {{"exponent", d.fit.slope}, {"intercept", d.fit.intercept}, {"r2", d.fit.r2}};
        out.check(10, "overlap envelope exponent", d.fit.slope, ac.overlap_max_exponent, "<=",
                  d.fit.slope <= ac.overlap_max_exponent);
    }
    return out;
}

// ---------------------------------------------------------------------------
// estimates: relative bounds for a(h), a(h)* and V

inline StudyResult estimates_study(const ExperimentConfig& cfg) {
    StudyResult out;
    out.name = "estimates";
    const auto& ec = cfg.estimates;
    const ModelParams p = detail::with(cfg.model, cfg.model.g, ec.n_modes, ec.n_max);
    const auto grid = detail::study_grid(cfg, p);
    const FockBasis basis(ec.n_modes, ec.n_max);
    const auto r = standard_estimate_check(p, grid, basis, ec.trials, cfg.output.seed);
    double sat = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double w = grid.nodes[j];
        const double exact = std::sqrt(ec.n_max * w / (ec.n_max * w + 1.0));
        sat = std::max(sat, std::abs(single_mode_ratio(grid, basis, j) - exact));
    }
    out.summary = {{"trials", ec.trials},
                   {"creation", r.creation},
                   {"annihilation", r.annihilation},
                   {"interaction", r.interaction},
                   {"random_vectors", r.vector_max},
                   {"single_mode_deviation", sat}};
    const double lim = 1.0 + ec.tol;
    out.check(9, "creation bound ratio", r.creation, lim, "<=", r.creation <= lim);
    out.check(9, "annihilation bound ratio", r.annihilation, lim, "<=", r.annihilation <= lim);
    out.check(9, "interaction bound ratio", r.interaction, lim, "<=", r.interaction <= lim);
    out.check(9, "random-vector ratio", r.vector_max, lim, "<=", r.vector_max <= lim);
    out.check(0, "single-mode saturation matches closed form", sat, 1e-12, "<=", sat <= 1e-12, true);
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

inline const std::vector<std::string>& study_names() {
    static const std::vector<std::string> names{"resonance", "multiscale", "scatter", "lineshape",
                                                "laplace",   "asymptotics", "estimates"};
    return names;
}

/// Runs one study; module errors are caught and recorded with the study name.
inline StudyResult run_study(const std::string& name, const ExperimentConfig& cfg) {
    using Fn = StudyResult (*)(const ExperimentConfig&);
    static const std::map<std::string, Fn> table{
        {"resonance", resonance_study}, {"multiscale", multiscale_study}, {"scatter", scatter_study},
        {"lineshape", lineshape_study}, {"laplace", laplace_study},       {"asymptotics", asymptotics_study},
        {"estimates", estimates_study}};
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown study '" + name + "'");
    try {
        return it->second(cfg);
    } catch (const std::exception& e) {
        StudyResult out;
        out.name = name;
        out.complete = false;
        out.error = name + ": " + e.what();
        return out;
    }
}

}  // namespace sbscatter
