// experiment.hpp: experiment configuration, TOML parsing and command-line overrides
//
// Every tolerance used by a study is a field here; the defaults are the
// acceptance settings.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "sbscatter/errors.hpp"
#include "sbscatter/model.hpp"
#include "sbscatter/report.hpp"

namespace sbscatter {

struct GridConfig {
    std::string rule = "gauss-legendre";
    double refine_center = 1.0;
    double refine_half_width = 0.25;
    double refine_fraction = 0.5;
};

struct ResonanceConfig {
    std::vector<double> g_list{0.1, 0.05, 0.02};
    double fgr_tol = 0.15;
    std::vector<double> theta_im_list{kPi / 32.0, kPi / 24.0, kPi / 20.0};
    std::vector<std::size_t> scan_n_modes{200, 400};
    double scan_g = 0.05;
    double theta_tol = 1e-3;  // in units of e1
    int riesz_points = 64;
    double riesz_tol = 1e-8;
};

struct MultiscaleConfig {
    double g = 0.05;
    double rho0 = 0.5;
    double rho = 0.25;
    int depth = 6;
    double margin = 0.15;
    double g_low = 0.025;
    int ratio_depth = 4;
    double ratio_target = 2.0;
    double ratio_tol = 0.3;
};

struct ScatterConfig {
    std::vector<double> g_list{0.1, 0.05, 0.02};
    std::size_t n_modes = 60;
    std::size_t n_max = 2;
    double bump_half_width = 0.2;  // in units of e1
    double dev_g = 0.05;
    double dev_tol = 0.35;
    double band = 2.0;
    double form_tol = 1e-10;
};

struct LineshapeConfig {
    double g = 0.05;
    double span = 10.0;  // half-range of the k' scan in units of |Im λ₁|
    int points = 401;
    double center_tol = 0.02;
    double width_tol = 0.1;
};

struct LaplaceConfig {
    int models = 20;
    int max_dim = 50;
    std::vector<double> t_list{0.1, 1.0, 10.0};
    double g_min = 0.05;
    double g_max = 0.3;
    double nu = kPi / 32.0;
    double tol = 1e-8;
};

struct AsymptoticsConfig {
    double g = 0.05;
    std::size_t identity_n_modes = 12;
    std::size_t identity_n_max = 2;
    double identity_t = 50.0;
    double identity_tol = 1e-8;  // relative to ‖ψ‖
    double identity_half_width = 0.8;  // profile for the identity and interior checks
    std::size_t interior_n_modes = 8;
    std::vector<double> interior_t_list{5.0, 50.0};
    double interior_s = 3.0;
    double interior_tol = 1e-10;
    std::size_t vanishing_n_modes = 400;
    std::vector<double> vanishing_t_list{0.0, 25.0, 50.0, 100.0, 200.0};
    double vanishing_ratio = 0.1;
    double profile_center = 1.0;
    double profile_half_width = 0.2;
    double overlap_half_width = 0.5;
    double overlap_s_min = 10.0;
    double overlap_s_max = 1000.0;
    double overlap_max_exponent = -2.0;
};

struct EstimatesConfig {
    int trials = 100;
    std::size_t n_modes = 10;
    std::size_t n_max = 2;
    double tol = 1e-10;
};

struct OutputConfig {
    std::uint64_t seed = 20240611;
    bool cache = true;
};

struct ExperimentConfig {
    ModelParams model;
    GridConfig grid;
    ResonanceConfig resonance;
    MultiscaleConfig multiscale;
    ScatterConfig scatter;
    LineshapeConfig lineshape;
    LaplaceConfig laplace;
    AsymptoticsConfig asymptotics;
    EstimatesConfig estimates;
    OutputConfig output;

    RefineWindow window() const { return RefineWindow{grid.refine_center, grid.refine_half_width, grid.refine_fraction}; }
};

namespace detail {

inline std::string where(const toml::node& n) {
    const auto& src = n.source();
    return src.begin.line ? "line " + std::to_string(src.begin.line) + ": " : "";
}

inline double as_double(const toml::node& n, const std::string& key) {
    if (auto v = n.value<double>()) return *v;
    throw ConfigError(where(n) + key + " must be a number");
}

inline std::int64_t as_int(const toml::node& n, const std::string& key) {
    if (auto v = n.as_integer()) return v->get();
    throw ConfigError(where(n) + key + " must be an integer");
}

inline std::size_t as_size(const toml::node& n, const std::string& key) {
    const auto v = as_int(n, key);
    if (v < 0) throw ConfigError(where(n) + key + " must be non-negative");
    return static_cast<std::size_t>(v);
}

template <typename T, typename F>
std::vector<T> as_list(const toml::node& n, const std::string& key, F&& conv) {
    std::vector<T> out;
    if (const auto* arr = n.as_array()) {
        for (const auto& e : *arr) out.push_back(conv(e, key));
    } else {
        out.push_back(conv(n, key));  // a scalar is a one-element list
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const toml::node&)>;

inline const std::map<std::string, Setter>& setters() {
    using C = ExperimentConfig;
    using N = toml::node;
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto num = [&t](const std::string& k, auto member) {
            t[k] = [k, member](C& c, const N& n) { std::invoke(member, c) = as_double(n, k); };
        };
        auto size = [&t](const std::string& k, auto member) {
            t[k] = [k, member](C& c, const N& n) { std::invoke(member, c) = as_size(n, k); };
        };
        auto integer = [&t](const std::string& k, auto member) {
            t[k] = [k, member](C& c, const N& n) { std::invoke(member, c) = static_cast<int>(as_int(n, k)); };
        };
        auto nums = [&t](const std::string& k, auto member) {
            t[k] = [k, member](C& c, const N& n) { std::invoke(member, c) = as_list<double>(n, k, as_double); };
        };

        num("model.e1", [](C& c) -> double& { return c.model.e1; });
        num("model.lambda_uv", [](C& c) -> double& { return c.model.lambda_uv; });
        num("model.mu", [](C& c) -> double& { return c.model.mu; });
        num("model.g", [](C& c) -> double& { return c.model.g; });
        t["model.theta_re"] = [](C& c, const N& n) {
            c.model.theta = cplx(as_double(n, "model.theta_re"), c.model.theta.imag());
        };
        t["model.theta_im"] = [](C& c, const N& n) {
            c.model.theta = cplx(c.model.theta.real(), as_double(n, "model.theta_im"));
        };
        num("model.k_max", [](C& c) -> double& { return c.model.k_max; });
        size("model.n_modes", [](C& c) -> std::size_t& { return c.model.n_modes; });
        size("model.n_max", [](C& c) -> std::size_t& { return c.model.n_max; });
        num("model.tail_tol", [](C& c) -> double& { return c.model.tail_tol; });
        num("model.nu_min", [](C& c) -> double& { return c.model.nu_min; });

        t["grid.rule"] = [](C& c, const N& n) {
            auto v = n.value<std::string>();
            if (!v) throw ConfigError(where(n) + "grid.rule must be a string");
            parse_grid_rule(*v);
            c.grid.rule = *v;
        };
        num("grid.refine_center", [](C& c) -> double& { return c.grid.refine_center; });
        num("grid.refine_half_width", [](C& c) -> double& { return c.grid.refine_half_width; });
        num("grid.refine_fraction", [](C& c) -> double& { return c.grid.refine_fraction; });

        nums("resonance.g_list", [](C& c) -> std::vector<double>& { return c.resonance.g_list; });
        num("resonance.fgr_tol", [](C& c) -> double& { return c.resonance.fgr_tol; });
        nums("resonance.theta_im_list", [](C& c) -> std::vector<double>& { return c.resonance.theta_im_list; });
        t["resonance.scan_n_modes"] = [](C& c, const N& n) {
            c.resonance.scan_n_modes = as_list<std::size_t>(n, "resonance.scan_n_modes", as_size);
        };
        num("resonance.scan_g", [](C& c) -> double& { return c.resonance.scan_g; });
        num("resonance.theta_tol", [](C& c) -> double& { return c.resonance.theta_tol; });
        integer("resonance.riesz_points", [](C& c) -> int& { return c.resonance.riesz_points; });
        num("resonance.riesz_tol", [](C& c) -> double& { return c.resonance.riesz_tol; });

        num("multiscale.g", [](C& c) -> double& { return c.multiscale.g; });
        num("multiscale.rho0", [](C& c) -> double& { return c.multiscale.rho0; });
        num("multiscale.rho", [](C& c) -> double& { return c.multiscale.rho; });
        integer("multiscale.depth", [](C& c) -> int& { return c.multiscale.depth; });
        num("multiscale.margin", [](C& c) -> double& { return c.multiscale.margin; });
        num("multiscale.g_low", [](C& c) -> double& { return c.multiscale.g_low; });
        integer("multiscale.ratio_depth", [](C& c) -> int& { return c.multiscale.ratio_depth; });
        num("multiscale.ratio_target", [](C& c) -> double& { return c.multiscale.ratio_target; });
        num("multiscale.ratio_tol", [](C& c) -> double& { return c.multiscale.ratio_tol; });

        nums("scatter.g_list", [](C& c) -> std::vector<double>& { return c.scatter.g_list; });
        size("scatter.n_modes", [](C& c) -> std::size_t& { return c.scatter.n_modes; });
        size("scatter.n_max", [](C& c) -> std::size_t& { return c.scatter.n_max; });
        num("scatter.bump_half_width", [](C& c) -> double& { return c.scatter.bump_half_width; });
        num("scatter.dev_g", [](C& c) -> double& { return c.scatter.dev_g; });
        num("scatter.dev_tol", [](C& c) -> double& { return c.scatter.dev_tol; });
        num("scatter.band", [](C& c) -> double& { return c.scatter.band; });
        num("scatter.form_tol", [](C& c) -> double& { return c.scatter.form_tol; });

        num("lineshape.g", [](C& c) -> double& { return c.lineshape.g; });
        num("lineshape.span", [](C& c) -> double& { return c.lineshape.span; });
        integer("lineshape.points", [](C& c) -> int& { return c.lineshape.points; });
        num("lineshape.center_tol", [](C& c) -> double& { return c.lineshape.center_tol; });
        num("lineshape.width_tol", [](C& c) -> double& { return c.lineshape.width_tol; });

        integer("laplace.models", [](C& c) -> int& { return c.laplace.models; });
        integer("laplace.max_dim", [](C& c) -> int& { return c.laplace.max_dim; });
        nums("laplace.t_list", [](C& c) -> std::vector<double>& { return c.laplace.t_list; });
        num("laplace.g_min", [](C& c) -> double& { return c.laplace.g_min; });
        num("laplace.g_max", [](C& c) -> double& { return c.laplace.g_max; });
        num("laplace.nu", [](C& c) -> double& { return c.laplace.nu; });
        num("laplace.tol", [](C& c) -> double& { return c.laplace.tol; });

        num("asymptotics.g", [](C& c) -> double& { return c.asymptotics.g; });
        size("asymptotics.identity_n_modes", [](C& c) -> std::size_t& { return c.asymptotics.identity_n_modes; });
        size("asymptotics.identity_n_max", [](C& c) -> std::size_t& { return c.asymptotics.identity_n_max; });
        num("asymptotics.identity_t", [](C& c) -> double& { return c.asymptotics.identity_t; });
        num("asymptotics.identity_tol", [](C& c) -> double& { return c.asymptotics.identity_tol; });
        num("asymptotics.identity_half_width", [](C& c) -> double& { return c.asymptotics.identity_half_width; });
        size("asymptotics.interior_n_modes", [](C& c) -> std::size_t& { return c.asymptotics.interior_n_modes; });
        nums("asymptotics.interior_t_list",
             [](C& c) -> std::vector<double>& { return c.asymptotics.interior_t_list; });
        num("asymptotics.interior_s", [](C& c) -> double& { return c.asymptotics.interior_s; });
        num("asymptotics.interior_tol", [](C& c) -> double& { return c.asymptotics.interior_tol; });
        size("asymptotics.vanishing_n_modes", [](C& c) -> std::size_t& { return c.asymptotics.vanishing_n_modes; });
        nums("asymptotics.vanishing_t_list",
             [](C& c) -> std::vector<double>& { return c.asymptotics.vanishing_t_list; });
        num("asymptotics.vanishing_ratio", [](C& c) -> double& { return c.asymptotics.vanishing_ratio; });
        num("asymptotics.profile_center", [](C& c) -> double& { return c.asymptotics.profile_center; });
        num("asymptotics.profile_half_width", [](C& c) -> double& { return c.asymptotics.profile_half_width; });
        num("asymptotics.overlap_half_width", [](C& c) -> double& { return c.asymptotics.overlap_half_width; });
        num("asymptotics.overlap_s_min", [](C& c) -> double& { return c.asymptotics.overlap_s_min; });
        num("asymptotics.overlap_s_max", [](C& c) -> double& { return c.asymptotics.overlap_s_max; });
        num("asymptotics.overlap_max_exponent",
            [](C& c) -> double& { return c.asymptotics.overlap_max_exponent; });

        integer("estimates.trials", [](C& c) -> int& { return c.estimates.trials; });
        size("estimates.n_modes", [](C& c) -> std::size_t& { return c.estimates.n_modes; });
        size("estimates.n_max", [](C& c) -> std::size_t& { return c.estimates.n_max; });
        num("estimates.tol", [](C& c) -> double& { return c.estimates.tol; });

        t["output.seed"] = [](C& c, const N& n) {
            c.output.seed = static_cast<std::uint64_t>(as_int(n, "output.seed"));
        };
        t["output.cache"] = [](C& c, const N& n) {
            auto v = n.value<bool>();
            if (!v) throw ConfigError(where(n) + "output.cache must be true or false");
            c.output.cache = *v;
        };
        return t;
    }();
    return table;
}

inline void apply_table(ExperimentConfig& cfg, const toml::table& root) {
    for (const auto& [section, node] : root) {
        const auto* tbl = node.as_table();
        if (!tbl) {
            // Top-level keys are shorthand for [model].
            const std::string key = "model." + std::string(section.str());
            const auto it = setters().find(key);
            if (it == setters().end()) throw ConfigError(where(node) + "unknown key '" + std::string(section.str()) + "'");
            it->second(cfg, node);
            continue;
        }
        for (const auto& [k, v] : *tbl) {
            const std::string key = std::string(section.str()) + "." + std::string(k.str());
            const auto it = setters().find(key);
            if (it == setters().end()) throw ConfigError(where(v) + "unknown key '" + key + "'");
            it->second(cfg, v);
        }
    }
}

template <typename T>
void require(bool ok, const std::string& msg) {
    if (!ok) throw T(msg);
}

}  // namespace detail

/// Re-checks every invariant; throws ConfigError naming the first violation.
inline void validate(const ExperimentConfig& c) {
    c.model.validate();
    using detail::require;
    parse_grid_rule(c.grid.rule);
    require<ConfigError>(c.grid.refine_half_width > 0.0, "grid.refine_half_width must be positive");
    require<ConfigError>(c.grid.refine_fraction > 0.0 && c.grid.refine_fraction < 1.0,
                         "grid.refine_fraction must lie in (0, 1)");
    require<ConfigError>(!c.resonance.g_list.empty(), "resonance.g_list must not be empty");
    for (double g : c.resonance.g_list) require<ConfigError>(g >= 0.0, "resonance.g_list entries must be >= 0");
    for (double t : c.resonance.theta_im_list)
        require<ConfigError>(in_dilation_set(cplx(0.0, t), c.model.nu_min), "resonance.theta_im_list entries must lie in (nu_min, pi/16)");
    require<ConfigError>(!c.resonance.scan_n_modes.empty(), "resonance.scan_n_modes must not be empty");
    for (std::size_t n : c.resonance.scan_n_modes) require<ConfigError>(n >= 2, "resonance.scan_n_modes entries must be >= 2");
    require<ConfigError>(c.resonance.riesz_points >= 8, "resonance.riesz_points must be at least 8");
    require<ConfigError>(c.multiscale.rho0 > 0.0 && c.multiscale.rho0 < 1.0, "multiscale.rho0 must lie in (0, 1)");
    require<ConfigError>(c.multiscale.rho > 0.0 && c.multiscale.rho <= c.model.e1 / 4.0,
                         "multiscale.rho must lie in (0, e1/4]");
    require<ConfigError>(c.multiscale.depth >= 3, "multiscale.depth must be at least 3");
    require<ConfigError>(c.multiscale.ratio_depth >= 1, "multiscale.ratio_depth must be positive");
    require<ConfigError>(c.multiscale.g_low > 0.0, "multiscale.g_low must be positive");
    require<ConfigError>(!c.scatter.g_list.empty(), "scatter.g_list must not be empty");
    for (double g : c.scatter.g_list) require<ConfigError>(g > 0.0, "scatter.g_list entries must be positive");
    require<ConfigError>(c.scatter.n_modes >= 2 && c.scatter.n_max >= 1, "scatter grid/basis too small");
    require<ConfigError>(c.scatter.bump_half_width > 0.0, "scatter.bump_half_width must be positive");
    require<ConfigError>(c.lineshape.g > 0.0, "lineshape.g must be positive");
    require<ConfigError>(c.lineshape.points >= 5, "lineshape.points must be at least 5");
    require<ConfigError>(c.lineshape.span > 0.0, "lineshape.span must be positive");
    require<ConfigError>(c.laplace.models >= 1, "laplace.models must be positive");
    require<ConfigError>(c.laplace.max_dim >= 4, "laplace.max_dim must be at least 4");
    require<ConfigError>(c.laplace.g_min > 0.0 && c.laplace.g_max >= c.laplace.g_min,
                         "laplace coupling range must satisfy 0 < g_min <= g_max");
    for (double t : c.laplace.t_list) require<ConfigError>(t > 0.0, "laplace.t_list entries must be positive");
    require<ConfigError>(c.laplace.nu > 0.0 && c.laplace.nu < kPi, "laplace.nu must lie in (0, pi)");
    require<ConfigError>(c.asymptotics.identity_n_max >= 1 && c.asymptotics.identity_n_modes >= 2,
                         "asymptotics identity model too small");
    require<ConfigError>(c.asymptotics.interior_n_modes >= 2, "asymptotics.interior_n_modes must be >= 2");
    require<ConfigError>(c.asymptotics.vanishing_t_list.size() >= 2 && c.asymptotics.vanishing_t_list.front() == 0.0,
                         "asymptotics.vanishing_t_list must start at 0 and have at least two entries");
    require<ConfigError>(c.asymptotics.overlap_s_max > c.asymptotics.overlap_s_min && c.asymptotics.overlap_s_min > 0.0,
                         "asymptotics overlap s-range must satisfy 0 < s_min < s_max");
    require<ConfigError>(c.asymptotics.profile_center - c.asymptotics.profile_half_width > 0.0 &&
                             c.asymptotics.profile_center + c.asymptotics.profile_half_width < c.model.k_max,
                         "asymptotics profile support must lie inside (0, k_max)");
    require<ConfigError>(c.asymptotics.profile_center - c.asymptotics.overlap_half_width > 0.0,
                         "asymptotics overlap profile support must stay away from 0");
    require<ConfigError>(c.estimates.trials >= 1, "estimates.trials must be positive");
    require<ConfigError>(c.estimates.n_modes >= 1 && c.estimates.n_max >= 1, "estimates model too small");
}

/// Parses TOML text on top of the defaults. `origin` prefixes error messages.
inline ExperimentConfig parse_config_text(std::string_view text, const std::string& origin = "config") {
    ExperimentConfig cfg;
    try {
        const toml::table root = toml::parse(text, origin);
        detail::apply_table(cfg, root);
    } catch (const toml::parse_error& e) {
        throw ConfigError(origin + ": line " + std::to_string(e.source().begin.line) + ": " +
                          std::string(e.description()));
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        validate(cfg);
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

/// Applies one `key=value` override. Bare keys address [model]; dotted keys
/// address `section.key`. The value uses TOML syntax (lists as [a, b]).
inline void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    std::string key = assignment.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::string value = assignment.substr(eq + 1);
    if (key.find('.') == std::string::npos) key = "model." + key;
    const auto it = detail::setters().find(key);
    if (it == detail::setters().end()) throw ConfigError("--set: unknown key '" + key + "'");
    toml::table parsed;
    try {
        parsed = toml::parse("v = " + value);
    } catch (const toml::parse_error&) {
        // Unquoted strings are convenient for grid.rule=refined.
        try {
            parsed = toml::parse("v = \"" + value + "\"");
        } catch (const toml::parse_error& e) {
            throw ConfigError("--set " + key + ": " + std::string(e.description()));
        }
    }
    try {
        it->second(cfg, *parsed.get("v"));
    } catch (const ConfigError& e) {
        throw ConfigError("--set " + key + ": " + e.what());
    }
}

inline void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) apply_override(cfg, a);
    try {
        validate(cfg);
    } catch (const Error& e) {
        throw ConfigError(std::string("after --set: ") + e.what());
    }
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, v] : detail::setters()) out.push_back(k);
    return out;
}

inline json config_json(const ExperimentConfig& c) {
    json j;
    j["model"] = {{"e1", c.model.e1},
                  {"lambda_uv", c.model.lambda_uv},
                  {"mu", c.model.mu},
                  {"g", c.model.g},
                  {"theta_re", c.model.theta.real()},
                  {"theta_im", c.model.theta.imag()},
                  {"k_max", c.model.k_max},
                  {"n_modes", c.model.n_modes},
                  {"n_max", c.model.n_max},
                  {"tail_tol", c.model.tail_tol},
                  {"nu_min", c.model.nu_min}};
    j["grid"] = {{"rule", c.grid.rule},
                 {"refine_center", c.grid.refine_center},
                 {"refine_half_width", c.grid.refine_half_width},
                 {"refine_fraction", c.grid.refine_fraction}};
    const auto& r = c.resonance;
    j["resonance"] = {{"g_list", r.g_list},       {"fgr_tol", r.fgr_tol},     {"theta_im_list", r.theta_im_list},
                      {"scan_n_modes", r.scan_n_modes}, {"scan_g", r.scan_g}, {"theta_tol", r.theta_tol},
                      {"riesz_points", r.riesz_points}, {"riesz_tol", r.riesz_tol}};
    const auto& m = c.multiscale;
    j["multiscale"] = {{"g", m.g},
                       {"rho0", m.rho0},
                       {"rho", m.rho},
                       {"depth", m.depth},
                       {"margin", m.margin},
                       {"g_low", m.g_low},
                       {"ratio_depth", m.ratio_depth},
                       {"ratio_target", m.ratio_target},
                       {"ratio_tol", m.ratio_tol}};
    const auto& s = c.scatter;
    j["scatter"] = {{"g_list", s.g_list},   {"n_modes", s.n_modes}, {"n_max", s.n_max},
                    {"bump_half_width", s.bump_half_width}, {"dev_g", s.dev_g}, {"dev_tol", s.dev_tol},
                    {"band", s.band},       {"form_tol", s.form_tol}};
    const auto& l = c.lineshape;
    j["lineshape"] = {{"g", l.g}, {"span", l.span}, {"points", l.points}, {"center_tol", l.center_tol},
                      {"width_tol", l.width_tol}};
    const auto& lp = c.laplace;
    j["laplace"] = {{"models", lp.models}, {"max_dim", lp.max_dim}, {"t_list", lp.t_list}, {"g_min", lp.g_min},
                    {"g_max", lp.g_max},   {"nu", lp.nu},           {"tol", lp.tol}};
    const auto& a = c.asymptotics;
    j["asymptotics"] = {{"g", a.g},
                        {"identity_n_modes", a.identity_n_modes},
                        {"identity_n_max", a.identity_n_max},
                        {"identity_t", a.identity_t},
                        {"identity_tol", a.identity_tol},
                        {"identity_half_width", a.identity_half_width},
                        {"interior_n_modes", a.interior_n_modes},
                        {"interior_t_list", a.interior_t_list},
                        {"interior_s", a.interior_s},
                        {"interior_tol", a.interior_tol},
                        {"vanishing_n_modes", a.vanishing_n_modes},
                        {"vanishing_t_list", a.vanishing_t_list},
                        {"vanishing_ratio", a.vanishing_ratio},
                        {"profile_center", a.profile_center},
                        {"profile_half_width", a.profile_half_width},
                        {"overlap_half_width", a.overlap_half_width},
                        {"overlap_s_min", a.overlap_s_min},
                        {"overlap_s_max", a.overlap_s_max},
                        {"overlap_max_exponent", a.overlap_max_exponent}};
    j["estimates"] = {{"trials", c.estimates.trials},
                      {"n_modes", c.estimates.n_modes},
                      {"n_max", c.estimates.n_max},
                      {"tol", c.estimates.tol}};
    j["output"] = {{"seed", c.output.seed}, {"cache", c.output.cache}};
    return j;
}

}  // namespace sbscatter
