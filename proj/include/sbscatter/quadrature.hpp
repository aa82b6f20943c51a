// quadrature.hpp: Gauss–Legendre rules and adaptive Gauss–Kronrod integration
//
// The adaptive integrator is templated on the integrand's value type so the
// same code handles real, complex and Eigen vector-valued integrands.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sbscatter/errors.hpp"

namespace sbscatter::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

}  // namespace detail

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending.
inline Rule gauss_legendre(std::size_t n) {
    if (n == 0) throw ConfigError("gauss_legendre: n must be positive");
    if (n == 1) return Rule{{0.0}, {2.0}};
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = detail::legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = detail::legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Affine map of a [-1, 1] rule onto [a, b].
inline Rule mapped(const Rule& ref, double a, double b) {
    Rule out;
    out.nodes.reserve(ref.nodes.size());
    out.weights.reserve(ref.nodes.size());
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
        out.nodes.push_back(mid + half * ref.nodes[i]);
        out.weights.push_back(half * ref.weights[i]);
    }
    return out;
}

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.norm();
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK constants).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Panel {
    double a, b;
    T value;
    double error;
};

template <typename T, typename F>
Panel<T> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T kronrod = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        const T sum = f1 + f2;
        kronrod = kronrod + sum * kWgk[j];
        if (j % 2 == 1) gauss = gauss + sum * kWg[j / 2];
    }
    const T diff = (kronrod - gauss) * h;
    return Panel<T>{a, b, T(kronrod * h), magnitude(diff)};
}

}  // namespace detail

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_panels = 20000;
};

template <typename T>
struct Result {
    T value;
    double error = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

/// Adaptive G7–K15 integration of f over [a, b] with optional interior
/// breakpoints. The panel with the largest error estimate is bisected until the
/// summed estimate meets max(abs_tol, rel_tol·|I|).
template <typename F>
auto integrate(F&& f, double a, double b, const std::vector<double>& breakpoints = {},
               const Options& opts = {}) {
    using T = std::decay_t<decltype(f(a))>;
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);

    auto cmp = [](const detail::Panel<T>& l, const detail::Panel<T>& r) { return l.error < r.error; };
    std::priority_queue<detail::Panel<T>, std::vector<detail::Panel<T>>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) heap.push(detail::gk15<T>(f, cuts[i], cuts[i + 1]));

    auto totals = [&heap]() {
        auto copy = heap;
        T sum = copy.top().value;
        double err = copy.top().error;
        copy.pop();
        while (!copy.empty()) {
            sum = sum + copy.top().value;
            err += copy.top().error;
            copy.pop();
        }
        return std::pair<T, double>{sum, err};
    };

    Result<T> out;
    if (heap.empty()) {
        out.value = f(a) * 0.0;
        out.converged = true;
        return out;
    }
    // Running sums are refreshed from the heap periodically to avoid drift.
    auto [sum, err] = totals();
    std::size_t since_refresh = 0;
    while (true) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(sum));
        if (err <= target) {
            out.converged = true;
            break;
        }
        if (heap.size() >= opts.max_panels) break;
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
        heap.pop();
        auto left = detail::gk15<T>(f, worst.a, mid);
        auto right = detail::gk15<T>(f, mid, worst.b);
        sum = sum - worst.value + left.value + right.value;
        err = err - worst.error + left.error + right.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        if (++since_refresh == 256) {
            std::tie(sum, err) = totals();
            since_refresh = 0;
        }
    }
    std::tie(out.value, out.error) = totals();
    out.panels = heap.size();
    return out;
}

}  // namespace sbscatter::quad
