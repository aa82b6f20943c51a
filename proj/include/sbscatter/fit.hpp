// fit.hpp: least-squares line, log-log exponent and Lorentzian fits

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbscatter/errors.hpp"

namespace sbscatter {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw FitError("fit_line: size mismatch");
    if (x.size() < 2) throw FitError("fit_line: at least two points required");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw FitError("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    f.points = x.size();
    return f;
}

/// Slope of log y against log x over points with y > floor; needs min_points.
inline LineFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y, double floor = 1e-12,
                            std::size_t min_points = 3) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (y[i] > floor && x[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < min_points)
        throw FitError("fit_exponent: " + std::to_string(lx.size()) + " usable points, need " +
                       std::to_string(min_points));
    return fit_line(lx, ly);
}

struct LorentzianFit {
    double center = 0.0;
    double half_width = 0.0;  // w in A / ((x − x₀)² + w²)
    double amplitude = 0.0;
    double fwhm() const { return 2.0 * half_width; }
};

/// Fits y = A / ((x − x₀)² + w²) by linear least squares on 1/y = a x² + b x + c,
/// weighting each equation by y² so that the peak dominates.
inline LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw FitError("fit_lorentzian: need at least three samples");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yi = y[static_cast<std::size_t>(i)], xi = x[static_cast<std::size_t>(i)];
        if (!(yi > 0.0)) throw FitError("fit_lorentzian: samples must be positive");
        const double w = yi * yi;
        a(i, 0) = w * xi * xi;
        a(i, 1) = w * xi;
        a(i, 2) = w;
        b[i] = w / yi;
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    if (!(c[0] > 0.0)) throw FitError("fit_lorentzian: data is not peaked");
    LorentzianFit f;
    f.center = -c[1] / (2.0 * c[0]);
    const double w2 = c[2] / c[0] - f.center * f.center;
    if (!(w2 > 0.0)) throw FitError("fit_lorentzian: non-positive width");
    f.half_width = std::sqrt(w2);
    f.amplitude = 1.0 / c[0];
    return f;
}

}  // namespace sbscatter
