// linalg.hpp: dense eigensolvers (LAPACK) and small norm helpers

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "sbscatter/errors.hpp"
#include "sbscatter/model.hpp"

namespace sbscatter {

struct EigenDecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // unit-norm right eigenvectors as columns; empty if not requested
    bool hermitian = false;

    Index size() const { return values.size(); }
};

inline bool is_hermitian(const Eigen::MatrixXcd& a, double rel_tol = 1e-13) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline bool is_complex_symmetric(const Eigen::MatrixXcd& a, double rel_tol = 1e-13) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

namespace detail {

inline std::string condition_diagnostics(const Eigen::MatrixXcd& a) {
    std::ostringstream os;
    os << "dim=" << a.rows() << " max|a_ij|=" << a.cwiseAbs().maxCoeff()
       << " finite=" << (a.allFinite() ? "yes" : "no");
    return os.str();
}

inline double eigen_residual(const Eigen::MatrixXcd& a, const EigenDecomposition& e) {
    return (a * e.vectors - e.vectors * e.values.asDiagonal()).norm();
}

inline bool residual_ok(const Eigen::MatrixXcd& a, const EigenDecomposition& e) {
    const double scale = std::max(1.0, a.norm());
    return eigen_residual(a, e) <= 1e-10 * scale * std::sqrt(static_cast<double>(a.rows()) + 1.0);
}

}  // namespace detail

/// Hermitian eigendecomposition (zheevr), eigenvalues ascending. With vectors
/// requested the residual is checked and Eigen's solver takes over when the
/// LAPACK result is inaccurate (seen with some auto-selected BLAS kernels).
inline EigenDecomposition eigensolve_hermitian(const Eigen::MatrixXcd& a, bool want_vectors = true) {
    if (a.rows() != a.cols()) throw SolverError("eigensolve: matrix is not square");
    const auto n = static_cast<lapack_int>(a.rows());
    EigenDecomposition out;
    out.hermitian = true;
    if (n == 0) return out;
    Eigen::MatrixXcd work = a;
    Eigen::MatrixXcd z(n, want_vectors ? n : 1);
    Eigen::VectorXd w(n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'U', n, reinterpret_cast<lapack_complex_double*>(work.data()),
        n, 0.0, 0.0, 0, 0, 0.0, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()),
        want_vectors ? n : 1, support.data());
    if (info == 0 && found == n) {
        out.values = w.cast<cplx>();
        if (!want_vectors) return out;
        out.vectors = std::move(z);
        if (detail::residual_ok(a, out)) return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, want_vectors ? Eigen::ComputeEigenvectors
                                                                       : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw SolverError("Hermitian eigensolver failed (info=" + std::to_string(info) +
                          "): " + detail::condition_diagnostics(a));
    out.values = es.eigenvalues().cast<cplx>();
    if (want_vectors) out.vectors = es.eigenvectors();
    return out;
}

/// General dense complex eigendecomposition (zgeev); Hermitian input is routed
/// to the Hermitian solver. Right eigenvectors are normalized to unit 2-norm.
inline EigenDecomposition eigensolve(const Eigen::MatrixXcd& a, bool want_vectors = true) {
    if (a.rows() != a.cols()) throw SolverError("eigensolve: matrix is not square");
    if (!a.allFinite()) throw SolverError("eigensolve: non-finite entries: " + detail::condition_diagnostics(a));
    if (is_hermitian(a)) return eigensolve_hermitian(a, want_vectors);
    const auto n = static_cast<lapack_int>(a.rows());
    EigenDecomposition out;
    if (n == 0) return out;
    Eigen::MatrixXcd work = a;
    out.values.resize(n);
    if (want_vectors) out.vectors.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
        reinterpret_cast<lapack_complex_double*>(out.values.data()), nullptr, 1,
        want_vectors ? reinterpret_cast<lapack_complex_double*>(out.vectors.data()) : nullptr, want_vectors ? n : 1);
    if (info == 0 && !want_vectors) return out;
    if (info == 0) {
        for (Index c = 0; c < n; ++c) out.vectors.col(c).normalize();
        if (detail::residual_ok(a, out)) return out;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, true);
    if (es.info() != Eigen::Success)
        throw SolverError("zgeev did not converge (info=" + std::to_string(info) + "): " +
                          detail::condition_diagnostics(a));
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    for (Index c = 0; c < n; ++c) out.vectors.col(c).normalize();
    return out;
}

inline EigenDecomposition eigensolve(const OperatorMatrix& op, bool want_vectors = true) {
    return eigensolve(op.entries, want_vectors);
}

/// Smallest singular value via the Hermitian eigenproblem of AᴴA-free route:
/// uses JacobiSVD-free BDCSVD on A.
inline double smallest_singular_value(const Eigen::MatrixXcd& a) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues().minCoeff();
}

inline double spectral_norm(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues().maxCoeff();
}

/// Spectral norm of Σ_i u_i v_iᴴ for column blocks U, V (rank ≤ #columns):
/// ‖U Vᴴ‖² = λ_max((UᴴU)(VᴴV)).
inline double low_rank_norm(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
    const Eigen::MatrixXcd gu = u.adjoint() * u;
    const Eigen::MatrixXcd gv = v.adjoint() * v;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gu * gv, false);
    double lmax = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) lmax = std::max(lmax, es.eigenvalues()[i].real());
    return std::sqrt(std::max(lmax, 0.0));
}

}  // namespace sbscatter
