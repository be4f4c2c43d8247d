#pragma once

#include "polymag/assemble.hpp"

#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <limits>
#include <random>

namespace polymag {

struct SpectralResult {
    double lambda = 0;
    Eigen::VectorXcd psi;
    double residual = 0;
    int iterations = 0;
};

// ---------------------------------------------------------------------------
// Sturm-sequence bisection for real symmetric tridiagonal matrices.
// ---------------------------------------------------------------------------

/// Number of eigenvalues strictly below x (LDL^T sign count).
inline int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    int count = 0;
    double d = 1.0;
    const double tiny = 1e-300;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
        d = diag[i] - x - b2 / d;
        if (d == 0) d = tiny;
        if (d < 0) ++count;
    }
    return count;
}

/// Smallest eigenvalue to absolute accuracy `abstol` (default 1e-12).
/// Bisection on the Sturm count; always converges.
inline double tridiagonal_smallest(const std::vector<double>& diag, const std::vector<double>& off,
                                   double abstol = 1e-12) {
    require(!diag.empty() && off.size() + 1 == diag.size(), "tridiagonal_smallest: bad sizes");
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i < off.size() ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    while (hi - lo > abstol) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, off, mid) >= 1) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Eigenvector for a converged tridiagonal eigenvalue, by inverse iteration
/// (Thomas solves against (T - lambda)).
inline Eigen::VectorXd tridiagonal_eigenvector(const std::vector<double>& diag,
                                               const std::vector<double>& off, double lambda) {
    const int n = int(diag.size());
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> c(n);
        Eigen::VectorXd d(n), x(n);
        double m0 = diag[0] - lambda;
        if (std::abs(m0) < 1e-14) m0 = 1e-14;
        c[0] = n > 1 ? off[0] / m0 : 0;
        d[0] = v[0] / m0;
        for (int i = 1; i < n; ++i) {
            double m = diag[i] - lambda - off[i - 1] * c[i - 1];
            if (std::abs(m) < 1e-14) m = 1e-14;
            c[i] = i < n - 1 ? off[i] / m : 0;
            d[i] = (v[i] - off[i - 1] * d[i - 1]) / m;
        }
        x[n - 1] = d[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
        v = x / x.norm();
    }
    return v;
}

// ---------------------------------------------------------------------------
// General sparse Hermitian smallest eigenpair.
// ---------------------------------------------------------------------------

struct EigOptions {
    int max_iterations = 4000;
    int block = 3;             // LOBPCG block size
    enum class Method { automatic, shift_invert, lobpcg } method = Method::automatic;
    const Eigen::MatrixXcd* initial = nullptr;  // warm-start block (columns)
    // Shift for the shift-invert path. NaN = automatic (slightly below 0).
    // A shift just below the target eigenvalue separates near-threshold
    // states that plain inverse iteration cannot.
    double shift = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

template <class S>
double real_part(S v) { if constexpr (std::is_same_v<S, cd>) return v.real(); else return v; }

/// Lanczos with full reorthogonalization on (H - sigma)^{-1}, sigma slightly
/// below the spectrum (or caller-provided). Robust wherever a sparse LDLT is
/// affordable (1D/2D meshes).
template <class Scalar>
SpectralResult shift_invert_lanczos(const Eigen::SparseMatrix<Scalar>& H, double tol,
                                    double shift, int max_basis) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const int n = int(H.rows());
    double sigma = shift;
    if (std::isnan(sigma)) {
        double dmax = 1.0;
        for (int k = 0; k < H.outerSize(); ++k)
            for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(H, k); it; ++it)
                if (it.row() == it.col()) dmax = std::max(dmax, std::abs(real_part(it.value())));
        sigma = -1e-3 * dmax;
    }

    Eigen::SparseMatrix<Scalar> shifted = H;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= Scalar(sigma);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>, Eigen::Lower> ldlt;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success)
        throw convergence_error("shift-invert: LDLT factorization failed", 1.0);

    const int m_max = std::min(n, max_basis);
    Mat V(n, m_max);
    std::vector<double> alpha, beta;

    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<Scalar, cd>) v[i] = cd(nd(rng), nd(rng));
        else v[i] = nd(rng);
    }
    v.normalize();

    SpectralResult best;
    double best_res = 1e300;
    Vec best_x;
    for (int j = 0; j < m_max; ++j) {
        V.col(j) = v;
        Vec w = ldlt.solve(v);
        alpha.push_back(real_part(Scalar(v.dot(w))));
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w).eval();
        double b = w.norm();

        if (j >= 1) {
            const int m = j + 1;
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
            for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            // largest |theta| targets the eigenvalue closest to the shift
            int imax =
                std::abs(es.eigenvalues()[m - 1]) >= std::abs(es.eigenvalues()[0]) ? m - 1 : 0;
            double theta = es.eigenvalues()[imax];
            if (theta != 0) {
                Vec x = V.leftCols(m) * es.eigenvectors().col(imax).cast<Scalar>();
                x.normalize();
                double lambda = sigma + 1.0 / theta;
                double res = (H * x - Scalar(lambda) * x).norm();
                if (res < best_res) {
                    best_res = res;
                    best.lambda = lambda;
                    best_x = x;
                    best.iterations = m;
                }
                if (res <= tol) break;
            }
        }
        if (b < 1e-14) break;
        beta.push_back(b);
        v = w / b;
    }
    if (best_x.size() && best_res <= tol) {
        best.residual = best_res;
        best.psi = best_x.template cast<cd>();
        return best;
    }
    throw convergence_error("shift-invert Lanczos did not reach tolerance", best_res);
}

/// Block LOBPCG with Jacobi preconditioner, for 3D grids where a direct
/// factorization does not fit. Converges on the first Ritz pair.
template <class Scalar>
SpectralResult lobpcg(const Eigen::SparseMatrix<Scalar>& H, double tol, int maxit, int block,
                      const Eigen::MatrixXcd* initial) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const int n = int(H.rows());
    const int m = std::min(block, n);
    Vec dinv = Vec::Ones(n);
    for (int k = 0; k < H.outerSize(); ++k)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(H, k); it; ++it)
            if (it.row() == it.col())
                dinv[it.row()] = Scalar(1.0 / std::max(1e-12, real_part(it.value())));

    std::mt19937_64 rng(777);
    std::normal_distribution<double> nd;
    Mat X(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            if constexpr (std::is_same_v<Scalar, cd>) X(i, j) = cd(nd(rng), nd(rng));
            else X(i, j) = nd(rng);
        }
    if (initial && initial->rows() == n && initial->cols() > 0) {
        int c = std::min<int>(m, int(initial->cols()));
        if constexpr (std::is_same_v<Scalar, cd>) X.leftCols(c) = initial->leftCols(c);
        else X.leftCols(c) = initial->leftCols(c).real();
    }

    auto orthonormalize = [&](Mat& M) {
        if (M.cols() == 0) return;
        Eigen::HouseholderQR<Mat> qr(M);
        M = qr.householderQ() * Mat::Identity(M.rows(), M.cols());
    };
    orthonormalize(X);

    Mat P(n, 0);
    SpectralResult best;
    Vec best_x;
    double best_res = 1e300;

    for (int it = 0; it < maxit; ++it) {
        Mat HX = H * X;
        Eigen::VectorXd lam(m);
        for (int j = 0; j < m; ++j) lam[j] = real_part(Scalar(X.col(j).dot(HX.col(j))));
        Mat R = HX;
        for (int j = 0; j < m; ++j) R.col(j) -= Scalar(lam[j]) * X.col(j);
        double res0 = R.col(0).norm();
        if (res0 < best_res) {
            best_res = res0;
            best.lambda = lam[0];
            best_x = X.col(0);
            best.iterations = it;
        }
        if (res0 <= tol) break;
        Mat W = dinv.asDiagonal() * R;

        Mat S(n, X.cols() + W.cols() + P.cols());
        S << X, W, P;
        Eigen::ColPivHouseholderQR<Mat> qr(S);
        int rank = 0;
        {
            double t0 = std::abs(qr.matrixR()(0, 0));
            for (int j = 0; j < S.cols(); ++j)
                if (std::abs(qr.matrixR()(j, j)) > 1e-12 * t0) rank = j + 1;
        }
        Mat Q = qr.householderQ() * Mat::Identity(n, rank);

        Mat HQ = H * Q;
        Mat A = Q.adjoint() * HQ;
        A = Scalar(0.5) * (A + A.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(A);
        int take = std::min<int>(m, rank);
        Mat Xnew = Q * es.eigenvectors().leftCols(take);
        Mat Pnew = Xnew - X * (X.adjoint() * Xnew);
        X = Xnew;
        orthonormalize(X);
        P = Pnew;
        orthonormalize(P);
    }
    if (best_res <= tol) {
        best.residual = best_res;
        best.psi = best_x.template cast<cd>();
        return best;
    }
    throw convergence_error("LOBPCG did not reach tolerance", best_res);
}

inline bool is_real_matrix(const Eigen::SparseMatrix<cd>& H) {
    for (int k = 0; k < H.outerSize(); ++k)
        for (Eigen::SparseMatrix<cd>::InnerIterator it(H, k); it; ++it)
            if (it.value().imag() != 0.0) return false;
    return true;
}

} // namespace detail

/// Smallest eigenpair of an assembled Hermitian operator. Shift-invert
/// Lanczos backed by sparse LDLT for 1D/2D sizes, LOBPCG for large 3D.
/// Real-valued operators (no magnetic phases) are solved in real
/// arithmetic. Throws convergence_error (with best residual) on failure.
inline SpectralResult smallest_eigenpair(const HermitianOperator& op, double tol = 1e-8,
                                         EigOptions opts = {}) {
    require(op.size() >= 1, "smallest_eigenpair: empty operator");
    using M = EigOptions::Method;
    M method = opts.method;
    if (method == M::automatic) {
        bool big3d = op.grid && op.grid->dim == 3 && op.size() > 40000;
        bool huge = op.size() > 400000;
        method = (big3d || huge) ? M::lobpcg : M::shift_invert;
    }
    const bool real = detail::is_real_matrix(op.H);
    const int max_basis = std::isnan(opts.shift) ? 160 : 70;

    SpectralResult r;
    auto run = [&](auto scalar_tag) {
        using S = decltype(scalar_tag);
        Eigen::SparseMatrix<S> Hs;
        if constexpr (std::is_same_v<S, cd>) Hs = op.H;
        else Hs = op.H.real();
        if (method == M::shift_invert) {
            try {
                return detail::shift_invert_lanczos<S>(Hs, tol, opts.shift, max_basis);
            } catch (const convergence_error&) {
                return detail::lobpcg<S>(Hs, tol, opts.max_iterations, opts.block, opts.initial);
            }
        }
        return detail::lobpcg<S>(Hs, tol, opts.max_iterations, opts.block, opts.initial);
    };
    r = real ? run(double{}) : run(cd{});

    if (op.grid) {
        double nn = std::sqrt(norm_sq(r.psi, *op.grid));
        r.psi /= nn;
    } else {
        r.psi.normalize();
    }
    return r;
}

/// Real-symmetric doubling [[Re, -Im], [Im, Re]]; same spectrum with
/// doubled multiplicity.
inline Eigen::SparseMatrix<double> real_doubling(const Eigen::SparseMatrix<cd>& H) {
    const int n = int(H.rows());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(std::size_t(H.nonZeros()) * 4);
    for (int k = 0; k < H.outerSize(); ++k)
        for (Eigen::SparseMatrix<cd>::InnerIterator it(H, k); it; ++it) {
            double re = it.value().real(), im = it.value().imag();
            int i = int(it.row()), j = int(it.col());
            if (re != 0) {
                t.emplace_back(i, j, re);
                t.emplace_back(i + n, j + n, re);
            }
            if (im != 0) {
                t.emplace_back(i, j + n, -im);
                t.emplace_back(i + n, j, im);
            }
        }
    Eigen::SparseMatrix<double> D(2 * n, 2 * n);
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

/// Smallest eigenvalue via the doubled representation (the route a
/// real-only backend would take).
inline double smallest_eigenvalue_doubled(const HermitianOperator& op, double tol = 1e-8) {
    HermitianOperator wrap;
    wrap.H = real_doubling(op.H).cast<cd>();
    wrap.h = op.h;
    return smallest_eigenpair(wrap, tol).lambda;
}

} // namespace polymag
