#pragma once

#include "polymag/grid.hpp"
#include "polymag/potential.hpp"

#include <Eigen/SparseCore>
#include <cmath>

namespace polymag {

/// Discrete (-ih grad + A)^2 (+ optional scalar potential) with magnetic
/// Neumann conditions on the physical boundary and Dirichlet on truncation
/// surfaces. Link-variable discretization: edge (i,j) along axis a carries
/// the phase exp(-i s_a A_a(mid)/h), A sampled at the edge midpoint.
struct HermitianOperator {
    Eigen::SparseMatrix<cd> H;     // ordinary eigenproblem, uniform cell weight
    const Grid* grid = nullptr;
    double h = 1.0;
    bool under_resolved = false;   // step >= sqrt(h)/4 on some axis

    std::size_t size() const { return std::size_t(H.rows()); }
};

namespace detail {
inline void add_link(std::vector<Eigen::Triplet<cd>>& t, int i, int j, double w, cd phase) {
    t.emplace_back(i, i, cd(w, 0));
    t.emplace_back(j, j, cd(w, 0));
    t.emplace_back(i, j, -w * phase);
    t.emplace_back(j, i, -w * std::conj(phase));
}
} // namespace detail

inline HermitianOperator assemble_magnetic_laplacian(const Grid& g, const PotentialField& A,
                                                     double h, const ScalarPotential& V = nullptr) {
    require(h > 0, "assemble: h must be positive");
    HermitianOperator op;
    op.grid = &g;
    op.h = h;
    for (int a = 0; a < g.dim; ++a)
        if (g.step[a] >= std::sqrt(h) / 4) op.under_resolved = true;

    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(g.size() * (2 * g.dim + 1));
    const int N = int(g.size());
    for (int c = 0; c < N; ++c) {
        Vec3 x = g.node(c);
        for (int a = 0; a < g.dim; ++a) {
            const double s = g.step[a];
            const double w = (h / s) * (h / s);
            int nb = g.neighbor(c, a, +1);
            if (nb >= 0) {
                Vec3 mid = x;
                mid[a] += 0.5 * s;
                Vec3 Am = A(mid);
                if (!Am.allFinite())
                    throw precondition_error("assemble: non-finite potential at (" +
                                             std::to_string(mid[0]) + "," + std::to_string(mid[1]) +
                                             "," + std::to_string(mid[2]) + ")");
                cd phase = std::exp(cd(0, -s * Am[a] / h));
                detail::add_link(trip, c, nb, w, phase);
            } else {
                // severed on the + side
                if (g.cut_kind(c, a, +1) == NodeTag::dirichlet_boundary)
                    trip.emplace_back(c, c, cd(w, 0));
            }
            if (g.neighbor(c, a, -1) < 0) {
                if (g.cut_kind(c, a, -1) == NodeTag::dirichlet_boundary)
                    trip.emplace_back(c, c, cd(w, 0));
            }
        }
        if (V) {
            double v = V(x);
            require(std::isfinite(v), "assemble: non-finite scalar potential sample");
            trip.emplace_back(c, c, cd(v, 0));
        }
    }
    op.H.resize(N, N);
    op.H.setFromTriplets(trip.begin(), trip.end());
    op.H.makeCompressed();
    return op;
}

/// Discrete q_h[A,O](psi), consistent with the assembly: equals <H psi, psi>
/// in the step-weighted inner product for every psi (not only interior ones).
inline double quadratic_form(const PotentialField& A, double h, const Eigen::VectorXcd& psi,
                             const Grid& g, const ScalarPotential& V = nullptr) {
    require(std::size_t(psi.size()) == g.size(), "quadratic_form: size mismatch");
    require(psi.norm() > 0, "quadratic_form: empty state");
    double q = 0;
    const int N = int(g.size());
    for (int c = 0; c < N; ++c) {
        Vec3 x = g.node(c);
        for (int a = 0; a < g.dim; ++a) {
            const double s = g.step[a];
            const double w = (h / s) * (h / s);
            int nb = g.neighbor(c, a, +1);
            if (nb >= 0) {
                Vec3 mid = x;
                mid[a] += 0.5 * s;
                cd phase = std::exp(cd(0, -s * A(mid)[a] / h));
                q += w * std::norm(psi[c] - phase * psi[nb]);
            } else if (g.cut_kind(c, a, +1) == NodeTag::dirichlet_boundary) {
                q += w * std::norm(psi[c]);
            }
            if (g.neighbor(c, a, -1) < 0 && g.cut_kind(c, a, -1) == NodeTag::dirichlet_boundary)
                q += w * std::norm(psi[c]);
        }
        if (V) q += V(x) * std::norm(psi[c]);
    }
    return q * g.cell_volume();
}

inline double norm_sq(const Eigen::VectorXcd& psi, const Grid& g) {
    return psi.squaredNorm() * g.cell_volume();
}

inline double rayleigh_quotient(const PotentialField& A, double h, const Eigen::VectorXcd& psi,
                                const Grid& g, const ScalarPotential& V = nullptr) {
    return quadratic_form(A, h, psi, g, V) / norm_sq(psi, g);
}

/// Constant 3x3 SPD metric for the change-of-variables form.
struct ConstantMetric {
    Mat3 G;
    explicit ConstantMetric(const Mat3& g) : G(g) {
        require((G - G.transpose()).norm() <= 1e-12 * G.norm(), "metric: not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat3> es(G);
        require(es.eigenvalues().minCoeff() > 0, "metric: not positive definite");
    }
    double det() const { return G.determinant(); }
};

/// Discrete q_h[A,O,G] with weight |G|^{-1/2}. Diagonal terms reuse the link
/// sums; off-diagonal metric entries couple node-averaged covariant
/// differences. Reduces to quadratic_form exactly when G is the identity.
inline double quadratic_form_metric(const PotentialField& A, double h, const Eigen::VectorXcd& psi,
                                    const Grid& g, const ConstantMetric& metric,
                                    const ScalarPotential& V = nullptr) {
    require(std::size_t(psi.size()) == g.size(), "quadratic_form_metric: size mismatch");
    const Mat3& G = metric.G;
    const double wdet = 1.0 / std::sqrt(metric.det());
    double q = 0;
    const int N = int(g.size());

    // diagonal part from links (exact, shares code shape with quadratic_form)
    for (int c = 0; c < N; ++c) {
        Vec3 x = g.node(c);
        for (int a = 0; a < g.dim; ++a) {
            const double s = g.step[a];
            const double w = (h / s) * (h / s) * G(a, a);
            int nb = g.neighbor(c, a, +1);
            if (nb >= 0) {
                Vec3 mid = x; mid[a] += 0.5 * s;
                cd phase = std::exp(cd(0, -s * A(mid)[a] / h));
                q += w * std::norm(psi[c] - phase * psi[nb]);
            } else if (g.cut_kind(c, a, +1) == NodeTag::dirichlet_boundary) {
                q += w * std::norm(psi[c]);
            }
            if (g.neighbor(c, a, -1) < 0 && g.cut_kind(c, a, -1) == NodeTag::dirichlet_boundary)
                q += w * std::norm(psi[c]);
        }
        if (V) q += V(x) * std::norm(psi[c]);
    }

    bool diagonal = true;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b && std::abs(G(a, b)) > 0) diagonal = false;

    if (!diagonal) {
        // node-centered covariant differences d_a psi (averaged one-sided links)
        auto cov_diff = [&](int c, int a) -> cd {
            Vec3 x = g.node(c);
            const double s = g.step[a];
            cd acc(0, 0);
            int cnt = 0;
            int np = g.neighbor(c, a, +1);
            if (np >= 0) {
                Vec3 mid = x; mid[a] += 0.5 * s;
                cd ph = std::exp(cd(0, -s * A(mid)[a] / h));
                acc += (ph * psi[np] - psi[c]) * (h / s);
                ++cnt;
            }
            int nm = g.neighbor(c, a, -1);
            if (nm >= 0) {
                Vec3 mid = x; mid[a] -= 0.5 * s;
                cd ph = std::exp(cd(0, +s * A(mid)[a] / h));
                acc += (psi[c] - ph * psi[nm]) * (h / s);
                ++cnt;
            }
            return cnt ? acc / double(cnt) : cd(0, 0);
        };
        for (int c = 0; c < N; ++c) {
            cd d[3] = {cd(0, 0), cd(0, 0), cd(0, 0)};
            for (int a = 0; a < g.dim; ++a) d[a] = cov_diff(c, a);
            for (int a = 0; a < g.dim; ++a)
                for (int b = 0; b < g.dim; ++b)
                    if (a != b) q += G(a, b) * std::real(d[a] * std::conj(d[b]));
        }
    }
    return q * g.cell_volume() * wdet;
}

/// Coordinate text export (1-based row col re im), for debugging.
inline std::string to_coo_text(const HermitianOperator& op) {
    std::string out;
    out.reserve(op.H.nonZeros() * 48);
    char buf[128];
    for (int k = 0; k < op.H.outerSize(); ++k)
        for (Eigen::SparseMatrix<cd>::InnerIterator it(op.H, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", long(it.row()) + 1,
                          long(it.col()) + 1, it.value().real(), it.value().imag());
            out += buf;
        }
    return out;
}

} // namespace polymag
