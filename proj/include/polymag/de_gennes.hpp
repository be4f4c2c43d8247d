#pragma once

#include "polymag/eigensolve.hpp"

namespace polymag {

/// Half-line grid for the fiber operator -d^2/dz^2 + (tau+z)^2, Neumann at 0,
/// Dirichlet at the truncation z_max.
struct DeGennesCfg {
    double z_max = 18.0;
    double step = 2e-3;
};

namespace detail {
inline void de_gennes_tridiag(double tau, const DeGennesCfg& cfg, std::vector<double>& diag,
                              std::vector<double>& off) {
    require(cfg.z_max >= 15.0, "de_gennes: truncation z_max must be >= 15");
    require(cfg.step <= 5e-3, "de_gennes: step must be <= 5e-3");
    const int n = int(std::round(cfg.z_max / cfg.step));
    const double s = cfg.step;
    const double inv2 = 1.0 / (s * s);
    diag.assign(n, 0.0);
    off.assign(n - 1, -inv2);
    for (int i = 0; i < n; ++i) {
        double z = (i + 0.5) * s;
        double links = ((i > 0 ? 1.0 : 0.0) + (i < n - 1 ? 1.0 : 0.0)) * inv2;
        if (i == n - 1) links += inv2;  // Dirichlet cut at z_max; Neumann at 0 adds nothing
        diag[i] = links + (tau + z) * (tau + z);
    }
}
} // namespace detail

/// First eigenvalue mu(tau) of the de Gennes fiber operator.
inline double de_gennes_mu(double tau, const DeGennesCfg& cfg = {}) {
    std::vector<double> diag, off;
    detail::de_gennes_tridiag(tau, cfg, diag, off);
    return tridiagonal_smallest(diag, off);
}

struct DeGennesResult {
    double theta0 = 0;
    double tau_star = 0;
    std::vector<double> z;        // node coordinates
    std::vector<double> profile;  // normalized ground profile Phi
    double tail_coeff = 0;        // c in Phi ~ exp(-c z) past the grid
    DeGennesCfg cfg;
};

/// Minimize mu over tau in [-2,0] by golden section to |dtau| <= 1e-6.
inline DeGennesResult compute_theta0(const DeGennesCfg& cfg = {}) {
    // unimodality guard: reject if the bracket does not enclose a minimum
    double m_lo = de_gennes_mu(-2.0, cfg), m_mid = de_gennes_mu(-0.8, cfg),
           m_hi = de_gennes_mu(0.0, cfg);
    if (!(m_mid < m_lo && m_mid < m_hi))
        throw precondition_error("compute_theta0: mu not unimodal on [-2,0]");

    DeGennesResult out;
    out.cfg = cfg;
    out.tau_star =
        golden_minimize([&](double t) { return de_gennes_mu(t, cfg); }, -2.0, 0.0, 1e-6);
    out.theta0 = de_gennes_mu(out.tau_star, cfg);

    std::vector<double> diag, off;
    detail::de_gennes_tridiag(out.tau_star, cfg, diag, off);
    Eigen::VectorXd v = tridiagonal_eigenvector(diag, off, out.theta0);
    const int n = int(diag.size());
    if (v[0] < 0) v = -v;
    double nrm = std::sqrt(v.squaredNorm() * cfg.step);
    out.z.resize(n);
    out.profile.resize(n);
    for (int i = 0; i < n; ++i) {
        out.z[i] = (i + 0.5) * cfg.step;
        out.profile[i] = v[i] / nrm;
    }
    // exponential tail slope fitted on the last decade of usable magnitude
    int i1 = n - 1;
    while (i1 > 0 && std::abs(out.profile[i1]) < 1e-280) --i1;
    int i0 = std::max(0, i1 - int(2.0 / cfg.step));
    if (out.profile[i0] > 0 && out.profile[i1] > 0 && i1 > i0)
        out.tail_coeff = -(std::log(out.profile[i1]) - std::log(out.profile[i0])) /
                         (out.z[i1] - out.z[i0]);
    return out;
}

} // namespace polymag
