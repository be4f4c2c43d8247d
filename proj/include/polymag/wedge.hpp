#pragma once

#include "polymag/models.hpp"

namespace polymag {

/// Wedge W_alpha = R x S_alpha in its model frame: x1 along the edge,
/// x2 the interior bisector of the sector, x3 = x1 ^ x2. The sector is
/// {|atan2(x3, x2)| < alpha/2} for every opening in (0, 2pi).
struct WedgeModel {
    double alpha = pi / 2;
    Vec3 b = Vec3(1, 0, 0);  // unit field in the wedge frame

    WedgeModel() = default;
    WedgeModel(double alpha_, const Vec3& field) : alpha(alpha_), b(field.normalized()) {
        // alpha = pi is admitted as the half-space W_pi := R^3_+ (used by
        // consistency checks); the excluded openings are 0 and 2pi.
        require(alpha > 1e-9 && alpha < 2 * pi - 1e-9,
                "WedgeModel: opening must lie in (0, 2pi)");
        require(field.norm() > 0, "WedgeModel: vanishing field");
    }

    Vec3 face_normal(int sign) const {  // outward; sign = +1 / -1
        double a2 = alpha / 2;
        return Vec3(0, -std::sin(a2), sign > 0 ? std::cos(a2) : -std::cos(a2));
    }
    double theta_plus() const { return angle_to_plane(b, face_normal(+1)); }
    double theta_minus() const { return angle_to_plane(b, face_normal(-1)); }

    bool inside_sector(double x2, double x3) const {
        return std::abs(std::atan2(x3, x2)) < alpha / 2;
    }
};

struct SectorCfg {
    double radius = 16.0;
    double step = 0.10;
};

struct WedgeCfg {
    SectorCfg scan{9.0, 0.30};
    SectorCfg mid{12.0, 0.16};
    SectorCfg fine{16.0, 0.10};
    bool richardson = true;      // pair solve at tau*, extrapolated in step
    double tau_max = 6.0;
    double tau_step = 0.05;
    double margin = 1e-3;        // dichotomy margin |E - E*|
    double tol = 1e-8;
    int workers = 0;
};

namespace detail {

/// The solves run in an internal frame rotated by alpha/2 about the edge,
/// which puts the "-" face on the +x2 axis (both faces axis-aligned when
/// alpha = pi/2, eliminating the staircase boundary there). Rotation about
/// the edge maps the model operator onto the same formulas with rotated
/// field components.
inline Mat3 sector_internal_rotation(double alpha) {
    double c = std::cos(alpha / 2), s = std::sin(alpha / 2);
    Mat3 R;
    R << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return R;
}

inline Grid sector_grid(double alpha, const SectorCfg& cfg) {
    const double R = cfg.radius, pad = 2 * cfg.step;
    double x2lo = alpha <= pi / 2 + 1e-12 ? -pad : (alpha < pi ? R * std::cos(alpha) - pad : -R);
    double x3lo = alpha <= pi + 1e-12 ? -pad : -R;
    double x3hi = alpha >= pi / 2 - 1e-12 ? R : R * std::sin(alpha) + pad;
    return Grid::build(
        2, Vec3(x2lo, x3lo, 0), Vec3(R, x3hi, 0), Vec3(cfg.step, cfg.step, 1),
        [alpha](const Vec3& x) {
            double phi = std::atan2(x[1], x[0]);
            return phi > 0 && phi < alpha;
        },
        [R](const Vec3& x) { return x.head<2>().norm() < R; });
}

/// Fiber operator at Fourier parameter tau in the internal frame:
/// (tau + b2' x3 - b3' x2)^2 + D2^2 + (D3 + b1 x2)^2 on {0 < phi < alpha}.
inline HermitianOperator sector_fiber_operator(const WedgeModel& m, double tau,
                                               const SectorCfg& cfg, Grid& grid_out) {
    grid_out = sector_grid(m.alpha, cfg);
    Vec3 bi = sector_internal_rotation(m.alpha) * m.b;
    Mat3 g = Mat3::Zero();
    g(1, 0) = bi[0];  // vector potential (0, b1 * x2, 0) on grid axes (x2, x3)
    PotentialField A = PotentialField::linear(g);
    double b2 = bi[1], b3 = bi[2];
    ScalarPotential V = [tau, b2, b3](const Vec3& x) {
        double u = tau + b2 * x[1] - b3 * x[0];
        return u * u;
    };
    return assemble_magnetic_laplacian(grid_out, A, 1.0, V);
}

inline double sector_fiber_value(const WedgeModel& m, double tau, const SectorCfg& cfg,
                                 double tol, double shift = std::numeric_limits<double>::quiet_NaN()) {
    Grid g;
    HermitianOperator op = sector_fiber_operator(m, tau, cfg, g);
    EigOptions eo;
    eo.shift = shift;
    return smallest_eigenpair(op, tol, eo).lambda;
}

/// Step-ladder extrapolation of the fiber value at fixed tau. Staircase
/// Neumann faces drop the scheme to first order for generic openings, so
/// this uses an Aitken limit over {2s, sqrt(2) s, s}, exact for a single
/// geometric error term of any order.
inline double sector_fiber_extrapolated(const WedgeModel& m, double tau, const SectorCfg& cfg,
                                        double tol,
                                        double shift = std::numeric_limits<double>::quiet_NaN()) {
    SectorCfg c0 = cfg, c1 = cfg;
    c0.step = cfg.step * 2.0;
    c1.step = cfg.step * std::sqrt(2.0);
    double x0 = sector_fiber_value(m, tau, c0, tol, shift);
    double x1 = sector_fiber_value(m, tau, c1, tol, std::isnan(shift) ? x0 - 0.05 : shift);
    double x2 = sector_fiber_value(m, tau, cfg, tol, std::isnan(shift) ? x1 - 0.03 : shift);
    return aitken_limit(x0, x1, x2);
}

} // namespace detail

/// Smallest eigenvalue of the fiber operator at tau (unit field).
inline double sector_fiber_energy(const WedgeModel& m, double tau, const SectorCfg& cfg = {},
                                  double tol = 1e-8) {
    require(cfg.radius > 0 && cfg.step > 0, "sector_fiber_energy: bad grid config");
    return detail::sector_fiber_value(m, tau, cfg, tol);
}

struct BandFunction {
    std::vector<double> taus, values;
    int argmin = 0;
    double min_value = 0;
};

struct WedgeEnergy {
    double E = 0;
    double Estar = 0;
    Dichotomy tag = Dichotomy::bound_state;
    double tau_star = 0;
    BandFunction band;
    GeneralizedEigenvector vec;  // row (2,2), when tag == bound_state and requested
    bool has_vec = false;
    double theta_plus = 0, theta_minus = 0;
    int chain_face = 0;  // +1 / -1 when tag == chain
};

/// E*(B, W_alpha) = sigma(min(theta+, theta-)) through the curve interpolant.
inline double wedge_estar(const WedgeModel& m, const SigmaCurve& curve) {
    return curve(std::min(m.theta_plus(), m.theta_minus()));
}

/// Ground energy of the wedge by minimizing the band function: coarse tau
/// scan, golden-section refinement on the mid grid, final fine (optionally
/// Richardson-extrapolated) solves. Unit field; scaling is the caller's.
inline WedgeEnergy wedge_energy(const WedgeModel& m, const SigmaCurve& curve,
                                const WedgeCfg& cfg = {}, bool want_eigenvector = false) {
    WedgeEnergy out;
    out.theta_plus = m.theta_plus();
    out.theta_minus = m.theta_minus();
    out.Estar = wedge_estar(m, curve);

    const int n = int(std::round(2 * cfg.tau_max / cfg.tau_step)) + 1;
    out.band.taus.resize(n);
    out.band.values.resize(n);
    for (int i = 0; i < n; ++i) out.band.taus[i] = -cfg.tau_max + i * cfg.tau_step;
    int workers = cfg.workers > 0 ? cfg.workers : default_workers();
    parallel_for(n, workers, [&](std::size_t i) {
        out.band.values[i] = detail::sector_fiber_value(m, out.band.taus[i], cfg.scan, cfg.tol);
    });
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (out.band.values[i] < out.band.values[i0]) i0 = i;
    out.band.argmin = i0;
    out.band.min_value = out.band.values[i0];

    const bool at_edge = (i0 == 0 || i0 == n - 1);
    if (at_edge) {
        // the band approaches its limit sigma(theta_min) as tau -> +-inf;
        // an edge-attained scan minimum near E* is the case (ii) signature
        if (out.band.min_value >= out.Estar - 10 * cfg.margin) {
            out.E = out.Estar;
            out.tag = Dichotomy::chain;
            out.chain_face = out.theta_plus <= out.theta_minus ? +1 : -1;
            return out;
        }
        throw precondition_error("wedge_energy: tau bracket too small");
    }

    // golden refinement on the mid grid
    double lo = out.band.taus[std::max(0, i0 - 2)], hi = out.band.taus[std::min(n - 1, i0 + 2)];
    double mid_min = 0;
    double tau_mid = golden_minimize(
        [&](double t) { return detail::sector_fiber_value(m, t, cfg.mid, cfg.tol); }, lo, hi,
        1e-4, &mid_min);

    // parabolic touch-up of tau* on the fine grid
    double dtau = 0.02;
    double f0 = detail::sector_fiber_value(m, tau_mid - dtau, cfg.fine, cfg.tol, mid_min - 0.05);
    double f1 = detail::sector_fiber_value(m, tau_mid, cfg.fine, cfg.tol, mid_min - 0.05);
    double f2 = detail::sector_fiber_value(m, tau_mid + dtau, cfg.fine, cfg.tol, mid_min - 0.05);
    double denom = f0 - 2 * f1 + f2;
    double shift_tau = denom > 0 ? 0.5 * dtau * (f0 - f2) / denom : 0.0;
    shift_tau = std::clamp(shift_tau, -dtau, dtau);
    out.tau_star = tau_mid + shift_tau;

    double Ef = cfg.richardson
                    ? detail::sector_fiber_extrapolated(m, out.tau_star, cfg.fine, cfg.tol)
                    : detail::sector_fiber_value(m, out.tau_star, cfg.fine, cfg.tol, f1 - 0.05);
    out.E = std::min(Ef, out.Estar);

    if (Ef < out.Estar - cfg.margin) {
        out.tag = Dichotomy::bound_state;
        if (want_eigenvector) {
            // decay-sized sector grid so the tail certificate can pass
            double kappa = std::sqrt(std::max(1e-3, out.Estar - Ef));
            SectorCfg prof = cfg.fine;
            prof.radius = std::min(140.0, 22.0 / kappa + 8.0);
            prof.step = std::max(cfg.fine.step, prof.radius / 480.0);
            Grid g;
            HermitianOperator op = detail::sector_fiber_operator(m, out.tau_star, prof, g);
            EigOptions eo;
            eo.shift = Ef - 0.02;
            SpectralResult r = smallest_eigenpair(op, cfg.tol, eo);
            GeneralizedEigenvector& v = out.vec;
            Mat3 Ri = detail::sector_internal_rotation(m.alpha);
            Vec3 bi = Ri * m.b;
            v.k = 2;
            v.lambda = r.lambda;
            v.R = Ri;  // profile grid lives in the internal (rotated) frame
            v.theta_lin = Vec3(out.tau_star, 0, 0);
            Mat3 rg = Mat3::Zero();  // A = (b2' z2 - b3' z1, 0, b1 z1) internally
            rg(0, 1) = -bi[2];
            rg(0, 2) = bi[1];
            rg(2, 1) = bi[0];
            v.ref_grad = rg;
            v.profile.kind = DecayProfile::Kind::sampled2d;
            v.profile.gf = GridFunction(std::move(g), r.psi);
            out.has_vec = true;
        }
    } else if (Ef >= out.Estar - cfg.margin && Ef <= out.Estar + 10 * cfg.margin) {
        // interior minimum numerically tied with the chain energy
        out.tag = Dichotomy::indeterminate;
        out.chain_face = out.theta_plus <= out.theta_minus ? +1 : -1;
    } else {
        out.tag = Dichotomy::chain;
        out.chain_face = out.theta_plus <= out.theta_minus ? +1 : -1;
    }
    return out;
}

/// E(1, S_alpha): the pure 2D magnetic sector problem, i.e. the fiber at
/// tau = 0 with the field along the edge. alpha = pi is the half-plane,
/// whose value is Theta_0 (tangent half-space model).
inline double sector_energy_2d(double alpha, double theta0_value, const WedgeCfg& cfg = {}) {
    require(alpha > 1e-9 && alpha < 2 * pi - 1e-9, "sector_energy_2d: bad opening");
    if (std::abs(alpha - pi) < 1e-12) return theta0_value;
    WedgeModel m(alpha, Vec3(1, 0, 0));
    if (!cfg.richardson) return detail::sector_fiber_value(m, 0.0, cfg.fine, cfg.tol);
    return detail::sector_fiber_extrapolated(m, 0.0, cfg.fine, cfg.tol);
}

struct WedgeClassification {
    Dichotomy tag;
    double E, Estar, tau_star;
    int chain_face = 0;         // face with theta = min(theta+, theta-)
    bool decay_ok = false;      // tail-mass certificate of the eigenvector
    double agmon_C = 0;
};

/// Dichotomy report for a wedge: (i) with (tau*, profile, decay data) or
/// (ii) with the minimizing face chain. Ties are reported, never guessed.
inline WedgeClassification classify_wedge(const WedgeModel& m, const SigmaCurve& curve,
                                          const WedgeCfg& cfg = {}, bool want_eigenvector = true) {
    WedgeEnergy we = wedge_energy(m, curve, cfg, want_eigenvector);
    WedgeClassification out{we.tag, we.E, we.Estar, we.tau_star, we.chain_face, false, 0};
    if (we.tag == Dichotomy::bound_state && we.has_vec) {
        out.decay_ok = tail_mass_ok(we.vec.profile);
        out.agmon_C = agmon_constant(we.vec.profile);
    }
    return out;
}

} // namespace polymag
