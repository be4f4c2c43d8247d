#include "polymag/wedge.hpp"

#include <chrono>
#include <cstdio>

using namespace polymag;

static double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    default_workers() = 2;
    DeGennesResult dg = compute_theta0();

    double t0 = now_s();
    WedgeCfg wcfg;
    double Es = sector_energy_2d(pi / 2, dg.theta0, wcfg);
    printf("E(1,S_pi/2) = %.6f (Theta0 = %.6f) [%.1f s]\n", Es, dg.theta0, now_s() - t0);

    // fiber consistency with sigma at alpha = pi
    t0 = now_s();
    double th = 0.6;
    WedgeModel mhalf(pi, Vec3(0, std::cos(th), std::sin(th)));
    double fib = sector_fiber_energy(mhalf, 0.0, SectorCfg{16.0, 0.10});
    SigmaCfg scfg;
    double sg = sigma(th, scfg, dg.theta0);
    printf("fiber(alpha=pi, th=0.6, tau=0) = %.5f vs sigma = %.5f [%.1f s]\n", fib, sg,
           now_s() - t0);

    // full wedge energy, B along edge, alpha = pi/2
    t0 = now_s();
    SigmaCurve curve = build_sigma_curve(17, scfg, dg.theta0);
    printf("curve [%.1f s]\n", now_s() - t0);
    t0 = now_s();
    WedgeModel m(pi / 2, Vec3(1, 0, 0));
    WedgeEnergy we = wedge_energy(m, curve, wcfg, false);
    printf("wedge(pi/2, B||edge): E = %.6f E* = %.6f tag = %s tau* = %.4f [%.1f s]\n", we.E,
           we.Estar, to_string(we.tag), we.tau_star, now_s() - t0);

    // a generic wedge
    t0 = now_s();
    WedgeModel m2(2.0, Vec3(0.3, 0.8, 0.52).normalized());
    WedgeEnergy we2 = wedge_energy(m2, curve, wcfg, false);
    printf("wedge(2.0, generic): E = %.6f E* = %.6f tag = %s tau* = %.4f [%.1f s]\n", we2.E,
           we2.Estar, to_string(we2.tag), we2.tau_star, now_s() - t0);

    // tangent-to-face, normal to edge, alpha = pi/2 -> E = Theta0 (case ii)
    t0 = now_s();
    WedgeModel m3(pi / 2, Vec3(0, std::cos(pi / 4), std::sin(pi / 4)));
    // field in the +face plane: theta_plus should be 0
    printf("m3 theta+ = %.4f theta- = %.4f\n", m3.theta_plus(), m3.theta_minus());
    WedgeEnergy we3 = wedge_energy(m3, curve, wcfg, false);
    printf("wedge(pi/2, tangent-face): E = %.6f E* = %.6f tag = %s [%.1f s]\n", we3.E, we3.Estar,
           to_string(we3.tag), now_s() - t0);
    return 0;
}
