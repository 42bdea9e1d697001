#ifndef WGTORUS_BILLIARDS_HPP
#define WGTORUS_BILLIARDS_HPP

// Reduced 2-D Hamiltonian flow with a reflecting wall at rho = 0,
//   H = p_s^2 + V(s; curlyE2) + h (p_rho^2 + rho A^3(s; curlyE2)),
//   s' = 2 p_s,  p_s' = -V' - h rho (A^3)',  rho' = 2 h p_rho,  p_rho' = -h A^3,
// integrated by Stoermer-Verlet (kick-drift-kick); the wall event is solved
// exactly inside the drift (rho is linear there) and reflects p_rho -> -p_rho.
// 3-D billiard: straight rays in the solid torus with specular reflection.

#include <array>
#include <cmath>
#include <iostream>
#include <vector>

#include "wgtorus/errors.hpp"
#include "wgtorus/geometry.hpp"
#include "wgtorus/semiclassics.hpp"
#include "wgtorus/spline.hpp"

namespace wgtorus {

struct PhaseState2D {
    double t = 0.0;
    double s = 0.0;
    double p_s = 0.0;
    double rho = 0.0;
    double p_rho = 0.0;
    double energy = 0.0;
};

struct Ray3D {
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::array<double, 3> direction{1.0, 0.0, 0.0};   // unit
    double segment_length = 0.0;
};

struct ActionValue {
    double E2 = 0.0;
    double I = 0.0;   // (1/2 pi) contour integral of P dQ
};

struct Flow2DResult {
    std::vector<PhaseState2D> trajectory;
    int reflections = 0;
    double max_energy_drift = 0.0;   // max |H - H0| along the run
    double dt_used = 0.0;
};

namespace detail {

/// Tabulated forces for the reduced flow at fixed spectral parameter.
struct FlowForces {
    CubicSpline v_prime;    // d/ds [a_n^2/X^2]
    CubicSpline a3;         // A^3(s; curlyE2)
    CubicSpline a3_prime;

    FlowForces(const MeridianCurve& curve, const ScaleParams& scale, double curlyE2,
               int n = 4096) {
        const double L = curve.L();
        const double dx = L / n;
        std::vector<double> vp(n + 1), a(n + 1), ap(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double s = dx * i;
            vp[i] = potential_u_prime(curve, scale, s);
            a[i] = stability_a3(curve, scale, s, curlyE2);
            const double X = curve.X0(s);
            const double X2 = X * X, X4 = X2 * X2;
            const double an2 = scale.a_n * scale.a_n;
            // d/ds [2 a_n^2 Q2'/X^3 - 2 k V]
            ap[i] = 2.0 * an2 * (curve.q2pp(s) * X - 3.0 * curve.q1p(s) * curve.q2p(s)) / X4 -
                    2.0 * curve.kappa_prime(s) * (potential_u(curve, scale, s) - curlyE2) -
                    2.0 * curve.kappa(s) * vp[i];
        }
        vp[n] = vp[0]; a[n] = a[0]; ap[n] = ap[0];
        v_prime = CubicSpline(0.0, dx, vp, CubicSpline::Closure::Periodic);
        a3 = CubicSpline(0.0, dx, a, CubicSpline::Closure::Periodic);
        a3_prime = CubicSpline(0.0, dx, ap, CubicSpline::Closure::Periodic);
    }
};

} // namespace detail

inline double flow_energy(const MeridianCurve& curve, const ScaleParams& scale, double curlyE2,
                          const PhaseState2D& st) {
    const double V = potential_v(curve, scale, st.s, curlyE2);
    const double a3 = stability_a3(curve, scale, st.s, curlyE2);
    return st.p_s * st.p_s + V + scale.h * (st.p_rho * st.p_rho + st.rho * a3);
}

/// Fixed-step symplectic integration of the reduced system with wall folding
/// at rho = 0.  Retries with halved dt (up to 10 times) when the per-step
/// energy drift exceeds 1e-8 relative.
inline Flow2DResult flow_2d(const MeridianCurve& curve, const ScaleParams& scale,
                            double curlyE2, PhaseState2D state0, double T, double dt,
                            int output_stride = 1) {
    if (!(T > 0.0) || !(dt > 0.0)) throw numeric_error("flow_2d: T and dt must be positive");
    if (state0.rho < 0.0) throw numeric_error("flow_2d: rho must be nonnegative");
    const detail::FlowForces forces(curve, scale, curlyE2);
    const double h = scale.h;

    const double H0 = flow_energy(curve, scale, curlyE2, state0);
    // natural energy scale: sum of term magnitudes (H itself can vanish)
    const double e_scale =
        state0.p_s * state0.p_s + std::abs(potential_v(curve, scale, state0.s, curlyE2)) +
        h * (state0.p_rho * state0.p_rho +
             state0.rho * std::abs(stability_a3(curve, scale, state0.s, curlyE2))) +
        1e-12;

    for (int attempt = 0; attempt <= 10; ++attempt) {
        Flow2DResult out;
        out.dt_used = dt;
        PhaseState2D st = state0;
        st.t = 0.0;
        st.energy = H0;
        out.trajectory.push_back(st);
        const long steps = (long)std::ceil(T / dt);
        bool reject = false;
        double e_prev = H0;
        for (long n = 0; n < steps && !reject; ++n) {
            // half-kick of the longitudinal momentum
            st.p_s += 0.5 * dt * (-forces.v_prime(st.s) - h * st.rho * forces.a3_prime(st.s));
            st.s += dt * 2.0 * st.p_s;
            // transverse flight under the frozen force -h A^3(s): exact
            // parabolic arcs with elastic wall bounces, so the transverse
            // sub-energy is conserved exactly across reflections
            {
                const double g = -h * forces.a3(st.s);
                double t_rem = dt;
                for (int guard = 0; guard < 64 && t_rem > 0.0; ++guard) {
                    // rho(t) = rho + 2 h p t + h g t^2
                    const double a = h * g, b = 2.0 * h * st.p_rho, c = st.rho;
                    double t_hit = -1.0;
                    const double disc = b * b - 4.0 * a * c;
                    if (a != 0.0 && disc >= 0.0) {
                        const double r1 = (-b - std::sqrt(disc)) / (2.0 * a);
                        const double r2 = (-b + std::sqrt(disc)) / (2.0 * a);
                        const double lo = std::min(r1, r2), hi = std::max(r1, r2);
                        if (lo > 1e-15 && lo <= t_rem) t_hit = lo;
                        else if (hi > 1e-15 && hi <= t_rem) t_hit = hi;
                        else if (c <= 0.0 && b < 0.0) t_hit = 0.0;   // grazing the wall
                    } else if (a == 0.0 && b < 0.0) {
                        const double t0 = -c / b;
                        if (t0 <= t_rem) t_hit = std::max(t0, 0.0);
                    }
                    if (t_hit < 0.0) {
                        st.rho = std::max(0.0, c + b * t_rem + a * t_rem * t_rem);
                        st.p_rho += g * t_rem;
                        t_rem = 0.0;
                    } else {
                        st.rho = 0.0;
                        st.p_rho = -(st.p_rho + g * t_hit);
                        t_rem -= t_hit;
                        ++out.reflections;
                    }
                }
            }
            st.p_s += 0.5 * dt * (-forces.v_prime(st.s) - h * st.rho * forces.a3_prime(st.s));
            st.t = (double)(n + 1) * dt;

            st.energy = flow_energy(curve, scale, curlyE2, st);
            const double drift = std::abs(st.energy - e_prev);
            e_prev = st.energy;
            out.max_energy_drift = std::max(out.max_energy_drift, std::abs(st.energy - H0));
            if (drift > 1e-8 * e_scale) {
                // per-step drift too large; retry with a finer step
                if (attempt == 10)
                    throw numeric_error("flow_2d: energy drift persists after 10 dt halvings");
                reject = true;
                break;
            }
            if ((n + 1) % output_stride == 0 || n + 1 == steps) out.trajectory.push_back(st);
        }
        if (!reject) return out;
        dt *= 0.5;
    }
    throw numeric_error("flow_2d: unreachable");
}

// ---------------------------------------------------------------------------
// 3-D billiard.

/// Specular bounces of a straight ray inside the solid torus.  The wall hit is
/// bracketed by marching (step = diameter/200) on the signed meridian depth
/// and then bisected; reflection uses the surface normal
///   N = (-Q2' sin a, -Q2' cos a, Q1') at the hit parameter s, alpha.
inline std::vector<Ray3D> billiard_3d(const MeridianCurve& curve, const Ray3D& ray0,
                                      int bounces) {
    if (bounces < 1) throw numeric_error("billiard_3d: bounces must be >= 1");
    std::array<double, 3> pos = ray0.origin;
    std::array<double, 3> dir = ray0.direction;
    const double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (std::abs(dn - 1.0) > 1e-12)
        for (double& d : dir) d /= dn;

    auto depth = [&](const std::array<double, 3>& p) {
        const double xi = std::hypot(p[0], p[1]);
        double r, s;
        if (!curve.project(xi, p[2], r, s))
            throw geometry_error("billiard_3d: projection failed along the ray");
        return r;
    };
    auto at = [&](double t) {
        return std::array<double, 3>{pos[0] + t * dir[0], pos[1] + t * dir[1],
                                     pos[2] + t * dir[2]};
    };

    if (depth(pos) < 0.0) throw geometry_error("billiard_3d: origin lies outside the domain");

    const double diam = curve.diameter() + 2.0 * curve.R();
    const double step = diam / 200.0;
    const double t_safe = 10.0 * diam;

    std::vector<Ray3D> segments;
    segments.reserve(bounces);
    for (int b = 0; b < bounces; ++b) {
        // bracket the boundary crossing
        double t0 = 1e-9 * diam, t1 = t0 + step;
        double d0 = depth(at(t0));
        while (true) {
            if (t1 > t_safe) throw geometry_error("billiard_3d: no wall hit within 10 diameters");
            const double d1 = depth(at(t1));
            if (d1 < 0.0) break;
            t0 = t1; d0 = d1;
            t1 += step;
        }
        for (int it = 0; it < 200; ++it) {
            const double tm = 0.5 * (t0 + t1);
            const double dm = depth(at(tm));
            if (dm >= 0.0) { t0 = tm; d0 = dm; } else { t1 = tm; }
            if (t1 - t0 < 1e-13 * diam) break;
        }
        (void)d0;
        const double t_hit = t0;
        const std::array<double, 3> hit = at(t_hit);

        Ray3D seg;
        seg.origin = pos;
        seg.direction = dir;
        seg.segment_length = t_hit;
        segments.push_back(seg);

        // surface normal at the hit
        const double xi = std::hypot(hit[0], hit[1]);
        double r, s;
        if (!curve.project(xi, hit[2], r, s))
            throw geometry_error("billiard_3d: projection failed at the wall");
        const double sal = xi > 0.0 ? hit[0] / xi : 0.0;
        const double cal = xi > 0.0 ? hit[1] / xi : 1.0;
        const std::array<double, 3> N{-curve.q2p(s) * sal, -curve.q2p(s) * cal, curve.q1p(s)};
        const double dnr = dir[0] * N[0] + dir[1] * N[1] + dir[2] * N[2];
        if (std::abs(dnr) < 1e-10)
            std::cerr << "billiard_3d: warning, grazing incidence (|cos| = " << std::abs(dnr)
                      << ")\n";
        for (int i = 0; i < 3; ++i) dir[i] -= 2.0 * dnr * N[i];
        pos = hit;
    }
    return segments;
}

// ---------------------------------------------------------------------------
// Action variable of the unperturbed longitudinal flow.

/// I(E2) = (1/pi) int_{s_-}^{s_+} sqrt(E2 - U) ds; at a Bohr-Sommerfeld
/// energy this equals eps (m + 1/2).
inline ActionValue action_of_energy(const MeridianCurve& curve, const ScaleParams& scale,
                                    double E2) {
    const TurningInfo t = find_turning_points(curve, scale, E2);
    if (t.regime != Regime::TwoTurningPoints)
        throw regime_error("action_of_energy: two-turning-point regime required");
    ActionValue a;
    a.E2 = E2;
    a.I = action_well(curve, scale, E2, t.s_minus, t.s_plus) / M_PI;
    return a;
}

} // namespace wgtorus

#endif
