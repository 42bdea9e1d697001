#ifndef WGTORUS_SEMICLASSICS_HPP
#define WGTORUS_SEMICLASSICS_HPP

// Longitudinal spectral problem on the generating curve:
//   potential  V(s; E^2) = a_n^2 / X^2(0,s) - E^2,
//   stability  A(s; E^2) = (2 a_n^2 Q2'/X^3 - 2 k V)^{1/3}  (must stay > 0),
// quantization either by periodicity (no turning points),
//   int_0^L sqrt(|V|) = 2 pi m eps,
// or by the Bohr-Sommerfeld rule between two turning points s_- < s_+,
//   (1 / eps pi) int_{s_-}^{s_+} sqrt(|V|) = m + 1/2.
// The correction E_1 is the 1/sqrt(|V|)-weighted average of A^2 over the
// relevant range, and the assembled spectral parameter is
//   curly E^2 = E^2 + h t_k E_1,   lambda^2 = curly E^2 / eps^2.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wgtorus/errors.hpp"
#include "wgtorus/geometry.hpp"
#include "wgtorus/quadrature.hpp"
#include "wgtorus/specfun.hpp"

namespace wgtorus {

struct ModeIndices {
    int n = 1;   // angular quantum number, >= 1
    int k = 1;   // transverse (Airy) index, >= 1
    int m = 0;   // longitudinal quantum number, >= 0

    void validate() const {
        if (n < 1) throw numeric_error("ModeIndices: n must be >= 1");
        if (k < 1) throw numeric_error("ModeIndices: k must be >= 1");
        if (m < 0) throw numeric_error("ModeIndices: m must be >= 0");
    }
};

struct ScaleParams {
    double epsilon = 0.0;
    double h = 0.0;        // h = epsilon^{2/3}
    double a_n = 0.0;      // n * epsilon (n may be non-integral in sweeps)

    static ScaleParams from_epsilon(double eps, double n) {
        if (!(eps > 0.0)) throw numeric_error("ScaleParams: epsilon must be positive");
        ScaleParams p;
        p.epsilon = eps;
        p.h = std::pow(eps, 2.0 / 3.0);
        p.a_n = n * eps;
        return p;
    }
    static ScaleParams from_h(double h, double n) {
        if (!(h > 0.0)) throw numeric_error("ScaleParams: h must be positive");
        ScaleParams p;
        p.h = h;
        p.epsilon = std::pow(h, 1.5);
        p.a_n = n * p.epsilon;
        return p;
    }
    /// O(1) sanity band for a_n / R; violations are warnings, not errors.
    bool a_over_R_in_range(double R, double lo = 0.05, double hi = 20.0) const {
        const double q = a_n / R;
        return q >= lo && q <= hi;
    }
};

enum class Regime { NoTurningPoints, TwoTurningPoints };

inline const char* regime_name(Regime r) {
    return r == Regime::NoTurningPoints ? "no_turning_points" : "two_turning_points";
}

struct TurningInfo {
    Regime regime = Regime::NoTurningPoints;
    double s_minus = 0.0;   // defined for TwoTurningPoints, s_minus < s_plus
    double s_plus = 0.0;    // may exceed L when the well straddles s = 0
};

struct SpectralData {
    double E2 = 0.0;
    double E1 = 0.0;
    double t_k = 0.0;
    double curly_E2 = 0.0;   // E2 + h t_k E1
    double lambda2 = 0.0;    // curly_E2 / eps^2
    Regime regime = Regime::NoTurningPoints;
    std::optional<double> s_minus, s_plus;
    ScaleParams scale;
    ModeIndices indices;
};

inline double potential_u(const MeridianCurve& curve, const ScaleParams& scale, double s) {
    const double X = curve.X0(s);
    return scale.a_n * scale.a_n / (X * X);
}

inline double potential_v(const MeridianCurve& curve, const ScaleParams& scale, double s,
                          double E2) {
    return potential_u(curve, scale, s) - E2;
}

/// d/ds of the bare potential a_n^2 / X^2(0,s).
inline double potential_u_prime(const MeridianCurve& curve, const ScaleParams& scale, double s) {
    const double X = curve.X0(s);
    return -2.0 * scale.a_n * scale.a_n * curve.q1p(s) / (X * X * X);
}

inline double stability_a3(const MeridianCurve& curve, const ScaleParams& scale, double s,
                           double E2) {
    const double X = curve.X0(s);
    return 2.0 * scale.a_n * scale.a_n * curve.q2p(s) / (X * X * X) -
           2.0 * curve.kappa(s) * potential_v(curve, scale, s, E2);
}

inline double stability_a(const MeridianCurve& curve, const ScaleParams& scale, double s,
                          double E2) {
    const double c = stability_a3(curve, scale, s, E2);
    if (!(c > 0.0)) {
        std::ostringstream os;
        os << "stability condition violated at s = " << s << " (A^3 = " << c << ")";
        throw stability_error(os.str());
    }
    return std::cbrt(c);
}

namespace detail {

struct Extremum {
    double s;
    double value;
};

inline Extremum scan_extremum(const MeridianCurve& curve, const ScaleParams& scale, bool want_max,
                              int n_scan = 8192) {
    const double L = curve.L();
    double best_s = 0.0, best = want_max ? -1e300 : 1e300;
    for (int i = 0; i < n_scan; ++i) {
        const double s = L * (double)i / (double)n_scan;
        const double u = potential_u(curve, scale, s);
        if (want_max ? (u > best) : (u < best)) { best = u; best_s = s; }
    }
    // golden-section polish within one scan cell on each side
    double a = best_s - L / n_scan, b = best_s + L / n_scan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 120; ++it) {
        const double fc = potential_u(curve, scale, c), fd = potential_u(curve, scale, d);
        const bool pick_left = want_max ? (fc > fd) : (fc < fd);
        if (pick_left) { b = d; d = c; c = b - gr * (b - a); }
        else           { a = c; c = d; d = a + gr * (b - a); }
        if (b - a < 1e-14 * L) break;
    }
    const double s = 0.5 * (a + b);
    return {s, potential_u(curve, scale, s)};
}

inline double refine_root(const MeridianCurve& curve, const ScaleParams& scale, double E2,
                          double lo, double hi) {
    double flo = potential_v(curve, scale, lo, E2);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = potential_v(curve, scale, mid, E2);
        if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
        if (hi - lo < 1e-12) break;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double f = potential_v(curve, scale, s, E2);
        const double fp = potential_u_prime(curve, scale, s);
        if (fp == 0.0) break;
        s -= f / fp;
    }
    return s;
}

} // namespace detail

/// Locates the roots of V(.; E2) on one period.  Exactly zero roots (with
/// V < 0 everywhere) or exactly two are supported.  The uniform scan is
/// supplemented by fine scans around the extrema of U, where the sign
/// interval can be much thinner than a scan cell (E2 within a hair of
/// min U or max U).
inline TurningInfo find_turning_points(const MeridianCurve& curve, const ScaleParams& scale,
                                       double E2, int n_scan = 4096) {
    const double L = curve.L();
    const double cell = L / (double)n_scan;
    std::vector<double> roots;
    auto scan_range = [&](double a, double b, int n) {
        double prev = potential_v(curve, scale, a, E2);
        for (int i = 1; i <= n; ++i) {
            const double s = a + (b - a) * (double)i / (double)n;
            const double v = potential_v(curve, scale, s, E2);
            if (prev * v < 0.0)
                roots.push_back(detail::refine_root(curve, scale, E2,
                                                    a + (b - a) * (double)(i - 1) / (double)n, s));
            else if (prev == 0.0)
                roots.push_back(a + (b - a) * (double)(i - 1) / (double)n);
            prev = v;
        }
    };
    scan_range(0.0, L, n_scan);
    for (bool want_max : {false, true}) {
        const double se = detail::scan_extremum(curve, scale, want_max).s;
        bool covered = false;
        for (double rt : roots)
            if (std::abs(std::remainder(rt - se, L)) < 2.0 * cell) covered = true;
        if (!covered) scan_range(se - 1.5 * cell, se + 1.5 * cell, 512);
    }
    std::sort(roots.begin(), roots.end());
    double prev = potential_v(curve, scale, L, E2);
    if (roots.size() > 2) throw regime_error("more than two turning points; unsupported regime");
    if (roots.size() == 1) throw regime_error("grazing case (exactly one turning point) is not treated");
    TurningInfo info;
    if (roots.empty()) {
        if (prev > 0.0) throw regime_error("V > 0 everywhere: spectral parameter below the well");
        info.regime = Regime::NoTurningPoints;
        return info;
    }
    info.regime = Regime::TwoTurningPoints;
    const double mid = 0.5 * (roots[0] + roots[1]);
    if (potential_v(curve, scale, mid, E2) < 0.0) {
        info.s_minus = roots[0];
        info.s_plus = roots[1];
    } else {                       // the well straddles the period seam
        info.s_minus = roots[1];
        info.s_plus = roots[0] + L;
    }
    return info;
}

/// int_{s_-}^{s_+} sqrt(E2 - U) ds with the endpoint square roots removed by
/// the s = s_± -/+ tau^2 substitution.
inline double action_well(const MeridianCurve& curve, const ScaleParams& scale, double E2,
                          double s_minus, double s_plus, double tol = 1e-12) {
    auto f = [&](double s) {
        const double v = E2 - potential_u(curve, scale, s);
        return std::sqrt(std::max(v, 0.0));
    };
    return quad::integrate_sqrt_endpoints(f, s_minus, s_plus, tol);
}

inline double action_full_period(const MeridianCurve& curve, const ScaleParams& scale, double E2,
                                 double tol = 1e-12) {
    auto f = [&](double s) {
        const double v = E2 - potential_u(curve, scale, s);
        return std::sqrt(std::max(v, 0.0));
    };
    return quad::integrate(f, 0.0, curve.L(), tol);
}

/// Periodicity quantization: int_0^L sqrt(|V|) = 2 pi m eps with V < 0 on all
/// of [0, L].  The action is strictly increasing in E2, so bracketed bisection.
inline double solve_periodic_quantization(const MeridianCurve& curve, const ScaleParams& scale,
                                          int m) {
    if (m < 0) throw numeric_error("solve_periodic_quantization: m must be >= 0");
    const double target = 2.0 * M_PI * (double)m * scale.epsilon;
    const double umax = detail::scan_extremum(curve, scale, true).value;
    double lo = umax * (1.0 + 1e-12) + 1e-300;
    if (action_full_period(curve, scale, lo) > target + 1e-10)
        throw regime_error("no E2 with V < 0 everywhere satisfies the periodic rule; "
                           "use the Bohr-Sommerfeld branch");
    double hi = std::max(2.0 * (umax + 1.0), 2.0 * lo);
    while (action_full_period(curve, scale, hi) < target) {
        hi *= 2.0;
        if (hi > 1e12) throw numeric_error("periodic quantization bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (action_full_period(curve, scale, mid) < target) lo = mid; else hi = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

/// Bohr-Sommerfeld quantization: (1/eps pi) int_{s_-}^{s_+} sqrt(|V|) = m + 1/2,
/// with the turning points recomputed for every trial E2.
inline double solve_bohr_sommerfeld(const MeridianCurve& curve, const ScaleParams& scale, int m) {
    if (m < 0) throw numeric_error("solve_bohr_sommerfeld: m must be >= 0");
    const double target = scale.epsilon * M_PI * ((double)m + 0.5);
    const double umin = detail::scan_extremum(curve, scale, false).value;
    const double umax = detail::scan_extremum(curve, scale, true).value;
    if (!(umax > umin))
        throw regime_error("potential has no well: Bohr-Sommerfeld regime unavailable");
    const double d0 = 1e-9 * (umax - umin);
    double lo = umin + d0, hi = umax - d0;
    // The positive-part integral equals the well action and stays meaningful
    // when the turning interval is too thin for the sign scan (E2 within a
    // hair of min U or max U).
    auto act = [&](double E2) {
        try {
            const TurningInfo t = find_turning_points(curve, scale, E2);
            if (t.regime == Regime::TwoTurningPoints)
                return action_well(curve, scale, E2, t.s_minus, t.s_plus);
        } catch (const regime_error&) {
        }
        return quad::integrate([&](double s) {
            const double v = E2 - potential_u(curve, scale, s);
            return v > 0.0 ? std::sqrt(v) : 0.0;
        }, 0.0, curve.L(), 1e-12);
    };
    if (act(hi) < target)
        throw numeric_error("solve_bohr_sommerfeld: no admissible E2 in the well for this m");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (act(mid) < target) lo = mid; else hi = mid;
        if (hi - lo <= 1e-13 * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

/// V(root + u; E2) with E2 pinned to U(root) and the difference
/// U(root + u) - U(root) formed without cancellation:
///   U - U_r = a_n^2 (X_r - X)(X_r + X) / (X^2 X_r^2),
///   X_r - X = -u int_0^1 cos(a(root + u t)) dt.
/// The offset u is passed exactly, so the relative precision does not degrade
/// as u shrinks below the ulp of the root position.
inline double potential_v_near_root(const MeridianCurve& curve, const ScaleParams& scale,
                                    double root, double u) {
    const double Xr = curve.X0(root), X = curve.X0(root + u);
    const double avg = quad::gl8([&](double t) { return curve.q1p(root + u * t); }, 0.0, 1.0);
    const double dX = -u * avg;   // X_r - X
    return scale.a_n * scale.a_n * dX * (Xr + X) / (X * X * Xr * Xr);
}

/// int_{s_-}^{s_+} g(s) / sqrt(|V(s; E2)|) ds with the endpoint substitution
/// s = s_± -/+ tau^2 written through the smooth ratio q = sqrt(|V|)/tau and
/// the cancellation-free V of potential_v_near_root.
template <class G>
inline double integrate_inv_sqrtv(const MeridianCurve& curve, const ScaleParams& scale,
                                  double E2, double s_minus, double s_plus, const G& g,
                                  double tol = 1e-12) {
    (void)E2;   // pinned to U at the supplied roots
    const double mid = 0.5 * (s_minus + s_plus);
    auto half = [&](double anchor, double sgn, double tau_max) {
        auto f = [&](double tau) {
            const double u = sgn * tau * tau;
            const double q =
                std::sqrt(std::abs(potential_v_near_root(curve, scale, anchor, u))) /
                std::max(tau, 1e-300);
            return 2.0 * g(anchor + u) / q;
        };
        return quad::adaptive(f, 0.0, tau_max, 0.5 * tol);
    };
    return half(s_minus, +1.0, std::sqrt(mid - s_minus)) +
           half(s_plus, -1.0, std::sqrt(s_plus - mid));
}

/// Weighted average of A^2 with weight 1 / sqrt(|V|) over the classically
/// allowed range: whole period (no turning points) or [s_-, s_+].
inline double correction_e1(const MeridianCurve& curve, const ScaleParams& scale, double E2,
                            const TurningInfo& turning, double tol = 1e-12) {
    auto a2 = [&](double s) {
        const double a = stability_a(curve, scale, s, E2);
        return a * a;
    };
    if (turning.regime == Regime::NoTurningPoints) {
        auto inv_sqrtv = [&](double s) {
            return 1.0 / std::sqrt(std::abs(potential_v(curve, scale, s, E2)));
        };
        const double den = quad::integrate(inv_sqrtv, 0.0, curve.L(), tol);
        const double num = quad::integrate([&](double s) { return a2(s) * inv_sqrtv(s); },
                                           0.0, curve.L(), tol);
        return num / den;
    }
    const double den = integrate_inv_sqrtv(curve, scale, E2, turning.s_minus, turning.s_plus,
                                           [](double) { return 1.0; }, tol);
    const double num = integrate_inv_sqrtv(curve, scale, E2, turning.s_minus, turning.s_plus,
                                           a2, tol);
    return num / den;
}

enum class RegimeChoice { Auto, Periodic, BohrSommerfeld };

/// Full spectral record for the indices (n, k, m).
inline SpectralData assemble_spectrum(const MeridianCurve& curve, const ScaleParams& scale,
                                      const ModeIndices& idx,
                                      RegimeChoice choice = RegimeChoice::Auto) {
    idx.validate();
    SpectralData sd;
    sd.scale = scale;
    sd.indices = idx;
    sd.t_k = airy_negative_root(idx.k).t;

    TurningInfo turning;
    if (choice == RegimeChoice::Periodic) {
        sd.E2 = solve_periodic_quantization(curve, scale, idx.m);
        turning.regime = Regime::NoTurningPoints;
    } else if (choice == RegimeChoice::BohrSommerfeld) {
        sd.E2 = solve_bohr_sommerfeld(curve, scale, idx.m);
        turning = find_turning_points(curve, scale, sd.E2);
    } else {
        try {
            sd.E2 = solve_bohr_sommerfeld(curve, scale, idx.m);
            turning = find_turning_points(curve, scale, sd.E2);
        } catch (const regime_error&) {
            sd.E2 = solve_periodic_quantization(curve, scale, idx.m);
            turning.regime = Regime::NoTurningPoints;
        }
    }
    sd.regime = turning.regime;

    // Quantization residual must close to 1e-10.
    if (sd.regime == Regime::TwoTurningPoints) {
        sd.s_minus = turning.s_minus;
        sd.s_plus = turning.s_plus;
        const double act = action_well(curve, scale, sd.E2, turning.s_minus, turning.s_plus);
        const double target = scale.epsilon * M_PI * ((double)idx.m + 0.5);
        if (std::abs(act - target) > 1e-10)
            throw numeric_error("assemble_spectrum: Bohr-Sommerfeld residual above 1e-10");
        if (std::abs(potential_v(curve, scale, turning.s_minus, sd.E2)) > 1e-10 ||
            std::abs(potential_v(curve, scale, turning.s_plus, sd.E2)) > 1e-10)
            throw numeric_error("assemble_spectrum: turning points do not satisfy V = 0");
    } else {
        const double act = action_full_period(curve, scale, sd.E2);
        const double target = 2.0 * M_PI * (double)idx.m * scale.epsilon;
        if (std::abs(act - target) > 1e-10)
            throw numeric_error("assemble_spectrum: periodic quantization residual above 1e-10");
    }

    sd.E1 = correction_e1(curve, scale, sd.E2, turning);
    sd.curly_E2 = sd.E2 + scale.h * sd.t_k * sd.E1;
    sd.lambda2 = sd.curly_E2 / (scale.epsilon * scale.epsilon);

    // First-approximation stability at the assembled spectral parameter.
    const double a = sd.regime == Regime::TwoTurningPoints ? turning.s_minus : 0.0;
    const double b = sd.regime == Regime::TwoTurningPoints ? turning.s_plus : curve.L();
    for (int i = 0; i <= 256; ++i)
        stability_a(curve, scale, a + (b - a) * (double)i / 256.0, sd.curly_E2);
    return sd;
}

} // namespace wgtorus

#endif
