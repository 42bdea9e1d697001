#ifndef WGTORUS_SPECFUN_HPP
#define WGTORUS_SPECFUN_HPP

// Airy Ai, Ai', negative Airy roots, and integer-order parabolic cylinder
// functions.  Everything real-argument, double-precision output.
//
// Ai/Ai' evaluation: Maclaurin series (summed in 80-bit long double) for
// |x| <= kAirySwitchRadius, asymptotic expansions beyond.  The switch radius 8
// keeps the absolute error of both branches below 1e-12 in the overlap band:
// the series' largest term at |x|=8 is ~3.5e6 (positive side), so extended
// precision holds rounding near 1e-13, and the oscillatory asymptotic
// expansion at zeta = (2/3) 8^{3/2} ~ 15.1 truncates near 1e-14.

#include <cmath>
#include <limits>
#include <vector>

#include "wgtorus/errors.hpp"

namespace wgtorus {

struct AiryValue {
    double ai;
    double ai_prime;
};

struct AiryRoot {
    int index;   // k >= 1
    double t;    // Ai(-t) = 0, 0 < t_1 < t_2 < ...
};

namespace detail {

inline constexpr double kAirySwitchRadius = 8.0;

// Ai(0), Ai'(0) to long-double precision.
inline constexpr long double kAi0  = 0.35502805388781723926006318600418L;
inline constexpr long double kAip0 = -0.25881940379280679840518356018920L;

// Maclaurin solution of y'' = x y:
//   f = 1 + x^3/6 + ...,  g = x + x^4/12 + ...,  Ai = Ai(0) f + Ai'(0) g.
inline AiryValue airy_series(double x) {
    if (x == 0.0) return AiryValue{(double)kAi0, (double)kAip0};
    const long double xl = x;
    const long double x3 = xl * xl * xl;
    long double f = 1.0L, fp = 0.0L;   // fp accumulates f'
    long double g = xl, gp = 1.0L;
    long double tf = 1.0L;             // current f-term, x^{3k}-coefficient included
    long double tg = xl;
    for (int k = 1; k < 260; ++k) {
        tf *= x3 / ((3.0L * k) * (3.0L * k - 1.0L));
        tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
        f += tf;
        g += tg;
        fp += tf * (3.0L * k) / xl;    // d/dx x^{3k} = 3k x^{3k-1}
        gp += tg * (3.0L * k + 1.0L) / xl;
        if (std::abs((double)tf) < 1e-40 && std::abs((double)tg) < 1e-40) break;
    }
    AiryValue v;
    v.ai = (double)(kAi0 * f + kAip0 * g);
    v.ai_prime = (double)(kAi0 * fp + kAip0 * gp);
    return v;
}

// u_k, v_k coefficients of the large-|x| expansions (DLMF 9.7).
inline const std::vector<long double>& airy_u_coeffs() {
    static const std::vector<long double> u = [] {
        std::vector<long double> c(28);
        c[0] = 1.0L;
        for (int k = 1; k < 28; ++k)
            c[k] = c[k - 1] * (6.0L * k - 1.0L) * (6.0L * k - 3.0L) * (6.0L * k - 5.0L)
                   / (216.0L * k * (2.0L * k - 1.0L));
        return c;
    }();
    return u;
}

inline const std::vector<long double>& airy_v_coeffs() {
    static const std::vector<long double> v = [] {
        const auto& u = airy_u_coeffs();
        std::vector<long double> c(u.size());
        for (std::size_t k = 0; k < u.size(); ++k)
            c[k] = u[k] * (6.0L * (long double)k + 1.0L) / (1.0L - 6.0L * (long double)k);
        return c;
    }();
    return v;
}

// x >= switch radius: decaying expansion, optimally truncated.
inline AiryValue airy_asymptotic_pos(double x) {
    const long double xl = x;
    const long double zeta = 2.0L / 3.0L * xl * std::sqrt(xl);
    const auto& u = airy_u_coeffs();
    const auto& v = airy_v_coeffs();
    long double su = 0.0L, sv = 0.0L, pw = 1.0L, prev = std::numeric_limits<long double>::max();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const long double tu = u[k] * pw;
        if (std::abs(tu) > prev) break;   // past optimal truncation
        prev = std::abs(tu);
        const long double sgn = (k % 2 == 0) ? 1.0L : -1.0L;
        su += sgn * tu;
        sv += sgn * v[k] * pw;
        pw /= zeta;
    }
    const long double sqpi = 1.77245385090551602729816748334115L;
    const long double pref = std::exp(-zeta) / (2.0L * sqpi);
    AiryValue r;
    r.ai = (double)(pref * su / std::pow(xl, 0.25L));
    r.ai_prime = (double)(-pref * std::pow(xl, 0.25L) * sv);
    return r;
}

// x <= -switch radius: oscillatory expansion (DLMF 9.7.9-9.7.10).
inline AiryValue airy_asymptotic_neg(double x) {
    const long double zl = -(long double)x;
    const long double zeta = 2.0L / 3.0L * zl * std::sqrt(zl);
    const auto& u = airy_u_coeffs();
    const auto& v = airy_v_coeffs();
    long double ce = 0.0L, se = 0.0L, cpe = 0.0L, spe = 0.0L;
    long double pw = 1.0L;
    // even k -> 1/zeta^{2j}, odd k -> 1/zeta^{2j+1}
    long double prev = std::numeric_limits<long double>::max();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const long double tu = u[k] * pw;
        if (std::abs(tu) > prev) break;
        prev = std::abs(tu);
        const long double sgn = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
        if (k % 2 == 0) { ce += sgn * tu; spe += sgn * v[k] * pw; }
        else            { se += sgn * tu; cpe += sgn * v[k] * pw; }
        pw /= zeta;
    }
    const long double sqpi = 1.77245385090551602729816748334115L;
    const long double phase = zeta - 0.78539816339744830961566084581988L;  // zeta - pi/4
    const long double c = std::cos(phase), s = std::sin(phase);
    AiryValue r;
    r.ai = (double)((c * ce + s * se) / (sqpi * std::pow(zl, 0.25L)));
    r.ai_prime = (double)(std::pow(zl, 0.25L) / sqpi * (s * spe - c * cpe));
    return r;
}

} // namespace detail

/// Ai(x) and Ai'(x) in one evaluation.
inline AiryValue airy(double x) {
    if (!std::isfinite(x)) throw numeric_error("airy: non-finite argument");
    if (x > detail::kAirySwitchRadius) return detail::airy_asymptotic_pos(x);
    if (x < -detail::kAirySwitchRadius) return detail::airy_asymptotic_neg(x);
    return detail::airy_series(x);
}

inline double airy_ai(double x) { return airy(x).ai; }
inline double airy_ai_prime(double x) { return airy(x).ai_prime; }

/// k-th negative Airy root: Ai(-t_k) = 0.  Asymptotic seed + safeguarded Newton.
inline AiryRoot airy_negative_root(int k) {
    if (k < 1) throw numeric_error("airy_negative_root: k must be >= 1");
    const double pi = 3.14159265358979323846;
    double t = std::pow(3.0 * pi * (4.0 * k - 1.0) / 8.0, 2.0 / 3.0);
    // Bracket by scanning outwards until Ai(-t) changes sign.
    double lo = t - 0.5, hi = t + 0.5;
    double flo = airy_ai(-lo), fhi = airy_ai(-hi);
    for (int i = 0; i < 60 && flo * fhi > 0.0; ++i) {
        lo -= 0.25; hi += 0.25;
        if (lo < 0.0) lo = 1e-8;
        flo = airy_ai(-lo); fhi = airy_ai(-hi);
    }
    if (flo * fhi > 0.0) throw numeric_error("airy_negative_root: bracketing failed");
    for (int it = 0; it < 100; ++it) {
        const AiryValue v = airy(-t);
        const double step = v.ai / v.ai_prime;   // d/dt Ai(-t) = -Ai'(-t)
        double tn = t + step;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);   // fall back to bisection
        const double fn = airy_ai(-tn);
        if (fn == 0.0) { t = tn; break; }
        if (fn * flo < 0.0) { hi = tn; fhi = fn; } else { lo = tn; flo = fn; }
        if (std::abs(tn - t) < 1e-16 * tn) { t = tn; break; }
        t = tn;
    }
    return AiryRoot{k, t};
}

/// Parabolic cylinder D_m(eta) for integer m >= 0 via the Hermite representation
/// D_m(eta) = 2^{-m/2} e^{-eta^2/4} H_m(eta/sqrt(2)).
inline double parabolic_cylinder_d(int m, double eta) {
    if (m < 0) throw numeric_error("parabolic_cylinder_d: order must be a nonnegative integer");
    if (!std::isfinite(eta)) throw numeric_error("parabolic_cylinder_d: non-finite argument");
    const double x = eta / std::sqrt(2.0);
    double hm1 = 0.0, h = 1.0;                  // H_0 = 1
    for (int j = 0; j < m; ++j) {
        const double hn = 2.0 * x * h - 2.0 * j * hm1;
        hm1 = h;
        h = hn;
    }
    return std::pow(2.0, -0.5 * m) * std::exp(-0.25 * eta * eta) * h;
}

} // namespace wgtorus

#endif
