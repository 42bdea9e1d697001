#ifndef WGTORUS_QUADRATURE_HPP
#define WGTORUS_QUADRATURE_HPP

// Adaptive Gauss7/Kronrod15 quadrature plus small fixed rules used for
// cumulative tables.  Endpoint square-root behavior is handled by the
// s = a + tau^2 substitution helpers.

#include <cmath>
#include <cstddef>
#include <functional>

#include "wgtorus/errors.hpp"

namespace wgtorus {
namespace quad {

// QUADPACK dqk15 abscissae/weights on [-1, 1].
inline constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double rk = 0.0, rg = 0.0;
    const double f0 = f(c);
    rk += kKronrodW[7] * f0;
    rg += kGaussW[3] * f0;
    for (int i = 0; i < 7; ++i) {
        const double dx = hw * kKronrodX[i];
        const double fv = f(c - dx) + f(c + dx);
        rk += kKronrodW[i] * fv;
        if (i % 2 == 1) rg += kGaussW[i / 2] * fv;
    }
    result = rk * hw;
    err = std::abs((rk - rg) * hw);
}

/// Adaptive bisection to absolute tolerance.  Depth-capped: leaves at the cap
/// return their estimate, which bounds the attainable accuracy by the
/// integrand's evaluation noise instead of failing hard (relevant for
/// 1/sqrt(V) weights whose pointwise noise floor exceeds 1e-12 near roots).
template <class F>
inline double adaptive(const F& f, double a, double b, double abs_tol, int depth = 0) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= abs_tol || e <= 1e-13 * std::abs(r) || depth >= 40) return r;
    const double m = 0.5 * (a + b);
    return adaptive(f, a, m, 0.5 * abs_tol, depth + 1) +
           adaptive(f, m, b, 0.5 * abs_tol, depth + 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12) {
    if (a == b) return 0.0;
    return adaptive(f, a, b, abs_tol);
}

/// Integral of f over [a, b] where f may behave like (s-a)^{-1/2} (s-a)^{p/2}
/// near a and likewise near b.  Substitutes s = a + tau^2 / s = b - tau^2 on
/// the two halves, which makes sqrt- and 1/sqrt-type endpoint factors smooth.
template <class F>
inline double integrate_sqrt_endpoints(const F& f, double a, double b, double abs_tol = 1e-12) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double ta = std::sqrt(m - a), tb = std::sqrt(b - m);
    const auto fa = [&](double t) { return 2.0 * t * f(a + t * t); };
    const auto fb = [&](double t) { return 2.0 * t * f(b - t * t); };
    return adaptive(fa, 0.0, ta, 0.5 * abs_tol) + adaptive(fb, 0.0, tb, 0.5 * abs_tol);
}

// 8-point Gauss-Legendre on [-1, 1]; used for the cached cumulative tables.
inline constexpr double kGL8X[4] = {
    0.183434642495649804939476142360184,
    0.525532409916328985817739049189246,
    0.796666477413626739591553936475830,
    0.960289856497536231683560868569473};
inline constexpr double kGL8W[4] = {
    0.362683783378361982965150449277196,
    0.313706645877887287337962201986601,
    0.222381034453374470544355994426241,
    0.101228536290376259152531354309962};

template <class F>
inline double gl8(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double r = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double dx = hw * kGL8X[i];
        r += kGL8W[i] * (f(c - dx) + f(c + dx));
    }
    return r * hw;
}

} // namespace quad
} // namespace wgtorus

#endif
