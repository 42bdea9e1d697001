#ifndef WGTORUS_MODES_HPP
#define WGTORUS_MODES_HPP

// Longitudinal mode psi(s), separation to the half-strip mode w(rho, s), the
// localized cutoff, the 3-D lift, and the caustic.
//
// Turning-point regime: each branch psi_± is evaluated through three smooth
// Langer ingredients,
//   Lambda(s) = -((3/2eps) |int_{s_±}^s sqrt|V||)^{2/3}     (signed Airy argument)
//   R_ev(s)   = (Lambda/V)^{1/4} cos g1(s)
//   R_odd(s)  = sin g1(s) / |Lambda V|^{1/4}
//   psi_+ = sqrt(2 pi) [R_ev Ai(Lambda) - R_odd Ai'(Lambda)]
//   psi_- = (-1)^m sqrt(2 pi) [R_ev Ai(Lambda) + R_odd Ai'(Lambda)]
// with g1(s) = (h t_k / 2 eps) int_s^{s_+} (<A^2> - A^2)/sqrt|V|.  The three
// ingredients continue smoothly across the turning points; beyond s_± they are
// produced by the moment-matched reflection extension, under which the Airy
// factors decay exponentially.  The constant phases e^{±i pi/4} kappa_m^± of
// the printed branches multiply to a unit factor (psi_+ = i psi_- exactly);
// they are dropped so both branches are real and coincide to O(h^2).

#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <memory>
#include <vector>

#include "wgtorus/errors.hpp"
#include "wgtorus/geometry.hpp"
#include "wgtorus/quadrature.hpp"
#include "wgtorus/semiclassics.hpp"
#include "wgtorus/specfun.hpp"
#include "wgtorus/spline.hpp"

namespace wgtorus {

using complexd = std::complex<double>;

using CurvePtr = std::shared_ptr<const MeridianCurve>;

/// C-infinity step based on exp(-1/x): 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double fa = std::exp(-1.0 / t);
    const double fb = std::exp(-1.0 / (1.0 - t));
    return fa / (fa + fb);
}

/// Plateau cutoff: 1 on [p_lo, p_hi], smooth to 0 over widths w_lo / w_hi.
struct CutoffZeta {
    double p_lo = 0.0, p_hi = 0.0, w_lo = 1.0, w_hi = 1.0;
    bool trivial = false;

    double operator()(double s) const {
        if (trivial) return 1.0;
        if (s <= p_lo - w_lo || s >= p_hi + w_hi) return 0.0;
        if (s < p_lo) return smooth_step((s - (p_lo - w_lo)) / w_lo);
        if (s > p_hi) return smooth_step(((p_hi + w_hi) - s) / w_hi);
        return 1.0;
    }
    double support_lo() const { return trivial ? -1e300 : p_lo - w_lo; }
    double support_hi() const { return trivial ? 1e300 : p_hi + w_hi; }
};

// ---------------------------------------------------------------------------
// Moment-matched reflection extension.

/// Coefficients c_1..c_ell with sum_j c_j (-j)^p = 1 for p = 0..ell-1; the
/// extension sum_j c_j f(s_± + j (s_± - s)) then reproduces polynomials of
/// degree < ell exactly.  For ell = 3: (6, -8, 3).
inline std::vector<double> extension_coefficients(int ell) {
    if (ell < 1 || ell > 8) throw numeric_error("extension_coefficients: need 1 <= ell <= 8");
    const int n = ell;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int p = 0; p < n; ++p) {
        for (int j = 1; j <= n; ++j) a[p][j - 1] = std::pow(-(double)j, p);
        a[p][n] = 1.0;
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> c(n);
    for (int j = 0; j < n; ++j) c[j] = a[j][n] / a[j][j];
    return c;
}

/// Extension of f beyond the turning point s_pm: side = +1 extends to
/// s >= s_pm (reflected nodes below s_pm), side = -1 to s <= s_pm.
/// interior_limit bounds how deep the reflected nodes may reach.
template <class F>
inline double extend_beyond_turning(const F& f, double s_pm, int side, int ell, double s,
                                    double interior_limit) {
    const std::vector<double> c = extension_coefficients(ell);
    const double u = side > 0 ? (s - s_pm) : (s_pm - s);
    if (u < 0.0) throw numeric_error("extend_beyond_turning: point is on the interior side");
    double v = 0.0;
    for (int j = 1; j <= ell; ++j) {
        const double node = side > 0 ? s_pm - j * u : s_pm + j * u;
        if (side > 0 ? (node < interior_limit) : (node > interior_limit))
            throw numeric_error("extend_beyond_turning: collar too wide, reflected node "
                                "leaves the interior (shrink delta)");
        v += c[j - 1] * f(node);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Mode containers.

struct Mode1D {
    Regime regime = Regime::TwoTurningPoints;
    SpectralData spectral;
    double A0 = 1.0;            // applied normalization constant
    double delta = 0.0;         // turning-point collar width
    int ell = 3;                // extension order
    CutoffZeta zeta;
    double L = 0.0;
    std::vector<double> s_grid;          // uniform, size N over [0, L)
    std::vector<complexd> values;
    std::function<complexd(double)> psi;
};

/// theta(r, s): 1 for r <= sqrt(h) C / k(s), smooth to 0 before r = 1/k(s).
struct ThetaCutoff {
    CurvePtr curve;
    double sqrt_h = 0.0;
    double C = 0.0;
    bool trivial = true;

    double operator()(double r, double s) const {
        if (trivial || r <= 0.0) return 1.0;
        const double k = curve->kappa(s);
        const double r_pl = sqrt_h * C / k;
        const double w_tr = 0.5 * (1.0 / k - r_pl);
        if (w_tr <= 0.0) throw numeric_error("theta cutoff: C_loc too large for this sqrt(h)");
        return 1.0 - smooth_step((r - r_pl) / w_tr);
    }
};

struct Mode2D {
    CurvePtr curve;
    SpectralData spectral;
    double C_loc = 0.0;
    bool localized = false;
    double rho_max = 0.0;
    std::vector<double> s_grid, rho_grid;
    std::vector<complexd> values;                  // [i_s * n_rho + j_rho]
    std::function<complexd(double, double)> w;     // w(rho, s), no cutoff
    ThetaCutoff theta;
    std::function<double(double)> stability;       // A(s; curly E^2), supp psi only

    complexd w_tilde(double rho, double s) const {
        const complexd v = w(rho, s);
        if (v.real() == 0.0 && v.imag() == 0.0) return v;
        return theta(rho * spectral.scale.h, s) * v;
    }
    std::size_t idx(std::size_t i_s, std::size_t j_rho) const {
        return i_s * rho_grid.size() + j_rho;
    }
};

struct Mode3D {
    int n = 0;
    CurvePtr curve;
    SpectralData spectral;
    std::function<complexd(double, double, double)> u;   // u(x, y, z)
};

struct Caustic {
    std::function<double(double)> rho_c;   // t_k / A(s; curly E^2)
    std::function<double(double)> r_c;     // h * rho_c
};

// ---------------------------------------------------------------------------
// WKB mode (no turning points).

inline Mode1D wkb_mode(const CurvePtr& curve, const ScaleParams& scale,
                       const SpectralData& spectral, int n_grid = 2048) {
    if (spectral.regime != Regime::NoTurningPoints)
        throw regime_error("wkb_mode: spectral data is not in the no-turning-point regime");
    const double L = curve->L();
    const double E2 = spectral.E2, E1 = spectral.E1, tk = spectral.t_k;
    const double eps = scale.epsilon, h = scale.h;

    auto sqrtv = [curve, scale, E2](double s) {
        return std::sqrt(-potential_v(*curve, scale, s, E2));
    };
    auto corr = [curve, scale, E2, E1, sqrtv](double s) {
        const double a = stability_a(*curve, scale, s, E2);
        return (E1 - a * a) / sqrtv(s);
    };

    // Cumulative phase tables; the residual slope of each is kept exactly so
    // the assembled phase is exact at s = 0 and s = L.
    const int n_tab = 2048;
    const double dx = L / n_tab;
    std::vector<double> p0(n_tab + 1), p1(n_tab + 1);
    p0[0] = p1[0] = 0.0;
    for (int i = 0; i < n_tab; ++i) {
        p0[i + 1] = p0[i] + quad::gl8(sqrtv, dx * i, dx * (i + 1));
        p1[i + 1] = p1[i] + quad::gl8(corr, dx * i, dx * (i + 1));
    }
    const double p0L = p0[n_tab], p1L = p1[n_tab];
    std::vector<double> p0per(n_tab + 1), p1per(n_tab + 1);
    for (int i = 0; i <= n_tab; ++i) {
        p0per[i] = p0[i] - p0L * (double)i / n_tab;
        p1per[i] = p1[i] - p1L * (double)i / n_tab;
    }
    p0per[n_tab] = p0per[0];
    p1per[n_tab] = p1per[0];
    auto sp0 = std::make_shared<CubicSpline>(0.0, dx, p0per, CubicSpline::Closure::Periodic);
    auto sp1 = std::make_shared<CubicSpline>(0.0, dx, p1per, CubicSpline::Closure::Periodic);

    const double v0 = potential_v(*curve, scale, 0.0, E2);
    const double nrm2 = quad::integrate([&](double s) {
        return std::sqrt(v0 / potential_v(*curve, scale, s, E2));
    }, 0.0, L, 1e-13);
    const double A0 = 1.0 / std::sqrt(nrm2);

    Mode1D mode;
    mode.regime = Regime::NoTurningPoints;
    mode.spectral = spectral;
    mode.A0 = A0;
    mode.L = L;
    mode.zeta.trivial = true;
    mode.psi = [=](double s) -> complexd {
        const double phi0 = (*sp0)(s) + p0L * s / L;
        const double phi1 = (*sp1)(s) + p1L * s / L;
        const double theta = (phi0 + 0.5 * h * tk * phi1) / eps;
        const double amp = std::pow(v0 / potential_v(*curve, scale, s, E2), 0.25);
        return A0 * amp * std::exp(complexd(0.0, theta));
    };
    mode.s_grid.resize(n_grid);
    mode.values.resize(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        mode.s_grid[i] = L * (double)i / n_grid;
        mode.values[i] = mode.psi(mode.s_grid[i]);
    }
    if (std::abs(mode.psi(L) - mode.psi(0.0)) > 1e-6)
        throw numeric_error("wkb_mode: periodicity defect above 1e-6 (quantization mismatch)");
    return mode;
}

// ---------------------------------------------------------------------------
// Uniform Airy branches between two turning points.

namespace detail {

/// One branch psi_± with its anchored cumulative tables in the tau = sqrt
/// variable; all endpoint square roots are removed analytically.  The three
/// Langer ingredients are cached on tau-splines (hybrid: exact quadrature
/// within a few cells of the anchor, spline beyond), which makes a branch
/// evaluation a couple of spline lookups plus one Airy call.
class TurningBranch {
public:
    TurningBranch(CurvePtr curve, const ScaleParams& scale, const SpectralData& sd, int side,
                  int ell = 3, double cover_frac = 0.85)
        : curve_(std::move(curve)), scale_(scale), side_(side), ell_(ell) {
        if (!sd.s_minus || !sd.s_plus)
            throw regime_error("TurningBranch: spectral data lacks turning points");
        E2_ = sd.E2;
        E1_ = sd.E1;
        sm_ = *sd.s_minus;
        sp_ = *sd.s_plus;
        anchor_ = side_ > 0 ? sp_ : sm_;
        kappa_sign_ = side_ > 0 ? 1.0 : (sd.indices.m % 2 == 0 ? 1.0 : -1.0);
        cover_ = cover_frac * (sp_ - sm_);
        tau_cov_ = std::sqrt(cover_);
        g1_pref_ = scale_.h * sd.t_k / (2.0 * scale_.epsilon);
        lam_pref_ = 1.5 / scale_.epsilon;
        up_anchor_ = std::abs(potential_u_prime(*curve_, scale_, anchor_));
        coef_ = extension_coefficients(ell_);
        build_tables();
    }

    int side() const { return side_; }
    double anchor() const { return anchor_; }
    double interior_limit() const { return side_ > 0 ? anchor_ - cover_ : anchor_ + cover_; }

    // Signed Airy argument; negative inside the well.
    double Lambda(double s) const { return lambda_tau(tau_of(s)); }
    double g1(double s) const {
        const double v = g1_pref_ * hcorr(tau_of(s));
        return side_ > 0 ? v : -v;
    }
    double R_ev(double s) const { return rev_tau(tau_of(s)); }
    double R_odd(double s) const { return rodd_tau(tau_of(s)); }

    /// Branch value; interior formula inside the well, ingredient extension
    /// in the collar beyond the anchor.
    double value(double s) const {
        const bool beyond = side_ > 0 ? (s > anchor_) : (s < anchor_);
        double lam, rev, rodd;
        if (!beyond) {
            const double tau = tau_of(s);
            lam = lambda_tau(tau);
            rev = rev_tau(tau);
            rodd = rodd_tau(tau);
        } else {
            lam = rev = rodd = 0.0;
            const double u = side_ > 0 ? s - anchor_ : anchor_ - s;
            for (int j = 1; j <= ell_; ++j) {
                const double tau_j = std::sqrt(j * u);
                if (tau_j > tau_cov_)
                    throw numeric_error("TurningBranch: collar too wide, reflected node "
                                        "leaves the covered interior (shrink delta)");
                lam += coef_[j - 1] * lambda_tau(tau_j);
                rev += coef_[j - 1] * rev_tau(tau_j);
                rodd += coef_[j - 1] * rodd_tau(tau_j);
            }
        }
        const AiryValue av = airy(lam);
        const double bracket = rev * av.ai - (side_ > 0 ? 1.0 : -1.0) * rodd * av.ai_prime;
        return kappa_sign_ * std::sqrt(2.0 * M_PI) * bracket;
    }

private:
    double tau_of(double s) const {
        const double u = side_ > 0 ? anchor_ - s : s - anchor_;
        const double tau = std::sqrt(std::max(u, 0.0));
        if (tau > tau_cov_ * (1.0 + 1e-12))
            throw numeric_error("TurningBranch: evaluation outside the covered range");
        return std::min(tau, tau_cov_);
    }

    double point_at(double sigma) const {
        return side_ > 0 ? anchor_ - sigma * sigma : anchor_ + sigma * sigma;
    }
    double offset_at(double sigma) const {
        return side_ > 0 ? -sigma * sigma : sigma * sigma;
    }

    double qfun(double sigma) const {
        if (sigma <= 0.0) return std::sqrt(up_anchor_);
        const double v =
            std::abs(potential_v_near_root(*curve_, scale_, anchor_, offset_at(sigma)));
        return std::sqrt(v) / sigma;
    }

    double act(double tau) const {    // int sqrt|V| from the anchor, tau variable
        const int i = std::min((int)(tau / dtau_), (int)gcum_.size() - 2);
        auto ig = [this](double sg) { return 2.0 * sg * sg * qfun(sg); };
        return gcum_[i] + quad::gl8(ig, dtau_ * i, tau);
    }

    double hcorr(double tau) const {  // int (E1 - A^2)/sqrt|V|, tau variable
        const int i = std::min((int)(tau / dtau_), (int)hcum_.size() - 2);
        auto ih = [this](double sg) {
            const double a = stability_a(*curve_, scale_, point_at(sg), E2_);
            return 2.0 * (E1_ - a * a) / qfun(sg);
        };
        return hcum_[i] + quad::gl8(ih, dtau_ * i, tau);
    }

    // Exact (quadrature-backed) ingredient values, used to build the value
    // splines and within the near-anchor window.
    double lambda_exact(double tau) const {
        return -std::pow(lam_pref_ * act(tau), 2.0 / 3.0);
    }
    double rev_exact(double tau) const {
        const double t = std::max(tau, 1e-9);
        const double v = potential_v_near_root(*curve_, scale_, anchor_, offset_at(t));
        const double g = side_ > 0 ? g1_pref_ * hcorr(t) : -g1_pref_ * hcorr(t);
        return std::pow(lambda_exact(t) / v, 0.25) * std::cos(g);
    }
    double rodd_exact(double tau) const {
        const double t = std::max(tau, 1e-9);
        const double v = potential_v_near_root(*curve_, scale_, anchor_, offset_at(t));
        const double g = side_ > 0 ? g1_pref_ * hcorr(t) : -g1_pref_ * hcorr(t);
        return std::sin(g) / std::pow(std::abs(lambda_exact(t) * v), 0.25);
    }

    double lambda_tau(double tau) const {
        if (tau < tau_exact_) return lambda_exact(tau);
        return tau * tau * lamhat_(tau);
    }
    double rev_tau(double tau) const {
        if (tau < tau_exact_) return rev_exact(tau);
        return rev_(tau);
    }
    double rodd_tau(double tau) const {
        if (tau < tau_exact_) return rodd_exact(tau);
        return rodd_(tau);
    }

    void build_tables() {
        const int M = 768;
        dtau_ = tau_cov_ / M;
        gcum_.assign(M + 1, 0.0);
        hcum_.assign(M + 1, 0.0);
        auto ig = [this](double sg) { return 2.0 * sg * sg * qfun(sg); };
        auto ih = [this](double sg) {
            const double a = stability_a(*curve_, scale_, point_at(sg), E2_);
            return 2.0 * (E1_ - a * a) / qfun(sg);
        };
        for (int i = 0; i < M; ++i) {
            gcum_[i + 1] = gcum_[i] + quad::gl8(ig, dtau_ * i, dtau_ * (i + 1));
            hcum_[i + 1] = hcum_[i] + quad::gl8(ih, dtau_ * i, dtau_ * (i + 1));
        }
        const int M2 = 1024;
        const double d2 = tau_cov_ / M2;
        tau_exact_ = 8.0 * d2;
        std::vector<double> lh(M2 + 1), re(M2 + 1), ro(M2 + 1);
        for (int i = 0; i <= M2; ++i) {
            const double tau = (i == 0) ? 1e-9 * tau_cov_ : d2 * i;
            lh[i] = lambda_exact(tau) / (tau * tau);
            re[i] = rev_exact(tau);
            ro[i] = rodd_exact(tau);
        }
        lamhat_ = CubicSpline(0.0, d2, lh, CubicSpline::Closure::Natural);
        rev_ = CubicSpline(0.0, d2, re, CubicSpline::Closure::Natural);
        rodd_ = CubicSpline(0.0, d2, ro, CubicSpline::Closure::Natural);
    }

    CurvePtr curve_;
    ScaleParams scale_;
    int side_;
    int ell_;
    double E2_ = 0.0, E1_ = 0.0, sm_ = 0.0, sp_ = 0.0, anchor_ = 0.0;
    double kappa_sign_ = 1.0, cover_ = 0.0, tau_cov_ = 0.0, dtau_ = 0.0;
    double g1_pref_ = 0.0, lam_pref_ = 0.0, up_anchor_ = 0.0, tau_exact_ = 0.0;
    std::vector<double> gcum_, hcum_;
    std::vector<double> coef_;
    CubicSpline lamhat_, rev_, rodd_;
};

} // namespace detail

/// psi_± restricted to the open well (s_-, s_+).  side = +1 or -1.
inline std::function<double(double)> airy_branch_psi(const CurvePtr& curve,
                                                     const ScaleParams& scale,
                                                     const SpectralData& spectral, int side) {
    auto br = std::make_shared<detail::TurningBranch>(curve, scale, spectral, side);
    return [br](double s) { return br->value(s); };
}

/// Glued, extended, cut-off and normalized turning-point mode.
inline Mode1D assemble_psi(const CurvePtr& curve, const ScaleParams& scale,
                           const SpectralData& spectral, double delta, int ell = 3,
                           int n_grid = 2048) {
    if (spectral.regime != Regime::TwoTurningPoints || !spectral.s_minus || !spectral.s_plus)
        throw regime_error("assemble_psi: spectral data is not in the turning-point regime");
    const double L = curve->L();
    const double sm = *spectral.s_minus, sp = *spectral.s_plus;
    const double width = sp - sm, mid = 0.5 * (sm + sp);
    if (!(delta > 0.0)) throw numeric_error("assemble_psi: delta must be positive");
    if (2.0 * delta * ell > 0.8 * width)
        throw numeric_error("assemble_psi: collar too wide (2 delta ell exceeds the well)");

    auto bp = std::make_shared<detail::TurningBranch>(curve, scale, spectral, +1, ell);
    auto bm = std::make_shared<detail::TurningBranch>(curve, scale, spectral, -1, ell);

    CutoffZeta zeta;
    zeta.p_lo = sm - delta;
    zeta.p_hi = sp + delta;
    zeta.w_lo = zeta.w_hi = delta;

    auto raw = [bp, bm, mid, delta](double s) -> double {
        if (s <= mid - delta) return bm->value(s);
        if (s >= mid + delta) return bp->value(s);
        const double t = smooth_step((s - (mid - delta)) / (2.0 * delta));
        return (1.0 - t) * bm->value(s) + t * bp->value(s);
    };
    auto unnorm = [raw, zeta, mid, L](double s) -> double {
        const double sw = mid + std::remainder(s - mid, L);
        const double z = zeta(sw);
        if (z == 0.0) return 0.0;
        return z * raw(sw);
    };

    // composite fixed-order rule: the integrand is oscillatory but smooth
    double nrm2 = 0.0;
    {
        const int cells = 3072;
        const double a = zeta.support_lo(), b = zeta.support_hi();
        for (int i = 0; i < cells; ++i)
            nrm2 += quad::gl8([&](double s) {
                const double v = unnorm(s);
                return v * v;
            }, a + (b - a) * i / cells, a + (b - a) * (i + 1) / cells);
    }
    const double A0 = 1.0 / std::sqrt(nrm2);

    Mode1D mode;
    mode.regime = Regime::TwoTurningPoints;
    mode.spectral = spectral;
    mode.A0 = A0;
    mode.delta = delta;
    mode.ell = ell;
    mode.zeta = zeta;
    mode.L = L;
    mode.psi = [unnorm, A0](double s) -> complexd { return complexd(A0 * unnorm(s), 0.0); };
    mode.s_grid.resize(n_grid);
    mode.values.resize(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        mode.s_grid[i] = L * (double)i / n_grid;
        mode.values[i] = mode.psi(mode.s_grid[i]);
    }
    return mode;
}

/// Default collar width: one tenth of the well.
inline double default_collar(const SpectralData& spectral) {
    return 0.1 * (*spectral.s_plus - *spectral.s_minus);
}

// ---------------------------------------------------------------------------
// Parabolic-cylinder simplification near a symmetric shallow well at s = 0.

inline std::pair<Mode1D, SpectralData> parabolic_mode(const CurvePtr& curve,
                                                      const ScaleParams& scale,
                                                      const ModeIndices& idx,
                                                      int n_grid = 2048) {
    idx.validate();
    const double L = curve->L();
    const double R = curve->R();
    if (curve->q2p(0.0) <= 0.0)
        throw geometry_error("parabolic_mode: geometry requires Q2'(0) > 0");
    if (std::abs(curve->q1p(0.0)) > 1e-8)
        throw geometry_error("parabolic_mode: geometry requires Q1'(0) = 0 (well centered at s = 0)");

    // q0, q2 from a 4th-order FD fit of Q1 near s = 0.
    const double d = 3e-3 * L;
    const double q0 = curve->q1(0.0);
    const double q1pp = (-curve->q1(2.0 * d) + 16.0 * curve->q1(d) - 30.0 * curve->q1(0.0) +
                         16.0 * curve->q1(-d) - curve->q1(-2.0 * d)) / (12.0 * d * d);
    const double q2c = -0.5 * q1pp;
    if (!(q2c > 0.0)) throw geometry_error("parabolic_mode: geometry requires q2 > 0");

    const double an2 = scale.a_n * scale.a_n;
    const double beta = 2.0 * q2c * an2 / std::pow(R + q0, 3);
    const double E2 = an2 / ((R + q0) * (R + q0)) +
                      scale.epsilon * ((double)idx.m + 0.5) * 2.0 * std::sqrt(beta);
    const double tk = airy_negative_root(idx.k).t;

    // A^2(0; E^2) and its s-derivative by central differences.
    auto a2 = [&](double s) {
        const double a = stability_a(*curve, scale, s, E2);
        return a * a;
    };
    const double E1 = a2(0.0);
    const double da = 1e-3 * L;
    const double a2_1 = (-a2(2.0 * da) + 8.0 * a2(da) - 8.0 * a2(-da) + a2(-2.0 * da)) / (12.0 * da);

    SpectralData sd;
    sd.scale = scale;
    sd.indices = idx;
    sd.t_k = tk;
    sd.E2 = E2;
    sd.E1 = E1;
    sd.curly_E2 = E2 + scale.h * tk * E1;
    sd.lambda2 = sd.curly_E2 / (scale.epsilon * scale.epsilon);
    const TurningInfo t = find_turning_points(*curve, scale, E2);
    sd.regime = t.regime;
    if (t.regime == Regime::TwoTurningPoints) {
        sd.s_minus = t.s_minus;
        sd.s_plus = t.s_plus;
        const double s_star = std::max(std::abs(std::remainder(t.s_minus, L)),
                                       std::abs(std::remainder(t.s_plus, L)));
        if (s_star > 5.0 * std::sqrt(scale.h))
            std::cerr << "parabolic_mode: warning, turning points not O(sqrt(h)) "
                         "(s* = " << s_star << ")\n";
    }

    const double arg_shift = scale.h * tk * a2_1 /
                             (std::sqrt(2.0) * std::sqrt(scale.epsilon) * std::pow(beta, 0.75));
    const double arg_scale = std::sqrt(2.0) * std::pow(beta, 0.25) / std::sqrt(scale.epsilon);
    const int m = idx.m;
    auto shape = [=](double s) {
        const double sw = std::remainder(s, L);
        return parabolic_cylinder_d(m, arg_scale * sw + arg_shift);
    };
    // The profile is a Gaussian-width ~ 1/arg_scale spike at s = 0; integrate
    // over the window where D_m is alive so the quadrature cannot miss it.
    const double w_arg = 2.0 * std::sqrt((double)m + 0.5) + 30.0;
    const double w = std::min(0.5 * L, (w_arg + std::abs(arg_shift)) / arg_scale);
    const double nrm2 = quad::integrate([&](double s) {
        const double v = shape(s);
        return v * v;
    }, -w, w, 1e-13);
    const double A0 = 1.0 / std::sqrt(nrm2);

    Mode1D mode;
    mode.regime = sd.regime;
    mode.spectral = sd;
    mode.A0 = A0;
    mode.L = L;
    mode.zeta.trivial = true;
    mode.psi = [shape, A0](double s) -> complexd { return complexd(A0 * shape(s), 0.0); };
    mode.s_grid.resize(n_grid);
    mode.values.resize(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        mode.s_grid[i] = L * (double)i / n_grid;
        mode.values[i] = mode.psi(mode.s_grid[i]);
    }
    return {mode, sd};
}

// ---------------------------------------------------------------------------
// Separation to the half-strip: w = chi_0 psi.

/// w(rho, s) = sqrt(A)/|Ai'(-t_k)| Ai(-t_k + rho A)
///             [ psi - sqrt(h) (i/2) rho^2 (A'/A) (-i eps psi') ].
/// A and A' are taken at the assembled spectral parameter curly E^2; psi' comes
/// from 4th-order central differences on the psi grid.
inline Mode2D build_mode2d(const CurvePtr& curve, const ScaleParams& scale,
                           const SpectralData& spectral, const Mode1D& mode1d,
                           int s_nodes = 2048, int rho_nodes = 512,
                           double rho_max_factor = 12.0) {
    const double L = curve->L();
    const double cE2 = spectral.curly_E2;
    const double tk = spectral.t_k;
    const double aipk = std::abs(airy_ai_prime(-tk));
    const double eps = scale.epsilon, h = scale.h;

    auto m1 = std::make_shared<Mode1D>(mode1d);

    // psi' on the mode grid (periodic 4th-order stencil), splined for reuse.
    const int n = (int)m1->values.size();
    const double ds = L / n;
    std::vector<double> dre(n + 1), dim(n + 1);
    for (int i = 0; i < n; ++i) {
        auto v = [&](int j) { return m1->values[((i + j) % n + n) % n]; };
        const complexd der = (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * ds);
        dre[i] = der.real();
        dim[i] = der.imag();
    }
    dre[n] = dre[0];
    dim[n] = dim[0];
    auto dpsi_re = std::make_shared<CubicSpline>(0.0, ds, dre, CubicSpline::Closure::Periodic);
    auto dpsi_im = std::make_shared<CubicSpline>(0.0, ds, dim, CubicSpline::Closure::Periodic);

    const double supp_lo = m1->zeta.support_lo(), supp_hi = m1->zeta.support_hi();
    auto in_support = [=](double s_wrapped, double mid) {
        const double sw = mid + std::remainder(s_wrapped - mid, L);
        return sw > supp_lo && sw < supp_hi;
    };
    const double mid = m1->zeta.trivial ? 0.0 : 0.5 * (supp_lo + supp_hi);

    auto stab = [curve, scale, cE2](double s) { return stability_a(*curve, scale, s, cE2); };
    const double dfd = 1e-4 * L;
    auto stab_prime = [curve, scale, cE2, dfd](double s) {
        auto a = [&](double x) { return stability_a(*curve, scale, x, cE2); };
        return (-a(s + 2.0 * dfd) + 8.0 * a(s + dfd) - 8.0 * a(s - dfd) + a(s - 2.0 * dfd)) /
               (12.0 * dfd);
    };

    // rho extent from the smallest stability value on the support.
    double min_a = 1e300;
    for (int i = 0; i <= 2048; ++i) {
        double s;
        if (m1->zeta.trivial) s = L * (double)i / 2048.0;
        else s = supp_lo + (supp_hi - supp_lo) * (double)i / 2048.0;
        min_a = std::min(min_a, stab(s));
    }
    const double rho_max = (tk + rho_max_factor) / min_a;

    Mode2D w2;
    w2.curve = curve;
    w2.spectral = spectral;
    w2.rho_max = rho_max;
    w2.stability = stab;
    w2.theta.trivial = true;
    w2.w = [=](double rho, double s) -> complexd {
        if (!m1->zeta.trivial && !in_support(s, mid)) return complexd(0.0, 0.0);
        const complexd psi = m1->psi(s);
        const double a = stab(s);
        const double ap = stab_prime(s);
        const complexd dpsi((*dpsi_re)(s), (*dpsi_im)(s));
        const complexd p_s = complexd(0.0, -eps) * dpsi;          // -i eps d/ds
        const complexd corr = psi - std::sqrt(h) * complexd(0.0, 0.5) * rho * rho * (ap / a) * p_s;
        const double chi = std::sqrt(a) / aipk * airy_ai(-tk + rho * a);
        return chi * corr;
    };

    w2.s_grid.resize(s_nodes);
    w2.rho_grid.resize(rho_nodes);
    for (int i = 0; i < s_nodes; ++i) w2.s_grid[i] = L * (double)i / s_nodes;
    for (int j = 0; j < rho_nodes; ++j)
        w2.rho_grid[j] = rho_max * (double)j / (rho_nodes - 1);
    w2.values.resize((std::size_t)s_nodes * rho_nodes);
    for (int i = 0; i < s_nodes; ++i) {
        const double s = w2.s_grid[i];
        if (!m1->zeta.trivial && !in_support(s, mid)) {
            for (int j = 0; j < rho_nodes; ++j) w2.values[w2.idx(i, j)] = complexd(0.0, 0.0);
            continue;
        }
        for (int j = 0; j < rho_nodes; ++j)
            w2.values[w2.idx(i, j)] = w2.w(w2.rho_grid[j], s);
    }
    return w2;
}

/// L2 norm of the sampled w over the half-strip (trapezoid in periodic s,
/// Simpson-type weights in rho).
inline double mode2d_norm(const Mode2D& w2) {
    const std::size_t ns = w2.s_grid.size(), nr = w2.rho_grid.size();
    const double ds = (ns > 1) ? (w2.s_grid[1] - w2.s_grid[0]) : 1.0;
    const double dr = w2.rho_grid[1] - w2.rho_grid[0];
    std::vector<double> wr(nr, 1.0);
    wr[0] = wr[nr - 1] = 0.5;   // trapezoid tail; integrand vanishes there anyway
    double acc = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nr; ++j)
            acc += wr[j] * std::norm(w2.values[w2.idx(i, j)]);
    return std::sqrt(acc * ds * dr);
}

/// Multiplies by the smooth localization cutoff theta(r, s) and verifies the
/// norm moved by at most norm_tol (relative).  At large h the Airy layer can
/// be thicker than the chart reach 1/k near high-curvature boundary arcs, in
/// which case no admissible C_loc retains 1e-6 of the mass; callers doing
/// h-sweeps pass a looser tolerance.
inline Mode2D cutoff_localize(const Mode2D& mode2d, double C_loc = 2.0, double norm_tol = 1e-6) {
    if (!(C_loc > 0.0)) throw numeric_error("cutoff_localize: C_loc must be positive");
    Mode2D out = mode2d;
    out.C_loc = C_loc;
    out.localized = true;
    out.theta.curve = mode2d.curve;
    out.theta.sqrt_h = std::sqrt(mode2d.spectral.scale.h);
    out.theta.C = C_loc;
    out.theta.trivial = false;
    const double h = mode2d.spectral.scale.h;
    const std::size_t ns = out.s_grid.size(), nr = out.rho_grid.size();
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nr; ++j) {
            complexd& v = out.values[out.idx(i, j)];
            if (v.real() != 0.0 || v.imag() != 0.0)
                v *= out.theta(out.rho_grid[j] * h, out.s_grid[i]);
        }
    const double n0 = mode2d_norm(mode2d), n1 = mode2d_norm(out);
    if (std::abs(n1 - n0) > norm_tol * n0)
        throw numeric_error("cutoff_localize: cutoff changed the norm by more than the "
                            "tolerance (increase C_loc)");
    return out;
}

// ---------------------------------------------------------------------------
// 3-D lift.

/// u(x,y,z) = e^{i n alpha} w~(r/h, s) / sqrt(2 pi h (1 - r k) X) inside the
/// chart region, 0 elsewhere.  The 1/sqrt(2 pi h) factor normalizes
/// ||u||_{L2(T)} to ||w~||_{L2(Pi)} = 1 + O(h).
inline Mode3D build_mode3d(const CurvePtr& curve, const Mode2D& mode2d, int n) {
    if (!mode2d.localized)
        throw numeric_error("build_mode3d: apply cutoff_localize to the 2-D mode first");
    auto m2 = std::make_shared<Mode2D>(mode2d);
    const double h = mode2d.spectral.scale.h;
    const double norm3 = 1.0 / std::sqrt(2.0 * M_PI * h);

    Mode3D u3;
    u3.n = n;
    u3.curve = curve;
    u3.spectral = mode2d.spectral;
    u3.u = [curve, m2, n, h, norm3](double x, double y, double z) -> complexd {
        const double xi = std::hypot(x, y);
        const double alpha = std::atan2(x, y);   // x = X sin(alpha), y = X cos(alpha)
        double r, s;
        if (!curve->project(xi, z, r, s)) return complexd(0.0, 0.0);
        if (r < 0.0) return complexd(0.0, 0.0);                       // outside the body
        const double k = curve->kappa(s);
        if (r * k >= 1.0) return complexd(0.0, 0.0);                  // beyond the chart
        const complexd wt = m2->w_tilde(r / h, s);
        if (wt.real() == 0.0 && wt.imag() == 0.0) return complexd(0.0, 0.0);
        const double X = curve->chart(r, s).X;
        const complexd phase = std::exp(complexd(0.0, n * alpha));
        return phase * wt * norm3 / std::sqrt((1.0 - r * k) * X);
    };
    return u3;
}

// ---------------------------------------------------------------------------
// Caustic of the reduced dynamics.

inline Caustic caustic_curve(const CurvePtr& curve, const ScaleParams& scale,
                             const SpectralData& spectral) {
    const double tk = spectral.t_k;
    const double cE2 = spectral.curly_E2;
    const double h = scale.h;
    Caustic c;
    c.rho_c = [curve, scale, cE2, tk](double s) {
        return tk / stability_a(*curve, scale, s, cE2);
    };
    c.r_c = [rc = c.rho_c, h](double s) { return h * rc(s); };
    return c;
}

} // namespace wgtorus

#endif
