#ifndef WGTORUS_GEOMETRY_HPP
#define WGTORUS_GEOMETRY_HPP

// Generating curve S of a solid torus of revolution, built from an L-periodic
// curvature profile k(s):
//   a(s)  = int_0^s k - phase,   Q1(s) = int_0^s cos a,   Q2(s) = int_0^s sin a,
//   boundary (x, z) = (R + Q1(s), Q2(s)), inner normal (-Q2', Q1').
// Chart near the boundary:
//   X(r,s) = (R + Q1) - r Q2',  Z(r,s) = Q2 + r Q1',  J = (1 - r k) X,
// valid for r < 1/k(s).  Cumulative integrals are cached on a dense uniform
// grid (default 4096 nodes) with cubic-spline interpolation; tangent data
// comes from a(s) directly, so the curve is unit-speed by construction.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgtorus/errors.hpp"
#include "wgtorus/quadrature.hpp"
#include "wgtorus/spline.hpp"

namespace wgtorus {

struct CurvatureProfile {
    double L = 2.0 * M_PI;
    std::function<double(double)> kappa;         // L-periodic curvature, > 0
    std::function<double(double)> kappa_prime;   // optional analytic derivative
    double tangent_phase = 0.0;                  // a(s) = int_0^s kappa - tangent_phase
    std::optional<double> gamma;                 // raw-shape normalization integral
};

namespace detail {
inline double wrap_period(double s, double L) {
    double r = std::fmod(s, L);
    if (r < 0.0) r += L;
    return r;
}
} // namespace detail

/// Equilateral-triangle-with-rounded-wedges profile: f(s) is a sum of four
/// Gaussians of width sigma centered at 0, L/3, 2L/3, L, and
/// k(s) = (2 pi / gamma) f(s) with gamma = int_0^L f, so total turning is 2 pi.
inline CurvatureProfile triangle_profile(double sigma, double L) {
    if (!(sigma > 0.0)) throw numeric_error("triangle_profile: sigma must be positive");
    if (!(L > 0.0)) throw numeric_error("triangle_profile: L must be positive");
    const double c1 = L / 3.0, c2 = 2.0 * L / 3.0;
    auto f = [=](double s) {
        s = detail::wrap_period(s, L);
        const double a0 = s / sigma, a1 = (s - c1) / sigma, a2 = (s - c2) / sigma,
                     a3 = (s - L) / sigma;
        return std::exp(-a0 * a0) + std::exp(-a1 * a1) + std::exp(-a2 * a2) + std::exp(-a3 * a3);
    };
    auto fp = [=](double s) {
        s = detail::wrap_period(s, L);
        const double i2 = 1.0 / (sigma * sigma);
        const double d0 = s, d1 = s - c1, d2 = s - c2, d3 = s - L;
        return -2.0 * i2 * (d0 * std::exp(-d0 * d0 * i2) + d1 * std::exp(-d1 * d1 * i2) +
                            d2 * std::exp(-d2 * d2 * i2) + d3 * std::exp(-d3 * d3 * i2));
    };
    const double gamma = quad::integrate(f, 0.0, L, 1e-12);
    const double scale = 2.0 * M_PI / gamma;
    CurvatureProfile p;
    p.L = L;
    p.kappa = [=](double s) { return scale * f(s); };
    p.kappa_prime = [=](double s) { return scale * fp(s); };
    p.tangent_phase = gamma;
    p.gamma = gamma;
    return p;
}

/// Constant-curvature profile (circle of radius L / 2 pi).  The optional phase
/// rotates the tangent; phase = -pi/2 puts the outermost point at s = 0.
inline CurvatureProfile circle_profile(double L, double phase = 0.0) {
    if (!(L > 0.0)) throw numeric_error("circle_profile: L must be positive");
    CurvatureProfile p;
    p.L = L;
    const double k0 = 2.0 * M_PI / L;
    p.kappa = [k0](double) { return k0; };
    p.kappa_prime = [](double) { return 0.0; };
    p.tangent_phase = phase;
    return p;
}

/// Profile from uniformly spaced samples (s_i, k_i), s_i = i L / n, i = 0..n-1.
/// The table is renormalized so the total turning is exactly 2 pi; tables more
/// than 0.1% away from that are rejected.
inline CurvatureProfile tabulated_profile(const std::vector<std::pair<double, double>>& rows,
                                          double L, double phase = 0.0) {
    if (rows.size() < 8) throw numeric_error("tabulated_profile: need at least 8 rows");
    const std::size_t n = rows.size();
    const double dx = L / (double)n;
    std::vector<double> k(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(rows[i].first - dx * (double)i) > 1e-9 * L)
            throw numeric_error("tabulated_profile: samples must be uniform over [0, L)");
        if (!(rows[i].second > 0.0))
            throw numeric_error("tabulated_profile: curvature must be positive");
        k[i] = rows[i].second;
    }
    k[n] = k[0];
    auto spl = std::make_shared<CubicSpline>(0.0, dx, k, CubicSpline::Closure::Periodic);
    const double turn = quad::integrate([&](double s) { return (*spl)(s); }, 0.0, L, 1e-12);
    if (std::abs(turn - 2.0 * M_PI) > 1e-3 * 2.0 * M_PI)
        throw numeric_error("tabulated_profile: total turning deviates from 2 pi by more than 0.1%");
    const double scale = 2.0 * M_PI / turn;
    CurvatureProfile p;
    p.L = L;
    p.kappa = [spl, scale](double s) { return scale * (*spl)(s); };
    p.kappa_prime = [spl, scale](double s) { return scale * spl->deriv(s); };
    p.tangent_phase = phase;
    return p;
}

struct ChartPoint {
    double r = 0.0;
    double s = 0.0;
    double alpha = 0.0;
    double X = 0.0;       // distance from the rotation axis
    double Z = 0.0;
    double J = 0.0;       // (1 - r k) X
    double h_s = 0.0;     // 1 - r k(s)
    bool valid = false;   // r < 1/k(s)
};

class MeridianCurve {
public:
    MeridianCurve(CurvatureProfile profile, double R, int grid_n = 4096)
        : prof_(std::move(profile)), R_(R), n_(grid_n) {
        if (!(R > 0.0)) throw geometry_error("MeridianCurve: R must be positive");
        if (n_ < 64) throw geometry_error("MeridianCurve: grid too coarse");
        build();
    }

    double L() const { return prof_.L; }
    double R() const { return R_; }
    int grid_size() const { return n_; }
    const CurvatureProfile& profile() const { return prof_; }

    double kappa(double s) const { return prof_.kappa(detail::wrap_period(s, prof_.L)); }
    double kappa_prime(double s) const {
        if (prof_.kappa_prime) return prof_.kappa_prime(detail::wrap_period(s, prof_.L));
        const double d = prof_.L * 1e-6;
        return (kappa(s + d) - kappa(s - d)) / (2.0 * d);
    }

    /// Turning angle a(s) = int_0^s k - phase (increases by 2 pi per period).
    double turn_angle(double s) const {
        return k_per_(s) + two_pi_over_L_ * s - prof_.tangent_phase;
    }

    double q1(double s) const { return q1_(s); }
    double q2(double s) const { return q2_(s); }
    double q1p(double s) const { return std::cos(turn_angle(s)); }
    double q2p(double s) const { return std::sin(turn_angle(s)); }
    double q1pp(double s) const { return -std::sin(turn_angle(s)) * kappa(s); }
    double q2pp(double s) const { return std::cos(turn_angle(s)) * kappa(s); }

    /// Boundary radius X(0, s) = R + Q1(s).
    double X0(double s) const { return R_ + q1_(s); }

    ChartPoint chart(double r, double s, double alpha = 0.0) const {
        ChartPoint p;
        p.r = r;
        p.s = detail::wrap_period(s, prof_.L);
        p.alpha = alpha;
        const double k = kappa(s);
        p.X = (R_ + q1_(s)) - r * q2p(s);
        p.Z = q2_(s) + r * q1p(s);
        p.h_s = 1.0 - r * k;
        p.J = p.h_s * p.X;
        p.valid = r < 1.0 / k;
        return p;
    }

    double closure_defect() const { return closure_defect_; }

    /// Signed normal projection of a meridian-plane point (xi, z): returns
    /// (r, s) with r > 0 inside the domain.  False when Newton fails.
    bool project(double xi, double z, double& r, double& s) const {
        const double L = prof_.L;
        double phi = std::atan2(z - zc_, xi - xc_);
        if (phi < phi_[0]) phi += 2.0 * M_PI;
        const auto it = std::upper_bound(phi_.begin(), phi_.end(), phi);
        std::size_t i = (it == phi_.begin()) ? 0 : (std::size_t)(it - phi_.begin() - 1);
        double sc = dx_ * (double)i;
        const double f_tol = 1e-13 * (1.0 + std::abs(xi) + std::abs(z));
        auto newton = [&](double& scur) -> bool {
            for (int iter = 0; iter < 60; ++iter) {
                const double ca = q1p(scur), sa = q2p(scur);
                const double ex = xi - (R_ + q1_(scur));
                const double ez = z - q2_(scur);
                const double F = ex * ca + ez * sa;             // tangential misfit
                const double rr = -ex * sa + ez * ca;           // signed normal depth
                if (std::abs(F) < f_tol) {
                    r = rr;
                    s = detail::wrap_period(scur, L);
                    return true;
                }
                const double Fp = -(1.0 - rr * kappa(scur));
                if (std::abs(Fp) < 1e-12) return false;
                scur += std::clamp(-F / Fp, -0.2 * L, 0.2 * L);
            }
            return false;
        };
        if (newton(sc)) return true;
        // fall back to the global nearest grid node plus bisection on the
        // tangential misfit (robust for deep interior points)
        std::size_t best = 0;
        double best_d = 1e300;
        for (int j = 0; j < n_; ++j) {
            const double dxq = xi - (R_ + q1_(dx_ * j));
            const double dzq = z - q2_(dx_ * j);
            const double d = dxq * dxq + dzq * dzq;
            if (d < best_d) { best_d = d; best = (std::size_t)j; }
        }
        auto misfit = [&](double sv) {
            return (xi - (R_ + q1_(sv))) * q1p(sv) + (z - q2_(sv)) * q2p(sv);
        };
        double lo = dx_ * ((double)best - 1.0), hi = dx_ * ((double)best + 1.0);
        double flo = misfit(lo);
        if (flo * misfit(hi) > 0.0) {
            sc = dx_ * (double)best;
            return newton(sc);
        }
        for (int iter = 0; iter < 200; ++iter) {
            const double m = 0.5 * (lo + hi);
            const double fm = misfit(m);
            if (flo * fm <= 0.0) hi = m; else { lo = m; flo = fm; }
            if (hi - lo < 1e-15 * L) break;
        }
        sc = 0.5 * (lo + hi);
        {
            const double ca = q1p(sc), sa = q2p(sc);
            const double ex = xi - (R_ + q1_(sc));
            const double ez = z - q2_(sc);
            if (std::abs(ex * ca + ez * sa) > 1e4 * f_tol) return false;
            r = -ex * sa + ez * ca;
            s = detail::wrap_period(sc, L);
        }
        return true;
    }

    /// Chart inversion restricted to the chart region Pi_m (0 <= r < 1/k).
    std::pair<double, double> invert(double xi, double z) const {
        double r, s;
        if (!project(xi, z, r, s))
            throw geometry_error("invert_chart: projection did not converge");
        if (r < -1e-10) throw geometry_error("invert_chart: point outside the domain");
        if (r >= 1.0 / kappa(s)) throw geometry_error("invert_chart: point beyond the focal set");
        return {std::max(r, 0.0), s};
    }

    /// Loose bounding data for ray marching.
    double diameter() const { return diameter_; }

private:
    void build() {
        const double L = prof_.L;
        dx_ = L / (double)n_;
        two_pi_over_L_ = 2.0 * M_PI / L;

        // Cumulative curvature on the grid; K(s) - (2 pi / L) s is periodic.
        std::vector<double> kc(n_ + 1);
        kc[0] = 0.0;
        for (int i = 0; i < n_; ++i)
            kc[i + 1] = kc[i] + quad::gl8(prof_.kappa, dx_ * i, dx_ * (i + 1));
        const double turn = kc[n_];
        if (std::abs(turn - 2.0 * M_PI) > 1e-8)
            throw geometry_error("build_curve: total turning differs from 2 pi");
        std::vector<double> kper(n_ + 1);
        for (int i = 0; i <= n_; ++i) kper[i] = kc[i] - two_pi_over_L_ * dx_ * i;
        kper[n_] = kper[0];
        k_per_ = CubicSpline(0.0, dx_, kper, CubicSpline::Closure::Periodic);

        auto ca = [this](double s) { return std::cos(turn_angle(s)); };
        auto sa = [this](double s) { return std::sin(turn_angle(s)); };
        std::vector<double> q1(n_ + 1), q2(n_ + 1);
        q1[0] = q2[0] = 0.0;
        for (int i = 0; i < n_; ++i) {
            q1[i + 1] = q1[i] + quad::gl8(ca, dx_ * i, dx_ * (i + 1));
            q2[i + 1] = q2[i] + quad::gl8(sa, dx_ * i, dx_ * (i + 1));
        }
        closure_defect_ = std::abs(q1[n_] - q1[0]) + std::abs(q2[n_] - q2[0]);
        if (closure_defect_ > 1e-6)
            throw geometry_error("build_curve: curve does not close (defect " +
                                 std::to_string(closure_defect_) + ")");
        q1[n_] = q1[0];
        q2[n_] = q2[0];
        q1_ = CubicSpline(0.0, dx_, q1, CubicSpline::Closure::Periodic);
        q2_ = CubicSpline(0.0, dx_, q2, CubicSpline::Closure::Periodic);

        double xmin = 1e300, xmax = -1e300, zmin = 1e300, zmax = -1e300;
        xc_ = zc_ = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double x = R_ + q1[i], z = q2[i];
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            zmin = std::min(zmin, z); zmax = std::max(zmax, z);
            xc_ += x; zc_ += z;
        }
        xc_ /= n_; zc_ /= n_;
        if (xmin <= 0.0)
            throw geometry_error("build_curve: curve crosses the rotation axis (R too small)");
        diameter_ = std::hypot(xmax - xmin, zmax - zmin);

        // Node angles around the centroid, unwrapped to a monotone sequence.
        phi_.resize(n_);
        double prev = std::atan2(q2[0] - zc_, R_ + q1[0] - xc_);
        phi_[0] = prev;
        for (int i = 1; i < n_; ++i) {
            double p = std::atan2(q2[i] - zc_, R_ + q1[i] - xc_);
            while (p < prev) p += 2.0 * M_PI;
            phi_[i] = p;
            prev = p;
        }
    }

    CurvatureProfile prof_;
    double R_;
    int n_;
    double dx_ = 0.0, two_pi_over_L_ = 0.0;
    CubicSpline k_per_, q1_, q2_;
    double closure_defect_ = 0.0;
    double xc_ = 0.0, zc_ = 0.0, diameter_ = 0.0;
    std::vector<double> phi_;
};

/// Free-function faces of the curve operations.
inline MeridianCurve build_curve(const CurvatureProfile& profile, double R, int grid_n = 4096) {
    return MeridianCurve(profile, R, grid_n);
}

inline ChartPoint eval_chart(const MeridianCurve& curve, double r, double s, double alpha = 0.0) {
    return curve.chart(r, s, alpha);
}

inline std::pair<double, double> invert_chart(const MeridianCurve& curve, double xi, double z) {
    return curve.invert(xi, z);
}

} // namespace wgtorus

#endif
