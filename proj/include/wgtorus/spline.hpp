#ifndef WGTORUS_SPLINE_HPP
#define WGTORUS_SPLINE_HPP

// Cubic splines on uniform grids, natural or periodic closure.

#include <cmath>
#include <cstddef>
#include <vector>

#include "wgtorus/errors.hpp"

namespace wgtorus {

class CubicSpline {
public:
    enum class Closure { Natural, Periodic };

    CubicSpline() = default;

    // y has n+1 values on x_i = x0 + i*dx, i = 0..n.  For periodic closure the
    // caller supplies y[n] = y[0] (checked loosely).
    CubicSpline(double x0, double dx, std::vector<double> y, Closure closure)
        : x0_(x0), dx_(dx), y_(std::move(y)), closure_(closure) {
        const std::size_t n = y_.size() - 1;
        if (y_.size() < 4) throw numeric_error("CubicSpline: need at least 4 nodes");
        m_.assign(n + 1, 0.0);
        if (closure_ == Closure::Natural) solve_natural();
        else solve_periodic();
    }

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * (y_.size() - 1); }

    double operator()(double x) const {
        double t;
        const std::size_t i = locate(x, t);
        const double h = dx_;
        const double a = y_[i], b = y_[i + 1];
        const double ma = m_[i], mb = m_[i + 1];
        const double u = 1.0 - t;
        return u * a + t * b +
               h * h / 6.0 * (u * (u * u - 1.0) * ma + t * (t * t - 1.0) * mb);
    }

    double deriv(double x) const {
        double t;
        const std::size_t i = locate(x, t);
        const double h = dx_;
        const double a = y_[i], b = y_[i + 1];
        const double ma = m_[i], mb = m_[i + 1];
        const double u = 1.0 - t;
        return (b - a) / h + h / 6.0 * ((3.0 * t * t - 1.0) * mb - (3.0 * u * u - 1.0) * ma);
    }

    double deriv2(double x) const {
        double t;
        const std::size_t i = locate(x, t);
        return (1.0 - t) * m_[i] + t * m_[i + 1];
    }

private:
    std::size_t locate(double x, double& t) const {
        const std::size_t n = y_.size() - 1;
        double u = (x - x0_) / dx_;
        if (closure_ == Closure::Periodic) {
            u = std::fmod(u, (double)n);
            if (u < 0.0) u += (double)n;
        } else {
            if (u < 0.0) u = 0.0;
            if (u > (double)n) u = (double)n;
        }
        std::size_t i = (std::size_t)u;
        if (i >= n) i = n - 1;
        t = u - (double)i;
        return i;
    }

    void solve_natural() {
        const std::size_t n = y_.size() - 1;
        // Tridiagonal system for the moments, natural BC m_0 = m_n = 0.
        std::vector<double> c(n + 1, 0.0), d(n + 1, 0.0);
        for (std::size_t i = 1; i < n; ++i)
            d[i] = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
        // Thomas algorithm with diag 4, off-diag 1.
        std::vector<double> cp(n + 1, 0.0), dp(n + 1, 0.0);
        double beta = 4.0;
        cp[1] = 1.0 / beta;
        dp[1] = d[1] / beta;
        for (std::size_t i = 2; i < n; ++i) {
            beta = 4.0 - cp[i - 1];
            cp[i] = 1.0 / beta;
            dp[i] = (d[i] - dp[i - 1]) / beta;
        }
        for (std::size_t i = n - 1; i >= 1; --i) {
            m_[i] = dp[i] - cp[i] * m_[i + 1];
            if (i == 1) break;
        }
        (void)c;
    }

    void solve_periodic() {
        const std::size_t n = y_.size() - 1;
        // Cyclic tridiagonal (diag 4, off 1) via Sherman-Morrison.
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ym = y_[(i + n - 1) % n];
            const double yp = y_[(i + 1) % n];
            d[i] = 6.0 * (yp - 2.0 * y_[i] + ym) / (dx_ * dx_);
        }
        const double gamma = -4.0;
        std::vector<double> u(n, 0.0);
        u[0] = gamma;
        u[n - 1] = 1.0;
        auto solve_tri = [&](const std::vector<double>& rhs) {
            // modified diagonal: b0 = 4 - gamma, bn-1 = 4 - 1/gamma, inner 4
            std::vector<double> x(n), cp(n), b(n, 4.0);
            b[0] -= gamma;
            b[n - 1] -= 1.0 / gamma;
            cp[0] = 1.0 / b[0];
            x[0] = rhs[0] / b[0];
            for (std::size_t i = 1; i < n; ++i) {
                const double m = b[i] - cp[i - 1];
                cp[i] = 1.0 / m;
                x[i] = (rhs[i] - x[i - 1]) / m;
            }
            for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
            return x;
        };
        const std::vector<double> z = solve_tri(d);
        const std::vector<double> q = solve_tri(u);
        const double vz = z[0] + z[n - 1] / gamma;
        const double vq = 1.0 + q[0] + q[n - 1] / gamma;
        for (std::size_t i = 0; i < n; ++i) m_[i] = z[i] - q[i] * vz / vq;
        m_[n] = m_[0];
    }

    double x0_ = 0.0, dx_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;   // second derivatives at nodes
    Closure closure_ = Closure::Natural;
};

} // namespace wgtorus

#endif
