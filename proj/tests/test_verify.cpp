#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "wgtorus/modes.hpp"
#include "wgtorus/verify.hpp"

using namespace wgtorus;

namespace {
const double kTwoPi = 2.0 * M_PI;

CurvePtr triangle_curve() {
    static CurvePtr c = std::make_shared<const MeridianCurve>(triangle_profile(0.4, kTwoPi), 3.0);
    return c;
}
} // namespace

TEST_CASE("scaling fit recovers a power law", "[verify]") {
    std::vector<std::pair<double, double>> pts;
    for (double h : {0.04, 0.03, 0.02, 0.015, 0.01})
        pts.emplace_back(h, 3.7 * std::pow(h, 2.31));
    const ScalingFit f = fit_loglog(pts);
    CHECK(f.fitted_order == Approx(2.31).margin(1e-12));
    CHECK(f.r_squared == Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(fit_loglog({{1.0, 1.0}, {2.0, 2.0}}), numeric_error);
}

TEST_CASE("residual operators annihilate the zero field", "[verify]") {
    auto curve = triangle_curve();
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    SpectralData sd = assemble_spectrum(*curve, sc, ModeIndices{1500, 2, 5});
    Mode1D zero;
    zero.regime = Regime::TwoTurningPoints;
    zero.spectral = sd;
    zero.L = kTwoPi;
    zero.zeta.trivial = false;
    zero.zeta.p_lo = 1.0; zero.zeta.p_hi = 1.1; zero.zeta.w_lo = zero.zeta.w_hi = 0.05;
    zero.psi = [](double) { return complexd(0.0, 0.0); };
    const ResidualReport rep = apply_l0(*curve, sc, sd, zero, 512);
    CHECK(rep.l2_norm == 0.0);
}

TEST_CASE("circle WKB mode is an exact discrete eigenfunction", "[verify]") {
    auto curve = std::make_shared<const MeridianCurve>(circle_profile(kTwoPi), 3.0);
    ScaleParams sc = ScaleParams::from_h(0.015, 0.0);
    const SpectralData sd = assemble_spectrum(*curve, sc, ModeIndices{1, 2, 5});
    const Mode1D m = wkb_mode(curve, sc, sd, 1024);
    const ResidualReport rep = apply_l0(*curve, sc, sd, m, 1024);
    CHECK(rep.l2_norm <= 1e-10);
}

TEST_CASE("triangle 1-D residual: grid convergence and h-order", "[verify]") {
    auto curve = triangle_curve();
    const double a_n_fixed = 1500.0 * std::pow(0.015, 1.5);
    std::vector<std::pair<double, double>> pts;
    for (double h : {0.04, 0.03, 0.02, 0.015}) {
        ScaleParams sc = ScaleParams::from_h(h, 1.0);
        sc.a_n = a_n_fixed;
        ModeIndices idx{(int)std::lround(a_n_fixed / sc.epsilon), 2, 5};
        const SpectralData sd = assemble_spectrum(*curve, sc, idx);
        const Mode1D m = assemble_psi(curve, sc, sd, default_collar(sd), 3, 2048);
        const bool audit = h == 0.015;
        const ResidualReport rep = apply_l0(*curve, sc, sd, m, 2048, audit);
        if (audit) {
            CHECK(rep.convergence_checked);
            CHECK(rep.grid_converged);
        }
        pts.emplace_back(h, rep.l2_norm);
    }
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].second < pts[i - 1].second);
    const ScalingFit f = fit_loglog(pts);
    CHECK(f.fitted_order >= 1.7);
    CHECK(f.r_squared >= 0.98);
}

TEST_CASE("reference-run residuals pinned as regression baselines", "[verify]") {
    auto curve = triangle_curve();
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    const SpectralData sd = assemble_spectrum(*curve, sc, ModeIndices{1500, 2, 5});
    const Mode1D m1 = assemble_psi(curve, sc, sd, default_collar(sd), 3, 2048);
    const Mode2D w2 = build_mode2d(curve, sc, sd, m1, 2048, 512, 12.0);
    // first computed values at the default grids, frozen
    CHECK(apply_l0(*curve, sc, sd, m1, 2048).l2_norm ==
          Approx(1.2486465729e-03).epsilon(0.05));
    CHECK(apply_h_2d(*curve, sc, sd, w2).l2_norm ==
          Approx(5.2659938809e-03).epsilon(0.05));
}

TEST_CASE("2-D residual operators annihilate the zero field", "[verify]") {
    auto curve = triangle_curve();
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    const SpectralData sd = assemble_spectrum(*curve, sc, ModeIndices{1500, 2, 5});
    Mode2D zero;
    zero.curve = curve;
    zero.spectral = sd;
    zero.rho_max = 20.0;
    zero.localized = true;
    zero.theta.trivial = true;
    const int ns = 256, nr = 64;
    zero.s_grid.resize(ns);
    zero.rho_grid.resize(nr);
    for (int i = 0; i < ns; ++i) zero.s_grid[i] = 2.0 * M_PI * i / ns;
    for (int j = 0; j < nr; ++j) zero.rho_grid[j] = zero.rho_max * j / (nr - 1.0);
    zero.values.assign((std::size_t)ns * nr, complexd(0.0, 0.0));
    zero.w = [](double, double) { return complexd(0.0, 0.0); };
    CHECK(apply_h_2d(*curve, sc, sd, zero).l2_norm == 0.0);
    CHECK(apply_delta2(*curve, sc, sd, zero, 64).l2_norm == 0.0);
}

TEST_CASE("oracle cross-checks the periodic quantization rule", "[verify]") {
    // circle generator with a genuine (nonconstant) potential, WKB regime
    auto curve = std::make_shared<const MeridianCurve>(circle_profile(2.0 * M_PI), 3.0);
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    const SpectralData sd = assemble_spectrum(*curve, sc, ModeIndices{1500, 2, 750},
                                              RegimeChoice::Periodic);
    REQUIRE(sd.regime == Regime::NoTurningPoints);
    const double ev = fd_oracle_1d(*curve, sc, ModeIndices{1500, 2, 750}, sd, 2048);
    CHECK(std::abs(ev - sd.curly_E2) / sd.curly_E2 <= 1e-3);
}

TEST_CASE("FD operators are symmetric on periodic grids", "[verify]") {
    // <O f, g> = <f, O g> for the 4th-order periodic second difference
    const int n = 256;
    const double dx = kTwoPi / n;
    std::mt19937 rng(777u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> fv(n), gv(n);
    for (int i = 0; i < n; ++i) { fv[i] = uni(rng); gv[i] = uni(rng); }
    const std::vector<double> Of = detail::d2_periodic(fv, dx);
    const std::vector<double> Og = detail::d2_periodic(gv, dx);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) { a += Of[i] * gv[i]; b += fv[i] * Og[i]; }
    CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + 1.0));
}

TEST_CASE("oracle matches the constant-coefficient circle exactly", "[verify]") {
    auto curve = std::make_shared<const MeridianCurve>(circle_profile(kTwoPi), 3.0);
    ScaleParams sc = ScaleParams::from_h(0.015, 0.0);
    const ModeIndices idx{1, 2, 5};
    const SpectralData sd = assemble_spectrum(*curve, sc, idx);
    const double ev = fd_oracle_1d(*curve, sc, idx, sd, 1024);
    CHECK(std::abs(ev - sd.curly_E2) <= 1e-10);
}

TEST_CASE("oracle against the triangle spectral assembly", "[verify]") {
    auto curve = triangle_curve();
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    const ModeIndices idx{1500, 2, 5};
    const SpectralData sd = assemble_spectrum(*curve, sc, idx);
    const double ev = fd_oracle_1d(*curve, sc, idx, sd, 2048);
    // second-order remainder of the two-term expansion (C ~ 3 h^2 units)
    CHECK(std::abs(ev - sd.curly_E2) / sd.curly_E2 <= 2.5e-3);
}

TEST_CASE("consecutive oracle levels bracket no intruder", "[verify]") {
    // within one frozen operator: the m- and (m+1)-indexed levels must be
    // consecutive in the Sturm count
    auto curve = triangle_curve();
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    const SpectralData s5 = assemble_spectrum(*curve, sc, ModeIndices{1500, 2, 5});
    SpectralData s6 = s5;   // same frozen coefficient, next quantum index
    s6.indices.m = 6;
    const double e5 = fd_oracle_1d(*curve, sc, ModeIndices{1500, 2, 5}, s5, 2048, false);
    const double e6 = fd_oracle_1d(*curve, sc, ModeIndices{1500, 2, 6}, s6, 2048, false);
    REQUIRE(e5 < e6);
    // Sturm count on a Dirichlet window around the well
    const double a = *s5.s_minus - 1.2, b = *s5.s_plus + 1.2;
    const int below_5 = fd_eigcount_below(*curve, sc, s5.t_k, s5.E2, a, b, e5 + 1e-5);
    const int below_6 = fd_eigcount_below(*curve, sc, s5.t_k, s5.E2, a, b, e6 - 1e-5);
    CHECK(below_6 - below_5 == 0);
}

TEST_CASE("normalization audits with a negative control", "[verify]") {
    auto curve = triangle_curve();
    ScaleParams sc = ScaleParams::from_h(0.015, 1500);
    const SpectralData sd = assemble_spectrum(*curve, sc, ModeIndices{1500, 2, 5});
    Mode1D m1 = assemble_psi(curve, sc, sd, default_collar(sd), 3, 1024);
    const Mode2D w2 = cutoff_localize(build_mode2d(curve, sc, sd, m1, 1024, 256, 12.0), 5.0);
    const Mode3D u3 = build_mode3d(curve, w2, 1500);

    ScaleParams sc2 = sc;
    sc2.a_n = 1501 * sc.epsilon;
    const SpectralData sd2 = assemble_spectrum(*curve, sc2, ModeIndices{1501, 2, 5});
    Mode1D m12 = assemble_psi(curve, sc2, sd2, default_collar(sd2), 3, 1024);
    const Mode2D w22 = cutoff_localize(build_mode2d(curve, sc2, sd2, m12, 1024, 256, 12.0), 5.0);
    const Mode3D u32 = build_mode3d(curve, w22, 1501);

    const AuditReport rep = audit_normalizations(*curve, m1, w2, u3, u32);
    CHECK(rep.psi_ok);
    CHECK(rep.w_ok);
    CHECK(rep.chi0_ok);
    CHECK(rep.orth_ok);
    CHECK(rep.pass());

    // deliberately unnormalized psi trips the first audit
    Mode1D bad = m1;
    auto inner = m1.psi;
    bad.psi = [inner](double s) { return 2.0 * inner(s); };
    const AuditReport repbad = audit_normalizations(*curve, bad, w2, u3, u32);
    CHECK_FALSE(repbad.psi_ok);

    // self-overlap of the 3-D mode is 1 + O(h)
    const double r_max = 0.9 / 2.96;
    const double self = std::abs(inner_product_3d(*curve, u3, u3, r_max));
    CHECK(std::abs(std::sqrt(self) - 1.0) <= 5.0 * sc.h);
}
