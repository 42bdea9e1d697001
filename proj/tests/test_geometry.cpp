#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "wgtorus/geometry.hpp"
#include "wgtorus/quadrature.hpp"

using namespace wgtorus;

namespace {
const double kTwoPi = 2.0 * M_PI;
}

TEST_CASE("triangle profile: total turning, symmetry, positivity", "[geometry]") {
    const CurvatureProfile p = triangle_profile(0.4, kTwoPi);
    REQUIRE(p.gamma.has_value());
    const double turn = quad::integrate(p.kappa, 0.0, kTwoPi, 1e-13);
    CHECK(turn == Approx(kTwoPi).margin(1e-10));
    // threefold symmetry of the smoothed-wedge shape
    CHECK(p.kappa(0.0) == Approx(p.kappa(kTwoPi / 3.0)).margin(1e-10));
    CHECK(p.kappa(0.0) == Approx(p.kappa(2.0 * kTwoPi / 3.0)).margin(1e-10));
    for (int i = 0; i < 500; ++i) CHECK(p.kappa(kTwoPi * i / 500.0) > 0.0);
    CHECK_THROWS_AS(triangle_profile(-1.0, kTwoPi), numeric_error);
}

TEST_CASE("constant profile is a circle", "[geometry]") {
    const CurvatureProfile p = circle_profile(kTwoPi);
    const double turn = quad::integrate(p.kappa, 0.0, kTwoPi, 1e-13);
    CHECK(turn == Approx(kTwoPi).margin(1e-12));
    const MeridianCurve c(p, 3.0);
    // Q1 = sin s, Q2 = 1 - cos s for the phase-0 unit circle
    for (int i = 0; i <= 100; ++i) {
        const double s = kTwoPi * i / 100.0;
        CHECK(c.q1(s) == Approx(std::sin(s)).margin(1e-8));
        CHECK(c.q2(s) == Approx(1.0 - std::cos(s)).margin(1e-8));
    }
    CHECK(c.closure_defect() <= 1e-6);
}

TEST_CASE("curves are unit speed and closed", "[geometry]") {
    for (const auto& prof : {triangle_profile(0.4, kTwoPi), circle_profile(kTwoPi)}) {
        const MeridianCurve c(prof, 3.0);
        CHECK(c.closure_defect() <= 1e-6);
        for (int i = 0; i < 1000; ++i) {
            const double s = kTwoPi * i / 1000.0;
            const double speed = std::hypot(c.q1p(s), c.q2p(s));
            CHECK(std::abs(speed - 1.0) <= 1e-10);
            CHECK(c.R() + c.q1(s) > 0.0);
        }
    }
}

TEST_CASE("Frenet consistency: curvature recovered from the built curve", "[geometry]") {
    const MeridianCurve c(triangle_profile(0.4, kTwoPi), 3.0);
    for (int i = 0; i < 200; ++i) {
        const double s = kTwoPi * i / 200.0;
        const double rec = c.q1p(s) * c.q2pp(s) - c.q2p(s) * c.q1pp(s);
        CHECK(std::abs(rec - c.kappa(s)) <= 1e-6);
    }
}

TEST_CASE("chart evaluation identities", "[geometry]") {
    const MeridianCurve c(circle_profile(kTwoPi), 3.0);
    // boundary restriction
    const ChartPoint b = eval_chart(c, 0.0, 1.3);
    CHECK(b.X == Approx(c.R() + c.q1(1.3)).margin(1e-12));
    CHECK(b.Z == Approx(c.q2(1.3)).margin(1e-12));
    CHECK(b.J == Approx(b.X).margin(1e-12));
    // unit circle: k = 1, so h_s = 1 - r
    const ChartPoint p = eval_chart(c, 0.2, 0.0);
    CHECK(p.h_s == Approx(0.8).margin(1e-12));
    CHECK(p.J == Approx(p.h_s * p.X).margin(1e-12));
    CHECK(p.valid);
    // chart degeneracy at the focal distance
    const MeridianCurve tri(triangle_profile(0.4, kTwoPi), 3.0);
    const double s0 = 2.0;
    const ChartPoint q = eval_chart(tri, 1.0 / tri.kappa(s0), s0);
    CHECK_FALSE(q.valid);
    CHECK(std::abs(q.J) <= 1e-10);
}

TEST_CASE("chart quantities are L-periodic", "[geometry]") {
    const MeridianCurve c(triangle_profile(0.4, kTwoPi), 3.0);
    for (int i = 0; i < 50; ++i) {
        const double s = kTwoPi * i / 50.0 + 0.1;
        CHECK(c.X0(s + kTwoPi) == Approx(c.X0(s)).margin(1e-10));
        CHECK(c.q2(s + kTwoPi) == Approx(c.q2(s)).margin(1e-10));
        CHECK(c.kappa(s + kTwoPi) == Approx(c.kappa(s)).margin(1e-10));
    }
}

TEST_CASE("chart inversion round trip (property)", "[geometry]") {
    const MeridianCurve c(triangle_profile(0.4, kTwoPi), 3.0);
    std::mt19937 rng(987654u);
    std::uniform_real_distribution<double> us(0.0, kTwoPi);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double s = us(rng);
        // stay below the focal distance AND inside the injectivity reach of
        // the normal map (the flat sides have 1/k far beyond the inradius)
        const double r = ur(rng) * std::min(0.8 / c.kappa(s), 0.27);
        const ChartPoint p = c.chart(r, s);
        REQUIRE(p.valid);
        const auto [ri, si] = invert_chart(c, p.X, p.Z);
        const ChartPoint back = c.chart(ri, si);
        CHECK(std::abs(back.X - p.X) + std::abs(back.Z - p.Z) <= 1e-9);
        CHECK(ri == Approx(r).margin(1e-9));
    }
}

TEST_CASE("boundary points invert to r = 0", "[geometry]") {
    const MeridianCurve c(triangle_profile(0.4, kTwoPi), 3.0);
    for (int i = 0; i < 32; ++i) {
        const double s0 = kTwoPi * i / 32.0;
        const auto [r, s] = invert_chart(c, c.R() + c.q1(s0), c.q2(s0));
        CHECK(std::abs(r) <= 1e-9);
        const double ds = std::remainder(s - s0, kTwoPi);
        CHECK(std::abs(ds) <= 1e-7);
    }
}

TEST_CASE("circle: points on the inward normal invert to (d, s0)", "[geometry]") {
    const MeridianCurve c(circle_profile(kTwoPi), 3.0);
    const double s0 = 2.6;
    const double xi = (c.R() + c.q1(s0)) - 0.3 * c.q2p(s0);
    const double z = c.q2(s0) + 0.3 * c.q1p(s0);
    const auto [r, s] = invert_chart(c, xi, z);
    CHECK(r == Approx(0.3).margin(1e-9));
    CHECK(std::abs(std::remainder(s - s0, kTwoPi)) <= 1e-9);
}

TEST_CASE("Jacobian positive inside the chart region", "[geometry]") {
    const MeridianCurve c(triangle_profile(0.4, kTwoPi), 3.0);
    std::mt19937 rng(13u);
    std::uniform_real_distribution<double> us(0.0, kTwoPi), ur(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double s = us(rng);
        const double r = 0.95 * ur(rng) / c.kappa(s);
        const ChartPoint p = c.chart(r, s);
        if (p.valid && p.X > 0.0) CHECK(p.J > 0.0);
    }
}

TEST_CASE("points outside the chart are rejected", "[geometry]") {
    const MeridianCurve c(circle_profile(kTwoPi), 3.0);
    // center of the meridian disc sits at the focal distance r = 1 = 1/k
    CHECK_THROWS_AS(invert_chart(c, 3.0, 1.0), geometry_error);
    // far outside the domain
    CHECK_THROWS_AS(invert_chart(c, 7.0, 0.0), geometry_error);
}

TEST_CASE("tabulated profile round trip", "[geometry]") {
    const CurvatureProfile tri = triangle_profile(0.4, kTwoPi);
    std::vector<std::pair<double, double>> rows;
    const int n = 1024;
    for (int i = 0; i < n; ++i) {
        const double s = kTwoPi * i / n;
        rows.emplace_back(s, tri.kappa(s));
    }
    const CurvatureProfile tab = tabulated_profile(rows, kTwoPi);
    const double turn = quad::integrate(tab.kappa, 0.0, kTwoPi, 1e-12);
    CHECK(turn == Approx(kTwoPi).margin(1e-9));
    for (int i = 0; i < 64; ++i) {
        const double s = kTwoPi * (i + 0.37) / 64.0;
        CHECK(tab.kappa(s) == Approx(tri.kappa(s)).margin(1e-6));
    }
}
