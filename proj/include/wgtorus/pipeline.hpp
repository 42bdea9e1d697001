#ifndef WGTORUS_PIPELINE_HPP
#define WGTORUS_PIPELINE_HPP

// Orchestration of the full chain (curve -> spectrum -> modes -> verification
// -> billiards) plus artifact emission.  Each stage prints one summary line;
// the CLI maps exceptions to exit codes.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgtorus/billiards.hpp"
#include "wgtorus/config.hpp"
#include "wgtorus/errors.hpp"
#include "wgtorus/geometry.hpp"
#include "wgtorus/io.hpp"
#include "wgtorus/modes.hpp"
#include "wgtorus/semiclassics.hpp"
#include "wgtorus/verify.hpp"

namespace wgtorus {

struct PipelineContext {
    RunConfig cfg;
    std::uint64_t cfg_hash = 0;
    CurvePtr curve;
    std::optional<SpectralData> spectral;
    std::optional<Mode1D> mode1d;
    std::optional<Mode2D> mode2d;
    std::optional<Mode2D> mode2d_loc;
    std::optional<Mode3D> mode3d;

    explicit PipelineContext(RunConfig c) : cfg(std::move(c)) {
        cfg_hash = cfg.hash();
        std::filesystem::create_directories(cfg.out_dir);
    }
    std::string path(const std::string& name) const { return cfg.out_dir + "/" + name; }
};

inline nlohmann::json spectrum_json(const SpectralData& sd) {
    nlohmann::json j;
    j["n"] = sd.indices.n;
    j["k"] = sd.indices.k;
    j["m"] = sd.indices.m;
    j["epsilon"] = sd.scale.epsilon;
    j["h"] = sd.scale.h;
    j["E2"] = sd.E2;
    j["E1"] = sd.E1;
    j["t_k"] = sd.t_k;
    j["curlyE2"] = sd.curly_E2;
    j["lambda2"] = sd.lambda2;
    j["regime"] = regime_name(sd.regime);
    if (sd.s_minus) j["s_minus"] = *sd.s_minus;
    if (sd.s_plus) j["s_plus"] = *sd.s_plus;
    return j;
}

inline nlohmann::json residual_json(const ResidualReport& r) {
    nlohmann::json j;
    j["operator_id"] = operator_name(r.op);
    j["h"] = r.h;
    j["l2_norm"] = r.l2_norm;
    j["grid_spec"] = {{"n1", r.grid.n1}, {"n2", r.grid.n2}, {"d1", r.grid.d1}, {"d2", r.grid.d2}};
    if (r.convergence_checked) j["grid_converged"] = r.grid_converged;
    return j;
}

inline void write_json(const PipelineContext& ctx, const std::string& name,
                       nlohmann::json j) {
    j["meta"] = {{"tool", "wgtorus 0.1.0"},
                 {"config_hash", (std::uint64_t)ctx.cfg_hash}};
    io::write_text(ctx.path(name), j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

inline void ensure_curve(PipelineContext& ctx) {
    if (ctx.curve) return;
    ctx.curve = std::make_shared<const MeridianCurve>(ctx.cfg.make_profile(), ctx.cfg.R,
                                                      ctx.cfg.curve_grid);
    const ScaleParams sc = ctx.cfg.make_scale();
    if (!sc.a_over_R_in_range(ctx.cfg.R))
        std::cerr << "warning: a_n/R = " << io::fmt(sc.a_n / ctx.cfg.R)
                  << " outside the expected O(1) band [0.05, 20]\n";
}

inline int run_curve(PipelineContext& ctx) {
    ensure_curve(ctx);
    const auto& c = *ctx.curve;
    io::CsvWriter csv(ctx.path("curve.csv"), ctx.cfg_hash, {"s", "x", "z", "k"});
    const int n = ctx.cfg.curve_grid;
    for (int i = 0; i <= n; ++i) {
        const double s = c.L() * (double)i / n;
        csv.row({s, c.X0(s), c.q2(s), c.kappa(s)});
    }
    std::cout << "[curve] L=" << io::fmt(c.L()) << " R=" << io::fmt(c.R())
              << " closure=" << io::fmt(c.closure_defect()) << " -> curve.csv\n";
    return 0;
}

inline const SpectralData& ensure_spectrum(PipelineContext& ctx) {
    if (!ctx.spectral) {
        ensure_curve(ctx);
        ctx.spectral = assemble_spectrum(*ctx.curve, ctx.cfg.make_scale(),
                                         ctx.cfg.make_indices(), ctx.cfg.regime);
    }
    return *ctx.spectral;
}

inline int run_spectrum(PipelineContext& ctx) {
    const SpectralData& sd = ensure_spectrum(ctx);
    write_json(ctx, "spectrum.json", spectrum_json(sd));
    std::cout << "[spectrum] regime=" << regime_name(sd.regime) << " E2=" << io::fmt(sd.E2)
              << " htE1=" << io::fmt(sd.scale.h * sd.t_k * sd.E1)
              << " curlyE2=" << io::fmt(sd.curly_E2);
    if (sd.s_minus) std::cout << " s-=" << io::fmt(*sd.s_minus) << " s+=" << io::fmt(*sd.s_plus);
    std::cout << " -> spectrum.json\n";
    return 0;
}

inline const Mode1D& ensure_mode1d(PipelineContext& ctx) {
    if (!ctx.mode1d) {
        const SpectralData& sd = ensure_spectrum(ctx);
        const ScaleParams sc = ctx.cfg.make_scale();
        if (sd.regime == Regime::TwoTurningPoints) {
            const double delta = ctx.cfg.delta > 0.0 ? ctx.cfg.delta : default_collar(sd);
            ctx.mode1d = assemble_psi(ctx.curve, sc, sd, delta, ctx.cfg.ell, ctx.cfg.s_nodes);
        } else {
            ctx.mode1d = wkb_mode(ctx.curve, sc, sd, ctx.cfg.s_nodes);
        }
    }
    return *ctx.mode1d;
}

inline int run_mode1d(PipelineContext& ctx) {
    const Mode1D& m = ensure_mode1d(ctx);
    io::CsvWriter csv(ctx.path("mode1d.csv"), ctx.cfg_hash, {"s", "re_psi", "im_psi", "abs_psi"});
    for (std::size_t i = 0; i < m.s_grid.size(); ++i)
        csv.row({m.s_grid[i], m.values[i].real(), m.values[i].imag(), std::abs(m.values[i])});
    std::cout << "[mode1d] regime=" << regime_name(m.regime) << " A0=" << io::fmt(m.A0)
              << " delta=" << io::fmt(m.delta) << " -> mode1d.csv\n";
    return 0;
}

inline const Mode2D& ensure_mode2d(PipelineContext& ctx) {
    if (!ctx.mode2d) {
        const Mode1D& m1 = ensure_mode1d(ctx);
        ctx.mode2d = build_mode2d(ctx.curve, ctx.cfg.make_scale(), *ctx.spectral, m1,
                                  ctx.cfg.s_nodes, ctx.cfg.rho_nodes, ctx.cfg.rho_max_factor);
    }
    return *ctx.mode2d;
}

inline const Mode2D& ensure_mode2d_localized(PipelineContext& ctx) {
    if (!ctx.mode2d_loc) ctx.mode2d_loc = cutoff_localize(ensure_mode2d(ctx), ctx.cfg.C_loc);
    return *ctx.mode2d_loc;
}

inline int run_mode2d(PipelineContext& ctx) {
    const Mode2D& w2 = ensure_mode2d(ctx);
    io::CsvWriter csv(ctx.path("mode2d.csv"), ctx.cfg_hash, {"s", "rho", "re_w", "im_w", "abs_w"});
    for (std::size_t i = 0; i < w2.s_grid.size(); i += 4)
        for (std::size_t j = 0; j < w2.rho_grid.size(); j += 2) {
            const complexd v = w2.values[w2.idx(i, j)];
            csv.row({w2.s_grid[i], w2.rho_grid[j], v.real(), v.imag(), std::abs(v)});
        }
    const double nrm = mode2d_norm(w2);

    if (ctx.cfg.formats.find("svg") != std::string::npos) {
        // |w| over the localization band in physical (s, r), caustic overlaid
        const SpectralData& sd = *ctx.spectral;
        const Caustic ca = caustic_curve(ctx.curve, ctx.cfg.make_scale(), sd);
        const double h = sd.scale.h;
        const int nx = 256, ny = 128;
        const double s_lo = sd.s_minus ? *sd.s_minus - 0.6 : 0.0;
        const double s_hi = sd.s_plus ? *sd.s_plus + 0.6 : ctx.curve->L();
        const double r_hi = w2.rho_max * h;
        std::vector<double> field((std::size_t)nx * ny);
        std::vector<std::pair<double, double>> overlay;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const double s = s_lo + (s_hi - s_lo) * ix / (nx - 1.0);
                const double r = r_hi * iy / (ny - 1.0);
                field[(std::size_t)iy * nx + ix] = std::abs(w2.w(r / h, s));
            }
        for (int ix = 0; ix < nx; ++ix) {
            const double s = s_lo + (s_hi - s_lo) * ix / (nx - 1.0);
            try {
                overlay.emplace_back(s, ca.r_c(s));
            } catch (const stability_error&) {}
        }
        io::SvgContourSpec spec;
        spec.x0 = s_lo; spec.x1 = s_hi; spec.y0 = 0.0; spec.y1 = r_hi;
        io::write_text(ctx.path("mode2d.svg"),
                       io::svg_contours(field, nx, ny, spec, overlay));
    }
    std::cout << "[mode2d] norm=" << io::fmt(nrm) << " rho_max=" << io::fmt(w2.rho_max)
              << " -> mode2d.csv\n";
    return 0;
}

inline const Mode3D& ensure_mode3d(PipelineContext& ctx) {
    if (!ctx.mode3d)
        ctx.mode3d = build_mode3d(ctx.curve, ensure_mode2d_localized(ctx),
                                  ctx.cfg.make_indices().n);
    return *ctx.mode3d;
}

inline int run_mode3d(PipelineContext& ctx) {
    const Mode3D& u3 = ensure_mode3d(ctx);
    // meridian slice at alpha = pi/2 (x = X, y = 0)
    io::CsvWriter csv(ctx.path("mode3d_slice.csv"), ctx.cfg_hash, {"x", "z", "abs_u"});
    const Mode2D& w2 = *ctx.mode2d_loc;
    const double h = u3.spectral.scale.h;
    const double r_hi = std::min(w2.rho_max * h, 0.9 / [&] {
        double km = 0.0;
        for (int i = 0; i < 512; ++i) km = std::max(km, ctx.curve->kappa(ctx.curve->L() * i / 512.0));
        return km;
    }());
    for (int i = 0; i < (int)w2.s_grid.size(); i += 8) {
        const double s = w2.s_grid[i];
        for (int jr = 0; jr <= 96; ++jr) {
            const double r = r_hi * jr / 96.0;
            const ChartPoint cp = ctx.curve->chart(r, s, M_PI / 2.0);
            const complexd v = u3.u(cp.X, 0.0, cp.Z);
            csv.row({cp.X, cp.Z, std::abs(v)});
        }
    }
    std::cout << "[mode3d] n=" << u3.n << " -> mode3d_slice.csv\n";
    return 0;
}

inline int run_caustic(PipelineContext& ctx) {
    const SpectralData& sd = ensure_spectrum(ctx);
    const Caustic ca = caustic_curve(ctx.curve, ctx.cfg.make_scale(), sd);
    io::CsvWriter csv(ctx.path("caustic.csv"), ctx.cfg_hash, {"s", "r_c"});
    const int n = 1024;
    int rows = 0;
    for (int i = 0; i <= n; ++i) {
        const double s = ctx.curve->L() * (double)i / n;
        try {
            csv.row({s, ca.r_c(s)});
            ++rows;
        } catch (const stability_error&) {}
    }
    std::cout << "[caustic] rows=" << rows << " -> caustic.csv\n";
    return 0;
}

inline int run_oracle(PipelineContext& ctx) {
    const SpectralData& sd = ensure_spectrum(ctx);
    const double ev = fd_oracle_1d(*ctx.curve, ctx.cfg.make_scale(), ctx.cfg.make_indices(), sd);
    const double rel = std::abs(ev - sd.curly_E2) / sd.curly_E2;
    nlohmann::json j;
    j["oracle_eigenvalue"] = ev;
    j["curlyE2"] = sd.curly_E2;
    j["relative_error"] = rel;
    write_json(ctx, "oracle.json", j);
    std::cout << "[oracle] eig=" << io::fmt(ev) << " curlyE2=" << io::fmt(sd.curly_E2)
              << " rel=" << io::fmt(rel) << " -> oracle.json\n";
    return 0;
}

/// Residual reports; with a sweep the quantities are recomputed per h with
/// a_n held fixed (n rescaled), and log-log orders are fitted.
inline int run_residual(PipelineContext& ctx, const std::vector<double>& h_sweep = {}) {
    ensure_curve(ctx);
    const double a_n_fixed = ctx.cfg.make_scale().a_n;
    auto one = [&](double h) {
        ScaleParams sc = ScaleParams::from_h(h, 1.0);
        sc.a_n = a_n_fixed;
        ModeIndices idx{std::max(1, (int)std::lround(a_n_fixed / sc.epsilon)), ctx.cfg.k,
                        ctx.cfg.m};
        SpectralData sd = assemble_spectrum(*ctx.curve, sc, idx, ctx.cfg.regime);
        Mode1D m1 = sd.regime == Regime::TwoTurningPoints
                        ? assemble_psi(ctx.curve, sc, sd,
                                       ctx.cfg.delta > 0.0 ? ctx.cfg.delta : default_collar(sd),
                                       ctx.cfg.ell, ctx.cfg.s_nodes)
                        : wkb_mode(ctx.curve, sc, sd, ctx.cfg.s_nodes);
        Mode2D w2 = build_mode2d(ctx.curve, sc, sd, m1, ctx.cfg.s_nodes, ctx.cfg.rho_nodes,
                                 ctx.cfg.rho_max_factor);
        // keep the cutoff inside the chart at large h, where the transverse
        // layer can be thicker than 1/k near high-curvature arcs; sweep runs
        // are scaling studies, so the mass-retention gate is relaxed
        const double c_eff = std::min(ctx.cfg.C_loc, 0.9 / std::sqrt(sc.h));
        Mode2D w2l = cutoff_localize(w2, c_eff, 0.05);
        struct Out {
            ResidualReport l0, h2, d2;
            double lambda;
            double res3_over_l2;
        } out;
        out.l0 = apply_l0(*ctx.curve, sc, sd, m1, ctx.cfg.s_nodes);
        out.h2 = apply_h_2d(*ctx.curve, sc, sd, w2);
        out.d2 = apply_delta2(*ctx.curve, sc, sd, w2l, ctx.cfg.rho_nodes);
        out.lambda = std::sqrt(sd.lambda2);
        const double res3 = out.d2.l2_norm / (sc.epsilon * sc.epsilon * std::sqrt(2.0 * M_PI * sc.h));
        out.res3_over_l2 = res3 / sd.lambda2;
        return out;
    };

    if (h_sweep.empty()) {
        const auto o = one(ctx.cfg.h);
        nlohmann::json j;
        j["L0_1d"] = residual_json(o.l0);
        j["H_2d"] = residual_json(o.h2);
        j["Delta2_2d"] = residual_json(o.d2);
        write_json(ctx, "residuals.json", j);
        std::cout << "[residual] L0=" << io::fmt(o.l0.l2_norm) << " H2d=" << io::fmt(o.h2.l2_norm)
                  << " Delta2=" << io::fmt(o.d2.l2_norm) << " -> residuals.json\n";
        return 0;
    }

    std::vector<std::pair<double, double>> p_l0, p_h2, p_d2, p_nu;
    for (double h : h_sweep) {
        const auto o = one(h);
        p_l0.emplace_back(h, o.l0.l2_norm);
        p_h2.emplace_back(h, o.h2.l2_norm);
        p_d2.emplace_back(h, o.d2.l2_norm);
        p_nu.emplace_back(o.lambda, o.res3_over_l2);
    }
    const ScalingFit f_l0 = fit_loglog(p_l0);
    const ScalingFit f_h2 = fit_loglog(p_h2);
    const ScalingFit f_d2 = fit_loglog(p_d2);
    const ScalingFit f_nu = fit_loglog(p_nu);   // slope vs lambda: expect -4/3

    nlohmann::json j;
    auto fit_json = [](const ScalingFit& f, const char* name) {
        nlohmann::json q;
        q["operator_id"] = name;
        q["fitted_order"] = f.fitted_order;
        q["r_squared"] = f.r_squared;
        q["pairs"] = nlohmann::json::array();
        for (const auto& [h, r] : f.pairs) q["pairs"].push_back({h, r});
        return q;
    };
    j["L0_1d"] = fit_json(f_l0, "L0_1d");
    j["H_2d"] = fit_json(f_h2, "H_2d");
    j["Delta2_2d"] = fit_json(f_d2, "Delta2_2d");
    j["Laplace3d_order"] = fit_json(f_nu, "Laplace3d_order");
    write_json(ctx, "scaling.json", j);
    std::cout << "[residual] orders: L0=" << io::fmt(f_l0.fitted_order)
              << " H2d=" << io::fmt(f_h2.fitted_order) << " Delta2=" << io::fmt(f_d2.fitted_order)
              << " nu_slope=" << io::fmt(f_nu.fitted_order) << " -> scaling.json\n";
    return 0;
}

inline int run_billiard2d(PipelineContext& ctx) {
    const SpectralData& sd = ensure_spectrum(ctx);
    const ScaleParams sc = ctx.cfg.make_scale();
    PhaseState2D st;
    st.s = ctx.cfg.s0 >= 0.0
               ? ctx.cfg.s0
               : (sd.s_minus ? 0.5 * (*sd.s_minus + *sd.s_plus) : 0.25 * ctx.curve->L());
    const Caustic ca = caustic_curve(ctx.curve, sc, sd);
    st.rho = ctx.cfg.rho0_frac * ca.rho_c(st.s);
    st.p_rho = ctx.cfg.prho0;
    const double ps2 = sd.curly_E2 - potential_u(*ctx.curve, sc, st.s) -
                       sc.h * (st.p_rho * st.p_rho +
                               st.rho * stability_a3(*ctx.curve, sc, st.s, sd.curly_E2));
    st.p_s = ps2 > 0.0 ? std::sqrt(ps2) : 0.0;

    double dt = ctx.cfg.dt;
    if (dt <= 0.0) {
        double vpmax = 0.0;
        for (int i = 0; i < 2048; ++i)
            vpmax = std::max(vpmax, std::abs(potential_u_prime(*ctx.curve, sc,
                                                               ctx.curve->L() * i / 2048.0)));
        dt = 1e-3 * std::min(1.0, 1.0 / vpmax);
    }
    const int stride = ctx.cfg.stride > 0 ? ctx.cfg.stride
                                          : std::max(1, (int)(ctx.cfg.T / dt) / 4096);
    const Flow2DResult res = flow_2d(*ctx.curve, sc, sd.curly_E2, st, ctx.cfg.T, dt, stride);
    io::CsvWriter csv(ctx.path("billiard2d.csv"), ctx.cfg_hash,
                      {"t", "s", "p_s", "rho", "p_rho", "H"});
    for (const auto& p : res.trajectory) csv.row({p.t, p.s, p.p_s, p.rho, p.p_rho, p.energy});
    std::cout << "[billiard2d] steps_dt=" << io::fmt(res.dt_used)
              << " reflections=" << res.reflections
              << " max_drift=" << io::fmt(res.max_energy_drift) << " -> billiard2d.csv\n";
    return 0;
}

inline int run_billiard3d(PipelineContext& ctx) {
    ensure_curve(ctx);
    const auto& c = *ctx.curve;
    Ray3D ray;
    const bool auto_origin = ctx.cfg.ray_origin[0] == 0.0 && ctx.cfg.ray_origin[1] == 0.0 &&
                             ctx.cfg.ray_origin[2] == 0.0;
    if (auto_origin) {
        // start near the outer equator, slightly inside, mostly tangential
        double s_star = 0.0, best = -1e300;
        for (int i = 0; i < 4096; ++i) {
            const double s = c.L() * i / 4096.0;
            if (c.X0(s) > best) { best = c.X0(s); s_star = s; }
        }
        const ChartPoint cp = c.chart(0.05, s_star, 0.0);
        ray.origin = {cp.X * std::sin(0.0), cp.X * std::cos(0.0), cp.Z};
        const double tx = 0.15 * c.q1p(s_star), tz = 0.15 * c.q2p(s_star);
        const double nn = std::sqrt(1.0 + tx * tx + tz * tz);
        ray.direction = {1.0 / nn, tx / nn, tz / nn};
    } else {
        ray.origin = {ctx.cfg.ray_origin[0], ctx.cfg.ray_origin[1], ctx.cfg.ray_origin[2]};
        double nn = std::hypot(std::hypot(ctx.cfg.ray_dir[0], ctx.cfg.ray_dir[1]),
                               ctx.cfg.ray_dir[2]);
        if (nn == 0.0) throw config_error("billiard.ray_dir must be nonzero");
        ray.direction = {ctx.cfg.ray_dir[0] / nn, ctx.cfg.ray_dir[1] / nn, ctx.cfg.ray_dir[2] / nn};
    }
    const std::vector<Ray3D> segs = billiard_3d(c, ray, ctx.cfg.bounces);
    io::CsvWriter csv(ctx.path("billiard3d.csv"), ctx.cfg_hash, {"x", "y", "z"});
    csv.row({segs[0].origin[0], segs[0].origin[1], segs[0].origin[2]});
    io::CsvWriter bounces(ctx.path("billiard3d_bounces.csv"), ctx.cfg_hash, {"x", "y", "z"});
    for (const auto& sg : segs) {
        const std::array<double, 3> end{sg.origin[0] + sg.segment_length * sg.direction[0],
                                        sg.origin[1] + sg.segment_length * sg.direction[1],
                                        sg.origin[2] + sg.segment_length * sg.direction[2]};
        csv.row({end[0], end[1], end[2]});
        bounces.row({end[0], end[1], end[2]});
    }
    std::cout << "[billiard3d] bounces=" << segs.size() << " -> billiard3d.csv\n";
    return 0;
}

inline int run_audit(PipelineContext& ctx) {
    const Mode1D& m1 = ensure_mode1d(ctx);
    const Mode2D& w2l = ensure_mode2d_localized(ctx);
    const Mode3D& u3 = ensure_mode3d(ctx);
    // companion mode at n+1 for the orthogonality audit
    RunConfig cfg2 = ctx.cfg;
    cfg2.n = ctx.cfg.n + 1.0;
    PipelineContext ctx2(cfg2);
    ctx2.curve = ctx.curve;
    const Mode3D& u3b = ensure_mode3d(ctx2);
    const AuditReport rep = audit_normalizations(*ctx.curve, m1, w2l, u3, u3b);
    nlohmann::json j;
    j["psi_norm"] = rep.psi_norm;
    j["w_norm"] = rep.w_norm;
    j["chi0_max_dev"] = rep.chi0_max_dev;
    j["cross_inner"] = rep.cross_inner;
    j["pass"] = rep.pass();
    write_json(ctx, "audit.json", j);
    std::cout << "[audit] psi=" << io::fmt(rep.psi_norm) << " w=" << io::fmt(rep.w_norm)
              << " chi0_dev=" << io::fmt(rep.chi0_max_dev)
              << " <u,u'>=" << io::fmt(rep.cross_inner)
              << (rep.pass() ? " PASS" : " FAIL") << " -> audit.json\n";
    if (!rep.pass()) throw audit_error("normalization/orthogonality audit failed");
    return 0;
}

inline int run_all(PipelineContext& ctx) {
    run_curve(ctx);
    run_spectrum(ctx);
    run_mode1d(ctx);
    run_mode2d(ctx);
    run_mode3d(ctx);
    run_caustic(ctx);
    run_residual(ctx);
    run_oracle(ctx);
    run_audit(ctx);
    run_billiard2d(ctx);
    run_billiard3d(ctx);
    const SpectralData& sd = *ctx.spectral;
    std::cout << "[all] summary: t_k=" << io::fmt(sd.t_k) << " E2=" << io::fmt(sd.E2)
              << " htE1=" << io::fmt(sd.scale.h * sd.t_k * sd.E1)
              << " curlyE2=" << io::fmt(sd.curly_E2) << " lambda2=" << io::fmt(sd.lambda2)
              << " a_n/R=" << io::fmt(sd.scale.a_n / ctx.cfg.R) << "\n";
    return 0;
}

inline int run_subcommand(const std::string& name, PipelineContext& ctx,
                          const std::vector<double>& h_sweep = {}) {
    if (name == "curve") return run_curve(ctx);
    if (name == "spectrum") return run_spectrum(ctx);
    if (name == "mode1d") return run_mode1d(ctx);
    if (name == "mode2d") return run_mode2d(ctx);
    if (name == "mode3d") return run_mode3d(ctx);
    if (name == "residual") return run_residual(ctx, h_sweep);
    if (name == "oracle") return run_oracle(ctx);
    if (name == "audit") return run_audit(ctx);
    if (name == "billiard2d") return run_billiard2d(ctx);
    if (name == "billiard3d") return run_billiard3d(ctx);
    if (name == "caustic") return run_caustic(ctx);
    if (name == "all") return run_all(ctx);
    throw config_error("unknown subcommand: " + name);
}

} // namespace wgtorus

#endif
