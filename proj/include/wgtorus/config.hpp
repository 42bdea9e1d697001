#ifndef WGTORUS_CONFIG_HPP
#define WGTORUS_CONFIG_HPP

// Line-based `section.key = value` configuration.  Unknown keys, malformed
// lines and type mismatches are reported with their line number.  Exactly one
// of scale.h / scale.epsilon may be supplied; the other is derived through
// h = epsilon^{2/3}.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wgtorus/errors.hpp"
#include "wgtorus/geometry.hpp"
#include "wgtorus/io.hpp"
#include "wgtorus/semiclassics.hpp"

namespace wgtorus {

enum class ProfileKind { Triangle, Circle, Tabulated };

struct RunConfig {
    // geometry
    ProfileKind profile = ProfileKind::Triangle;
    double sigma = 0.4;
    double L = 2.0 * M_PI;
    double R = 3.0;
    double phase = 0.0;              // circle tangent phase
    std::string kappa_file;          // tabulated profile source
    int curve_grid = 4096;
    // scale (h derived from epsilon unless h was the supplied one)
    double epsilon = 0.00183;
    bool h_supplied = false;
    double h = 0.0;                  // filled by finalize()
    double n = 1500.0;               // angular number (real-valued in sweeps)
    // mode
    int k = 2;
    int m = 5;
    double delta = 0.0;              // 0 = auto (0.1 of the well width)
    int ell = 3;
    double C_loc = 2.0;
    RegimeChoice regime = RegimeChoice::Auto;
    // grids
    int s_nodes = 2048;
    int rho_nodes = 512;
    double rho_max_factor = 12.0;
    // billiards
    double dt = 0.0;                 // 0 = auto: 1e-3 min(1, 1/max|V'|)
    double T = 2000.0;               // long enough for a few transverse wall returns
    int stride = 0;                  // trajectory output stride, 0 = auto
    int bounces = 500;
    double s0 = -1.0;                // <0 = auto (well midpoint)
    double rho0_frac = 0.5;          // initial rho as a fraction of the caustic
    double prho0 = 0.0;
    std::vector<double> ray_origin{0.0, 0.0, 0.0};   // all-zero = auto
    std::vector<double> ray_dir{0.0, 0.0, 0.0};      // all-zero = auto
    // output
    std::string out_dir = "out";
    std::string formats = "csv,json";

    void finalize() {
        h = h_supplied ? h : std::pow(epsilon, 2.0 / 3.0);
        if (h_supplied) epsilon = std::pow(h, 1.5);
        auto power_of_two_in_range = [](int v) {
            if (v < 256 || v > 65536) return false;
            return (v & (v - 1)) == 0;
        };
        if (!power_of_two_in_range(s_nodes) || !power_of_two_in_range(rho_nodes) ||
            !power_of_two_in_range(curve_grid))
            throw config_error("node counts must be powers of two between 2^8 and 2^16");
        if (sigma <= 0.0 || L <= 0.0 || R <= 0.0 || epsilon <= 0.0)
            throw config_error("geometry/scale parameters must be positive");
        if (C_loc <= 0.0 || ell < 1 || delta < 0.0)
            throw config_error("mode parameters out of range");
    }

    std::string canonical_text() const {
        std::ostringstream os;
        os << "profile=" << (int)profile << ";sigma=" << io::fmt(sigma) << ";L=" << io::fmt(L)
           << ";R=" << io::fmt(R) << ";phase=" << io::fmt(phase) << ";kf=" << kappa_file
           << ";cg=" << curve_grid << ";eps=" << io::fmt(epsilon) << ";h=" << io::fmt(h)
           << ";n=" << io::fmt(n) << ";k=" << k << ";m=" << m << ";delta=" << io::fmt(delta)
           << ";ell=" << ell << ";C=" << io::fmt(C_loc) << ";regime=" << (int)regime
           << ";sn=" << s_nodes << ";rn=" << rho_nodes << ";rmf=" << io::fmt(rho_max_factor)
           << ";dt=" << io::fmt(dt) << ";T=" << io::fmt(T) << ";b=" << bounces;
        return os.str();
    }
    std::uint64_t hash() const { return io::fnv1a64(canonical_text()); }

    CurvatureProfile make_profile() const {
        if (profile == ProfileKind::Triangle) return triangle_profile(sigma, L);
        if (profile == ProfileKind::Circle) return circle_profile(L, phase);
        std::ifstream in(kappa_file);
        if (!in) throw config_error("cannot open kappa table: " + kappa_file);
        std::vector<std::pair<double, double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double s, kv;
            if (ls >> s >> kv) rows.emplace_back(s, kv);
        }
        return tabulated_profile(rows, L, phase);
    }

    ScaleParams make_scale() const { return ScaleParams::from_epsilon(epsilon, n); }
    ModeIndices make_indices() const {
        return ModeIndices{(int)std::lround(n), k, m};
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, int line) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw config_error("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
    return d;
}

inline int parse_int(const std::string& v, int line) {
    const double d = parse_double(v, line);
    if (d != std::floor(d))
        throw config_error("line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
    return (int)d;
}

} // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    bool eps_given = false, h_given = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line = line.substr(0, hashpos);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        const int ln = lineno;

        if (key == "geometry.profile") {
            if (val == "triangle") cfg.profile = ProfileKind::Triangle;
            else if (val == "circle") cfg.profile = ProfileKind::Circle;
            else if (val == "tabulated") cfg.profile = ProfileKind::Tabulated;
            else throw config_error("line " + std::to_string(ln) + ": unknown profile '" + val + "'");
        } else if (key == "geometry.sigma") cfg.sigma = detail::parse_double(val, ln);
        else if (key == "geometry.L") cfg.L = detail::parse_double(val, ln);
        else if (key == "geometry.R") cfg.R = detail::parse_double(val, ln);
        else if (key == "geometry.phase") cfg.phase = detail::parse_double(val, ln);
        else if (key == "geometry.kappa_file") cfg.kappa_file = val;
        else if (key == "geometry.grid_n") cfg.curve_grid = detail::parse_int(val, ln);
        else if (key == "scale.epsilon") { cfg.epsilon = detail::parse_double(val, ln); eps_given = true; }
        else if (key == "scale.h") { cfg.h = detail::parse_double(val, ln); h_given = true; }
        else if (key == "scale.n") cfg.n = detail::parse_double(val, ln);
        else if (key == "mode.k") cfg.k = detail::parse_int(val, ln);
        else if (key == "mode.m") cfg.m = detail::parse_int(val, ln);
        else if (key == "mode.delta") cfg.delta = detail::parse_double(val, ln);
        else if (key == "mode.ell") cfg.ell = detail::parse_int(val, ln);
        else if (key == "mode.C_loc") cfg.C_loc = detail::parse_double(val, ln);
        else if (key == "mode.regime") {
            if (val == "auto") cfg.regime = RegimeChoice::Auto;
            else if (val == "periodic") cfg.regime = RegimeChoice::Periodic;
            else if (val == "bohr_sommerfeld") cfg.regime = RegimeChoice::BohrSommerfeld;
            else throw config_error("line " + std::to_string(ln) + ": unknown regime '" + val + "'");
        } else if (key == "grid.s_nodes") cfg.s_nodes = detail::parse_int(val, ln);
        else if (key == "grid.rho_nodes") cfg.rho_nodes = detail::parse_int(val, ln);
        else if (key == "grid.rho_max_factor") cfg.rho_max_factor = detail::parse_double(val, ln);
        else if (key == "billiard.dt") cfg.dt = detail::parse_double(val, ln);
        else if (key == "billiard.T") cfg.T = detail::parse_double(val, ln);
        else if (key == "billiard.stride") cfg.stride = detail::parse_int(val, ln);
        else if (key == "billiard.bounces") cfg.bounces = detail::parse_int(val, ln);
        else if (key == "billiard.s0") cfg.s0 = detail::parse_double(val, ln);
        else if (key == "billiard.rho0_frac") cfg.rho0_frac = detail::parse_double(val, ln);
        else if (key == "billiard.prho0") cfg.prho0 = detail::parse_double(val, ln);
        else if (key == "billiard.ray_origin_x") cfg.ray_origin[0] = detail::parse_double(val, ln);
        else if (key == "billiard.ray_origin_y") cfg.ray_origin[1] = detail::parse_double(val, ln);
        else if (key == "billiard.ray_origin_z") cfg.ray_origin[2] = detail::parse_double(val, ln);
        else if (key == "billiard.ray_dir_x") cfg.ray_dir[0] = detail::parse_double(val, ln);
        else if (key == "billiard.ray_dir_y") cfg.ray_dir[1] = detail::parse_double(val, ln);
        else if (key == "billiard.ray_dir_z") cfg.ray_dir[2] = detail::parse_double(val, ln);
        else if (key == "output.dir") cfg.out_dir = val;
        else if (key == "output.formats") cfg.formats = val;
        else throw config_error("line " + std::to_string(ln) + ": unknown key '" + key + "'");
    }
    if (eps_given && h_given)
        throw config_error("supply exactly one of scale.h and scale.epsilon, not both");
    cfg.h_supplied = h_given;
    cfg.finalize();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace wgtorus

#endif
