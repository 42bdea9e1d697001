#ifndef WGTORUS_IO_HPP
#define WGTORUS_IO_HPP

// Artifact emission: CSV (full-precision, '.' decimal separator, one metadata
// line + header row), JSON records, and a small self-contained SVG contour
// renderer for |w| with the caustic overlay.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wgtorus/errors.hpp"

namespace wgtorus {
namespace io {

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Shortest round-trip decimal form, locale-independent.
inline std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string meta_line(std::uint64_t config_hash) {
    std::ostringstream os;
    os << "# wgtorus 0.1.0 config=" << std::hex << config_hash;
    return os.str();
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, std::uint64_t config_hash,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw config_error("cannot open output file: " + path);
        out_ << meta_line(config_hash) << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
        out_ << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << fmt(vals[i]) << (i + 1 < vals.size() ? "," : "");
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path);
    out << text;
}

// ---------------------------------------------------------------------------
// Marching-squares contour SVG for a scalar field on a rectangular grid.

struct SvgContourSpec {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;   // data window
    int width = 900, height = 600;
    int levels = 12;
    std::string x_label = "s", y_label = "r";
};

/// field is row-major values[iy * nx + ix] on uniform (x, y) nodes; overlay is
/// an optional polyline in data coordinates (e.g. the caustic r_c(s)).
inline std::string svg_contours(const std::vector<double>& field, int nx, int ny,
                                const SvgContourSpec& spec,
                                const std::vector<std::pair<double, double>>& overlay = {}) {
    double vmax = 0.0;
    for (double v : field) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) vmax = 1.0;
    const double sx = spec.width / (spec.x1 - spec.x0);
    const double sy = spec.height / (spec.y1 - spec.y0);
    auto px = [&](double x) { return (x - spec.x0) * sx; };
    auto py = [&](double y) { return spec.height - (y - spec.y0) * sy; };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << spec.width << "' height='"
       << spec.height << "' viewBox='0 0 " << spec.width << " " << spec.height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";

    const double dx = (spec.x1 - spec.x0) / (nx - 1);
    const double dy = (spec.y1 - spec.y0) / (ny - 1);
    for (int lev = 1; lev <= spec.levels; ++lev) {
        const double c = vmax * lev / (spec.levels + 1.0);
        os << "<path fill='none' stroke='rgb(" << 30 + 18 * lev << ",60," << 220 - 14 * lev
           << ")' stroke-width='1' d='";
        for (int iy = 0; iy + 1 < ny; ++iy) {
            for (int ix = 0; ix + 1 < nx; ++ix) {
                // marching squares on cell corners (00,10,11,01)
                const double f00 = field[iy * nx + ix] - c;
                const double f10 = field[iy * nx + ix + 1] - c;
                const double f11 = field[(iy + 1) * nx + ix + 1] - c;
                const double f01 = field[(iy + 1) * nx + ix] - c;
                const double x0 = spec.x0 + ix * dx, y0 = spec.y0 + iy * dy;
                std::vector<std::pair<double, double>> pts;
                auto edge = [&](double fa, double fb, double xa, double ya, double xb, double yb) {
                    if ((fa < 0.0) == (fb < 0.0)) return;
                    const double t = fa / (fa - fb);
                    pts.emplace_back(xa + t * (xb - xa), ya + t * (yb - ya));
                };
                edge(f00, f10, x0, y0, x0 + dx, y0);
                edge(f10, f11, x0 + dx, y0, x0 + dx, y0 + dy);
                edge(f11, f01, x0 + dx, y0 + dy, x0, y0 + dy);
                edge(f01, f00, x0, y0 + dy, x0, y0);
                if (pts.size() >= 2)
                    os << "M" << fmt(px(pts[0].first)) << " " << fmt(py(pts[0].second)) << "L"
                       << fmt(px(pts[1].first)) << " " << fmt(py(pts[1].second));
            }
        }
        os << "'/>\n";
    }
    if (!overlay.empty()) {
        os << "<path fill='none' stroke='black' stroke-width='2' stroke-dasharray='6,4' d='M";
        bool first = true;
        for (const auto& [x, y] : overlay) {
            if (!first) os << "L";
            os << fmt(px(x)) << " " << fmt(py(y));
            first = false;
        }
        os << "'/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace io
} // namespace wgtorus

#endif
