#include "spreadlab/figure.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "spreadlab/geometry.hpp"
#include "spreadlab/maps.hpp"

namespace spreadlab {

namespace {

struct Box {
    double x0, y0, x1, y1;
};

// Liang-Barsky segment clip. Returns false when the segment misses the box.
bool clip_segment(const Box& box, Vec2 a, Vec2 b, Vec2& ca, Vec2& cb) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    auto clip_edge = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        double r = q / p;
        if (p < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
        return true;
    };
    if (!clip_edge(-dx, a.x - box.x0) || !clip_edge(dx, box.x1 - a.x) ||
        !clip_edge(-dy, a.y - box.y0) || !clip_edge(dy, box.y1 - a.y))
        return false;
    ca = {a.x + t0 * dx, a.y + t0 * dy};
    cb = {a.x + t1 * dx, a.y + t1 * dy};
    return true;
}

// Splits a vertex chain into the maximal runs that stay inside the box.
std::vector<std::vector<Vec2>> clip_polyline(const std::vector<Vec2>& pts, const Box& box) {
    std::vector<std::vector<Vec2>> runs;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Vec2 ca, cb;
        if (!clip_segment(box, pts[i], pts[i + 1], ca, cb)) continue;
        if (!runs.empty()) {
            const Vec2 last = runs.back().back();
            if (std::abs(last.x - ca.x) <= 1e-12 && std::abs(last.y - ca.y) <= 1e-12) {
                runs.back().push_back(cb);
                continue;
            }
        }
        runs.push_back({ca, cb});
    }
    return runs;
}

void append(std::string& out, const char* fmt, double a, double b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    out += buf;
}

}  // namespace

std::string figure_svg(const SpreadParams& p, const FigureOptions& opts) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("figure_svg: tol must be positive");
    const double n = static_cast<double>(p.n);
    const double gs = opts.grid_spacing > 0.0 ? opts.grid_spacing : (1.0 / n) / 4.0;
    if (!(gs > 0.0) || gs > 2.0 * n) throw std::invalid_argument("figure_svg: bad grid spacing");

    const SegmentPair segs = segments(p);
    const MapExpr e = opts.identity_map ? MapExpr::identity() : build_h(p);
    Polyline poly = refine_segment_image(e, segs.j_seg.a, segs.j_seg.b, opts.tol, opts.max_points);

    // World window [-n-1, n+1]^2 mapped to a fixed 1000x1000 viewbox,
    // y pointing up.
    const Box world{-n - 1.0, -n - 1.0, n + 1.0, n + 1.0};
    const double scale = 1000.0 / (world.x1 - world.x0);
    auto sx = [&](double x) { return (x - world.x0) * scale; };
    auto sy = [&](double y) { return 1000.0 - (y - world.y0) * scale; };

    std::string out;
    out.reserve(1 << 20);
    out +=
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1000\" "
        "height=\"1000\" viewBox=\"0 0 1000 1000\">\n"
        "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n";

    // Witness grid over the square [-n, n]^2.
    out += "<g stroke=\"#c8c8c8\" stroke-width=\"0.5\">\n";
    const long long lines = static_cast<long long>(std::llround(2.0 * n / gs));
    for (long long i = 0; i <= lines; ++i) {
        const double w = -n + static_cast<double>(i) * gs;
        if (w > n + 1e-12) break;
        append(out, "<line x1=\"%.2f\" y1=\"%.2f\"", sx(w), sy(-n));
        append(out, " x2=\"%.2f\" y2=\"%.2f\"/>\n", sx(w), sy(n));
        append(out, "<line x1=\"%.2f\" y1=\"%.2f\"", sx(-n), sy(w));
        append(out, " x2=\"%.2f\" y2=\"%.2f\"/>\n", sx(n), sy(w));
    }
    out += "</g>\n";

    // Square outline.
    append(out, "<rect x=\"%.2f\" y=\"%.2f\"", sx(-n), sy(n));
    append(out, " width=\"%.2f\" height=\"%.2f\"", 2.0 * n * scale, 2.0 * n * scale);
    out += " fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n";

    // Curve, split into the runs that stay inside the world window.
    for (const auto& run : clip_polyline(poly.vertices, world)) {
        out += "<polyline fill=\"none\" stroke=\"#b22222\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < run.size(); ++i) {
            if (i) out += ' ';
            append(out, "%.2f,%.2f", sx(run[i].x), sy(run[i].y));
        }
        out += "\"/>\n";
    }

    out += "</svg>\n";
    return out;
}

}  // namespace spreadlab
