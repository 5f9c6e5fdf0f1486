#include "spreadlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spreadlab/errors.hpp"

namespace spreadlab {

namespace {

constexpr double kHalfDiag = 0.70710678118654752440;  // sqrt(2)/2

std::uint64_t cell_key(long long ix, long long iy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
}

long long cell_of(double v, double cell) { return static_cast<long long>(std::floor(v / cell)); }

double dist_sq(Vec2 a, Vec2 b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

const char* to_string(Density d) {
    switch (d) {
        case Density::certified_dense: return "certified-dense";
        case Density::certified_not_dense: return "certified-not-dense";
        default: return "inconclusive";
    }
}

std::optional<Density> density_from_string(const std::string& s) {
    if (s == "certified-dense") return Density::certified_dense;
    if (s == "certified-not-dense") return Density::certified_not_dense;
    if (s == "inconclusive") return Density::inconclusive;
    return std::nullopt;
}

SpatialIndex::SpatialIndex(std::span<const Vec2> pts, double cell_size) : cell_(cell_size) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw std::invalid_argument("SpatialIndex: cell size must be positive");
    if (pts.empty()) throw std::domain_error("SpatialIndex: empty point set");
    min_ix_ = max_ix_ = cell_of(pts[0].x, cell_);
    min_iy_ = max_iy_ = cell_of(pts[0].y, cell_);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        long long ix = cell_of(pts[i].x, cell_);
        long long iy = cell_of(pts[i].y, cell_);
        min_ix_ = std::min(min_ix_, ix);
        max_ix_ = std::max(max_ix_, ix);
        min_iy_ = std::min(min_iy_, iy);
        max_iy_ = std::max(max_iy_, iy);
        cells_[cell_key(ix, iy)].push_back(static_cast<std::uint32_t>(i));
    }
}

double SpatialIndex::nearest_sq(std::span<const Vec2> pts, Vec2 z) const {
    const long long zx = cell_of(z.x, cell_);
    const long long zy = cell_of(z.y, cell_);
    // Seed with an arbitrary point so the ring scan has a finite horizon.
    double best = dist_sq(pts[0], z);

    // Rings closer than the occupied cell box are empty; starting there keeps
    // far-away queries from walking the gap cell by cell. The skipped rings
    // cannot trigger the early break either: the seed point lies inside the
    // box, so best already exceeds the box's ring bound.
    auto axis_gap = [](long long v, long long lo, long long hi) {
        return v < lo ? lo - v : (v > hi ? v - hi : 0);
    };
    const long long first =
        std::max(axis_gap(zx, min_ix_, max_ix_), axis_gap(zy, min_iy_, max_iy_));
    const long long reach = std::max(std::max(std::llabs(zx - min_ix_), std::llabs(zx - max_ix_)),
                                     std::max(std::llabs(zy - min_iy_), std::llabs(zy - max_iy_)));
    for (long long ring = first; ring <= reach; ++ring) {
        // Cells at Chebyshev cell-distance ring are at least (ring-1)*cell away.
        if (ring >= 1) {
            double lo = (static_cast<double>(ring) - 1.0) * cell_;
            if (lo * lo > best) break;
        }
        auto visit = [&](long long ix, long long iy) {
            auto it = cells_.find(cell_key(ix, iy));
            if (it == cells_.end()) return;
            for (std::uint32_t idx : it->second) best = std::min(best, dist_sq(pts[idx], z));
        };
        for (long long ix = std::max(zx - ring, min_ix_); ix <= std::min(zx + ring, max_ix_); ++ix) {
            if (std::llabs(ix - zx) == ring) {
                for (long long iy = std::max(zy - ring, min_iy_);
                     iy <= std::min(zy + ring, max_iy_); ++iy)
                    visit(ix, iy);
            } else {
                // Interior columns touch the ring only at its two rows.
                if (zy - ring >= min_iy_ && zy - ring <= max_iy_) visit(ix, zy - ring);
                if (ring >= 1 && zy + ring >= min_iy_ && zy + ring <= max_iy_) visit(ix, zy + ring);
            }
        }
    }
    return best;
}

PointCloud::PointCloud(std::vector<Vec2> pts, double geometric_tolerance)
    : pts_(std::move(pts)), tol_(geometric_tolerance) {
    if (tol_ < 0.0 || !std::isfinite(tol_))
        throw std::invalid_argument("PointCloud: tolerance must be >= 0");
    for (const Vec2& p : pts_)
        if (!finite(p)) throw std::domain_error("PointCloud: non-finite point");
}

void PointCloud::build_index(double cell_size) { index_.emplace(pts_, cell_size); }

double PointCloud::nearest_distance(Vec2 z) const {
    if (pts_.empty()) throw std::domain_error("nearest_distance: empty cloud");
    if (!finite(z)) throw std::domain_error("nearest_distance: non-finite query");
    if (index_) return std::sqrt(index_->nearest_sq(pts_, z));
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& p : pts_) best = std::min(best, dist_sq(p, z));
    return std::sqrt(best);
}

PointCloud PointCloud::translated(Vec2 v) const {
    std::vector<Vec2> moved;
    moved.reserve(pts_.size());
    for (const Vec2& p : pts_) moved.push_back(p + v);
    return PointCloud(std::move(moved), tol_);
}

double nearest_distance(const PointCloud& cloud, Vec2 z) { return cloud.nearest_distance(z); }

namespace {

// Shared witness-grid walk for ball and square regions. cover_fn marks nodes
// the dense certificate must test (an inflation of the region that is a
// (spacing*sqrt(2)/2)-cover of it); inside_fn marks nodes whose failure
// witnesses non-density.
template <class CoverFn, class InsideFn>
DensityVerdict density_scan(const PointCloud& cloud, Vec2 center, double extent, double eps,
                            double spacing, CoverFn&& cover_fn, InsideFn&& inside_fn) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps_dense: eps must be positive");
    if (!(spacing > 0.0) || !(spacing <= eps))
        throw std::invalid_argument("eps_dense: grid_spacing must satisfy 0 < spacing <= eps");
    if (!(extent > 0.0) || !std::isfinite(extent))
        throw std::invalid_argument("eps_dense: degenerate region");

    const double margin = spacing * kHalfDiag;
    const long long span = static_cast<long long>(std::ceil((extent + margin) / spacing)) + 1;
    if (span > 2000) {
        unsigned long long need = static_cast<unsigned long long>(span) * 2ull + 1ull;
        throw resource_error("eps_dense: witness grid too large", need * need);
    }

    // A local index keeps queries exact and the cloud untouched.
    std::optional<SpatialIndex> local;
    const SpatialIndex* idx = cloud.index();
    if (!idx && !cloud.empty()) {
        local.emplace(std::span<const Vec2>(cloud.points()), eps);
        idx = &*local;
    }
    auto gap_at = [&](Vec2 node) {
        if (cloud.empty()) return std::numeric_limits<double>::infinity();
        return std::sqrt(idx->nearest_sq(cloud.points(), node));
    };

    double max_cover = 0.0;
    double max_inside = 0.0;
    bool any_inside = false;
    for (long long ix = -span; ix <= span; ++ix) {
        for (long long iy = -span; iy <= span; ++iy) {
            Vec2 off{static_cast<double>(ix) * spacing, static_cast<double>(iy) * spacing};
            bool cover = cover_fn(off);
            if (!cover) continue;
            double gap = gap_at(center + off);
            max_cover = std::max(max_cover, gap);
            if (inside_fn(off)) {
                any_inside = true;
                max_inside = std::max(max_inside, gap);
            }
        }
    }

    DensityVerdict v;
    v.grid_spacing = spacing;
    v.max_gap = max_cover;
    if (max_cover + margin <= eps)
        v.status = Density::certified_dense;
    else if (any_inside && max_inside > eps + cloud.geometric_tolerance())
        v.status = Density::certified_not_dense;
    else
        v.status = Density::inconclusive;
    return v;
}

}  // namespace

DensityVerdict eps_dense(const PointCloud& cloud, const Ball& ball, double eps, double grid_spacing) {
    if (!finite(ball.center)) throw std::domain_error("eps_dense: non-finite ball center");
    const double margin = grid_spacing * kHalfDiag;
    const double r = ball.radius;
    return density_scan(
        cloud, ball.center, r, eps, grid_spacing,
        [&](Vec2 off) { return norm_sq(off) <= (r + margin) * (r + margin); },
        [&](Vec2 off) { return norm_sq(off) <= r * r; });
}

DensityVerdict eps_dense_square(const PointCloud& cloud, Vec2 center, double halfwidth, double eps,
                                double grid_spacing) {
    if (!finite(center)) throw std::domain_error("eps_dense_square: non-finite center");
    const double pad = grid_spacing / 2.0;  // per-axis rounding stays within spacing/2
    return density_scan(
        cloud, center, halfwidth, eps, grid_spacing,
        [&](Vec2 off) {
            return std::abs(off.x) <= halfwidth + pad && std::abs(off.y) <= halfwidth + pad;
        },
        [&](Vec2 off) { return std::abs(off.x) <= halfwidth && std::abs(off.y) <= halfwidth; });
}

Polyline refine_segment_image(const MapExpr& e, Vec2 a, Vec2 b, double tol, std::size_t max_points) {
    if (!finite(a) || !finite(b)) throw std::domain_error("refine_segment_image: non-finite endpoints");
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw std::invalid_argument("refine_segment_image: tolerance must be positive");
    const double len = norm(b - a);
    const double lip = lipschitz_bound(e);
    const double need = std::ceil(std::max(1.0, len * lip / tol));
    if (need + 1.0 > static_cast<double>(max_points))
        throw resource_error("refine_segment_image: point budget exceeded",
                             static_cast<unsigned long long>(need + 1.0));
    const std::size_t n = static_cast<std::size_t>(need);

    Polyline poly;
    poly.source_a = a;
    poly.source_b = b;
    poly.tolerance = len * lip / static_cast<double>(n);
    poly.vertices.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double s = static_cast<double>(i) / static_cast<double>(n);
        poly.vertices.push_back(eval(e, a + s * (b - a)));
    }
    return poly;
}

double direction_width(const PointCloud& cloud, Vec2 u) {
    if (cloud.empty()) throw std::domain_error("direction_width: empty cloud");
    if (std::abs(norm(u) - 1.0) > 1e-12)
        throw std::invalid_argument("direction_width: direction must be unit length");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : cloud.points()) {
        double t = dot(p, u);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return hi - lo;
}

void save_csv(std::span<const Vec2> pts, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw std::runtime_error("save_csv: cannot open " + path.string());
    for (const Vec2& p : pts) std::fprintf(f, "%.17g,%.17g\n", p.x, p.y);
    std::fclose(f);
}

std::vector<Vec2> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path.string());
    std::vector<Vec2> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* s = line.c_str();
        char* end = nullptr;
        double x = std::strtod(s, &end);
        if (end == s || *end != ',') throw std::runtime_error("load_csv: malformed line: " + line);
        const char* s2 = end + 1;
        double y = std::strtod(s2, &end);
        if (end == s2) throw std::runtime_error("load_csv: malformed line: " + line);
        pts.push_back({x, y});
    }
    return pts;
}

}  // namespace spreadlab
