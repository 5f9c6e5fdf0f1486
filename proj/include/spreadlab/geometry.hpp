#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spreadlab/maps.hpp"
#include "spreadlab/vec2.hpp"

namespace spreadlab {

struct Ball {
    Vec2 center;
    double radius = 0.0;
};

enum class Density { certified_dense, certified_not_dense, inconclusive };

const char* to_string(Density d);
std::optional<Density> density_from_string(const std::string& s);

// Three-valued density verdict. max_gap is the largest witness-node distance
// to the cloud; certified_dense guarantees max_gap + grid_spacing*sqrt(2)/2
// <= eps, certified_not_dense exhibits a node inside the region farther than
// eps plus the cloud's geometric tolerance.
struct DensityVerdict {
    Density status = Density::inconclusive;
    double max_gap = 0.0;
    double grid_spacing = 0.0;
};

// Uniform hash grid over a fixed point set; nearest-neighbor queries are
// exact (identical to brute force, bit for bit).
class SpatialIndex {
public:
    SpatialIndex(std::span<const Vec2> pts, double cell_size);
    double cell_size() const { return cell_; }
    double nearest_sq(std::span<const Vec2> pts, Vec2 z) const;

private:
    double cell_;
    long long min_ix_ = 0, max_ix_ = 0, min_iy_ = 0, max_iy_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

// Finite point sample of a planar set, with the Hausdorff tolerance of the
// sample to the true set (0 for exact point data).
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::vector<Vec2> pts, double geometric_tolerance = 0.0);

    const std::vector<Vec2>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    double geometric_tolerance() const { return tol_; }

    void build_index(double cell_size);
    bool has_index() const { return index_.has_value(); }
    const SpatialIndex* index() const { return index_ ? &*index_ : nullptr; }

    // Exact Euclidean distance from z to the nearest cloud point.
    double nearest_distance(Vec2 z) const;

    PointCloud translated(Vec2 v) const;

private:
    std::vector<Vec2> pts_;
    double tol_ = 0.0;
    std::optional<SpatialIndex> index_;
};

double nearest_distance(const PointCloud& cloud, Vec2 z);

// Certified density check of the cloud inside a closed ball. Witness nodes on
// a square grid of the given spacing; the dense direction tests every node of
// the ball inflated by the grid half-diagonal (so the certificate covers all
// of the ball), the not-dense direction only nodes inside the ball.
DensityVerdict eps_dense(const PointCloud& cloud, const Ball& ball, double eps, double grid_spacing);

// Same check over the axis-aligned square |x - c| <= halfwidth.
DensityVerdict eps_dense_square(const PointCloud& cloud, Vec2 center, double halfwidth, double eps,
                                double grid_spacing);

// Image of the segment [a, b] as a vertex chain. tolerance bounds both the
// consecutive-vertex gaps and the Hausdorff distance to the true image curve.
struct Polyline {
    std::vector<Vec2> vertices;
    double tolerance = 0.0;
    Vec2 source_a, source_b;

    PointCloud to_cloud() const { return PointCloud(vertices, tolerance); }
};

// Subdivides [a, b] until sub-length * lipschitz_bound(e) <= tol and maps the
// nodes through e. Throws resource_error when the subdivision would need more
// than max_points vertices.
Polyline refine_segment_image(const MapExpr& e, Vec2 a, Vec2 b, double tol,
                              std::size_t max_points = 10'000'000);

// Extent of the cloud's projection onto the unit direction u.
double direction_width(const PointCloud& cloud, Vec2 u);

// Two-column CSV, headerless, 17 significant digits (round-trips doubles).
void save_csv(std::span<const Vec2> pts, const std::filesystem::path& path);
std::vector<Vec2> load_csv(const std::filesystem::path& path);

}  // namespace spreadlab
