#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "spreadlab/vec2.hpp"

namespace spreadlab {

// Lift of a torus diffeomorphism homotopic to the identity, as a composition
// tree over three exact primitives:
//
//   vshear(m, q):  (x, y) -> (x, y + m cos(2 pi q x))
//   hshear(n, q):  (x, y) -> (x + n cos(2 pi q y), y)
//   translate(v):  z -> z + v
//
// Every tree commutes with integer translations, preserves area, and has a
// closed-form inverse. inverse() distributes at construction time (shears and
// translations invert by negating amplitude/offset, compositions reverse), so
// no inverse node exists and evaluation never recurses through one.
// Expressions are immutable after construction and cheap to copy.
class MapExpr {
public:
    struct VShear {
        long long amplitude;
        long long frequency;
    };
    struct HShear {
        long long amplitude;
        long long frequency;
    };
    struct Translate {
        Vec2 offset;
    };
    struct Composite {
        std::vector<MapExpr> parts;  // applied right to left
    };
    using Node = std::variant<VShear, HShear, Translate, Composite>;

    static MapExpr vshear(long long amplitude, long long frequency);
    static MapExpr hshear(long long amplitude, long long frequency);
    static MapExpr translate(Vec2 v);
    static MapExpr identity();
    static MapExpr compose(MapExpr outer, MapExpr inner);
    static MapExpr compose(std::vector<MapExpr> parts);

    const Node& node() const { return *node_; }

private:
    explicit MapExpr(Node n);
    std::shared_ptr<const Node> node_;
};

MapExpr inverse(const MapExpr& e);

// h g h^{-1}
MapExpr conjugate(const MapExpr& h, const MapExpr& g);

Vec2 eval(const MapExpr& e, Vec2 z);
Vec2 eval_inverse(const MapExpr& e, Vec2 z);

// k-th forward iterate, k >= 1. When the expression is recognized as a
// conjugated translation h T_v h^{-1} the iterate collapses to h(h^{-1}(z)+kv);
// otherwise the map is applied k times.
Vec2 iterate(const MapExpr& e, Vec2 z, long long k);
Vec2 iterate_naive(const MapExpr& e, Vec2 z, long long k);

struct ConjugateForm {
    MapExpr h;
    Vec2 shift;
};
std::optional<ConjugateForm> as_conjugate_translation(const MapExpr& e);

// Certified global Lipschitz bound: 1 for translations, 1 + 2 pi q |m| for a
// shear, product over compositions.
double lipschitz_bound(const MapExpr& e);

Mat2 jacobian(const MapExpr& e, Vec2 z);
Mat2 numeric_jacobian(const MapExpr& e, Vec2 z, double step = 1e-6);

struct BandNormQuery {
    double rho = 0.0;       // band half-width; 0 degenerates to the real sup
    int grid_density = 64;  // samples per unit axis for the numeric sup
};

// Sup of the Euclidean modulus of the periodic part g(z) = e(z) - z over the
// complex band |Im| <= rho in both coordinates. Closed form for a single
// primitive; numeric sup over the distinguished boundary (Im = +-rho, real
// parts over one period) for composites.
double band_norm(const MapExpr& e, const BandNormQuery& query);

// The boundary-grid sup alone, regardless of structure. Used to cross-check
// the closed forms returned by band_norm for single primitives.
double band_norm_numeric(const MapExpr& e, const BandNormQuery& query);

// Band distance between two lifts: inf over integer shifts (p, q) of the band
// norm of e1 - e2 + (p, q). The shift search starts at the rounded mean
// displacement and widens until no farther shift can beat the current best.
double d_rho(const MapExpr& e1, const MapExpr& e2, const BandNormQuery& query);

}  // namespace spreadlab
