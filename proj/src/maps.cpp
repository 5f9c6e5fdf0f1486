#include "spreadlab/maps.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "spreadlab/errors.hpp"

namespace spreadlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_finite(Vec2 z, const char* where) {
    if (!finite(z)) throw std::domain_error(std::string(where) + ": non-finite input coordinates");
}

template <class S>
struct Pt {
    S x, y;
};

inline double real_part(double x) { return x; }
inline double real_part(std::complex<double> x) { return x.real(); }

// One period of the shear wave cos(2 pi q x). The phase q*x is reduced by its
// integer part before the 2 pi scaling; with that, inputs that differ by an
// exactly-representable integer (or by 1/q when q*x + 1 is exact) produce bit
// identical values, so equivariance is not at the mercy of trig argument size.
template <class S>
S shear_wave(long long freq, S coord) {
    S t = static_cast<double>(freq) * coord;
    t -= std::floor(real_part(t));
    return std::cos(kTwoPi * t);
}

// cos works for double and std::complex<double> alike.
template <class S>
Pt<S> eval_node(const MapExpr::Node& n, Pt<S> z) {
    if (auto* v = std::get_if<MapExpr::VShear>(&n)) {
        z.y += static_cast<double>(v->amplitude) * shear_wave(v->frequency, z.x);
        return z;
    }
    if (auto* h = std::get_if<MapExpr::HShear>(&n)) {
        z.x += static_cast<double>(h->amplitude) * shear_wave(h->frequency, z.y);
        return z;
    }
    if (auto* t = std::get_if<MapExpr::Translate>(&n)) {
        z.x += t->offset.x;
        z.y += t->offset.y;
        return z;
    }
    const auto& c = std::get<MapExpr::Composite>(n);
    for (auto it = c.parts.rbegin(); it != c.parts.rend(); ++it) z = eval_node(it->node(), z);
    return z;
}

template <class S>
Pt<S> eval_inverse_node(const MapExpr::Node& n, Pt<S> z) {
    if (auto* v = std::get_if<MapExpr::VShear>(&n)) {
        z.y -= static_cast<double>(v->amplitude) * shear_wave(v->frequency, z.x);
        return z;
    }
    if (auto* h = std::get_if<MapExpr::HShear>(&n)) {
        z.x -= static_cast<double>(h->amplitude) * shear_wave(h->frequency, z.y);
        return z;
    }
    if (auto* t = std::get_if<MapExpr::Translate>(&n)) {
        z.x -= t->offset.x;
        z.y -= t->offset.y;
        return z;
    }
    const auto& c = std::get<MapExpr::Composite>(n);
    for (const auto& part : c.parts) z = eval_inverse_node(part.node(), z);
    return z;
}

void flatten(const MapExpr& e, std::vector<MapExpr>& out) {
    if (auto* c = std::get_if<MapExpr::Composite>(&e.node())) {
        for (const auto& part : c->parts) flatten(part, out);
    } else {
        out.push_back(e);
    }
}

bool is_inverse_pair(const MapExpr::Node& a, const MapExpr::Node& b) {
    if (auto* va = std::get_if<MapExpr::VShear>(&a)) {
        auto* vb = std::get_if<MapExpr::VShear>(&b);
        return vb && vb->amplitude == -va->amplitude && vb->frequency == va->frequency;
    }
    if (auto* ha = std::get_if<MapExpr::HShear>(&a)) {
        auto* hb = std::get_if<MapExpr::HShear>(&b);
        return hb && hb->amplitude == -ha->amplitude && hb->frequency == ha->frequency;
    }
    if (auto* ta = std::get_if<MapExpr::Translate>(&a)) {
        auto* tb = std::get_if<MapExpr::Translate>(&b);
        return tb && tb->offset.x == -ta->offset.x && tb->offset.y == -ta->offset.y;
    }
    return false;
}

}  // namespace

MapExpr::MapExpr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

MapExpr MapExpr::vshear(long long amplitude, long long frequency) {
    if (frequency < 1) throw std::invalid_argument("vshear: frequency must be positive");
    if (amplitude == 0) throw std::invalid_argument("vshear: amplitude must be nonzero");
    return MapExpr(VShear{amplitude, frequency});
}

MapExpr MapExpr::hshear(long long amplitude, long long frequency) {
    if (frequency < 1) throw std::invalid_argument("hshear: frequency must be positive");
    if (amplitude == 0) throw std::invalid_argument("hshear: amplitude must be nonzero");
    return MapExpr(HShear{amplitude, frequency});
}

MapExpr MapExpr::translate(Vec2 v) {
    require_finite(v, "translate");
    return MapExpr(Translate{v});
}

MapExpr MapExpr::identity() { return translate({0.0, 0.0}); }

MapExpr MapExpr::compose(MapExpr outer, MapExpr inner) {
    return MapExpr(Composite{{std::move(outer), std::move(inner)}});
}

MapExpr MapExpr::compose(std::vector<MapExpr> parts) { return MapExpr(Composite{std::move(parts)}); }

MapExpr inverse(const MapExpr& e) {
    if (auto* v = std::get_if<MapExpr::VShear>(&e.node()))
        return MapExpr::vshear(-v->amplitude, v->frequency);
    if (auto* h = std::get_if<MapExpr::HShear>(&e.node()))
        return MapExpr::hshear(-h->amplitude, h->frequency);
    if (auto* t = std::get_if<MapExpr::Translate>(&e.node()))
        return MapExpr::translate(-t->offset);
    const auto& c = std::get<MapExpr::Composite>(e.node());
    std::vector<MapExpr> parts;
    parts.reserve(c.parts.size());
    for (auto it = c.parts.rbegin(); it != c.parts.rend(); ++it) parts.push_back(inverse(*it));
    return MapExpr::compose(std::move(parts));
}

MapExpr conjugate(const MapExpr& h, const MapExpr& g) {
    return MapExpr::compose({h, g, inverse(h)});
}

Vec2 eval(const MapExpr& e, Vec2 z) {
    require_finite(z, "eval");
    auto r = eval_node<double>(e.node(), {z.x, z.y});
    return {r.x, r.y};
}

Vec2 eval_inverse(const MapExpr& e, Vec2 z) {
    require_finite(z, "eval_inverse");
    auto r = eval_inverse_node<double>(e.node(), {z.x, z.y});
    return {r.x, r.y};
}

std::optional<ConjugateForm> as_conjugate_translation(const MapExpr& e) {
    std::vector<MapExpr> flat;
    flatten(e, flat);
    const size_t len = flat.size();
    if (len % 2 == 0) return std::nullopt;
    const size_t t = len / 2;
    auto* mid = std::get_if<MapExpr::Translate>(&flat[t].node());
    if (!mid) return std::nullopt;
    for (size_t i = 0; i < t; ++i) {
        if (!is_inverse_pair(flat[i].node(), flat[len - 1 - i].node())) return std::nullopt;
    }
    std::vector<MapExpr> prefix(flat.begin(), flat.begin() + static_cast<long>(t));
    return ConjugateForm{MapExpr::compose(std::move(prefix)), mid->offset};
}

Vec2 iterate(const MapExpr& e, Vec2 z, long long k) {
    if (k < 1) throw std::invalid_argument("iterate: k must be >= 1");
    require_finite(z, "iterate");
    if (auto cf = as_conjugate_translation(e)) {
        Vec2 w = eval_inverse(cf->h, z);
        w += {static_cast<double>(k) * cf->shift.x, static_cast<double>(k) * cf->shift.y};
        Vec2 out = eval(cf->h, w);
        if (!finite(out)) throw numeric_error("iterate: non-finite coordinates", k);
        return out;
    }
    return iterate_naive(e, z, k);
}

Vec2 iterate_naive(const MapExpr& e, Vec2 z, long long k) {
    if (k < 1) throw std::invalid_argument("iterate: k must be >= 1");
    require_finite(z, "iterate");
    for (long long i = 1; i <= k; ++i) {
        z = eval(e, z);
        if (!finite(z)) throw numeric_error("iterate: non-finite coordinates", i);
    }
    return z;
}

double lipschitz_bound(const MapExpr& e) {
    if (auto* v = std::get_if<MapExpr::VShear>(&e.node()))
        return 1.0 + kTwoPi * static_cast<double>(v->frequency) * std::abs(static_cast<double>(v->amplitude));
    if (auto* h = std::get_if<MapExpr::HShear>(&e.node()))
        return 1.0 + kTwoPi * static_cast<double>(h->frequency) * std::abs(static_cast<double>(h->amplitude));
    if (std::get_if<MapExpr::Translate>(&e.node())) return 1.0;
    const auto& c = std::get<MapExpr::Composite>(e.node());
    double prod = 1.0;
    for (const auto& part : c.parts) prod *= lipschitz_bound(part);
    return prod;
}

Mat2 jacobian(const MapExpr& e, Vec2 z) {
    require_finite(z, "jacobian");
    if (auto* v = std::get_if<MapExpr::VShear>(&e.node())) {
        double w = kTwoPi * static_cast<double>(v->frequency);
        double t = static_cast<double>(v->frequency) * z.x;
        t -= std::floor(t);
        return {1.0, 0.0, -static_cast<double>(v->amplitude) * w * std::sin(kTwoPi * t), 1.0};
    }
    if (auto* h = std::get_if<MapExpr::HShear>(&e.node())) {
        double w = kTwoPi * static_cast<double>(h->frequency);
        double t = static_cast<double>(h->frequency) * z.y;
        t -= std::floor(t);
        return {1.0, -static_cast<double>(h->amplitude) * w * std::sin(kTwoPi * t), 0.0, 1.0};
    }
    if (std::get_if<MapExpr::Translate>(&e.node())) return {};
    const auto& c = std::get<MapExpr::Composite>(e.node());
    Mat2 J;
    Vec2 cur = z;
    for (auto it = c.parts.rbegin(); it != c.parts.rend(); ++it) {
        J = jacobian(*it, cur) * J;
        cur = eval(*it, cur);
    }
    return J;
}

Mat2 numeric_jacobian(const MapExpr& e, Vec2 z, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("numeric_jacobian: step must be positive");
    Vec2 xp = eval(e, {z.x + step, z.y});
    Vec2 xm = eval(e, {z.x - step, z.y});
    Vec2 yp = eval(e, {z.x, z.y + step});
    Vec2 ym = eval(e, {z.x, z.y - step});
    double inv2h = 0.5 / step;
    return {(xp.x - xm.x) * inv2h, (yp.x - ym.x) * inv2h,
            (xp.y - xm.y) * inv2h, (yp.y - ym.y) * inv2h};
}

namespace {

using C = std::complex<double>;

// Euclidean modulus of the periodic part e(z) - z at one band point.
double periodic_part_mod(const MapExpr& e, C zx, C zy) {
    auto r = eval_node<C>(e.node(), {zx, zy});
    C g1 = r.x - zx;
    C g2 = r.y - zy;
    return std::sqrt(std::norm(g1) + std::norm(g2));
}

void validate_query(const BandNormQuery& q) {
    if (!(q.rho >= 0.0) || !std::isfinite(q.rho)) throw std::invalid_argument("band norm: rho must be >= 0");
    if (q.grid_density < 16) throw std::invalid_argument("band norm: grid_density must be >= 16");
}

// Which input coordinates the periodic part e(z) - z can depend on, as a mask
// (bit 0: x, bit 1: y). Conservative: dependence only ever accumulates, so a
// dropped axis is provably irrelevant to the sup.
unsigned periodic_part_deps(const MapExpr& e) {
    unsigned total_x = 1, total_y = 2, g = 0;
    std::vector<MapExpr> parts;
    flatten(e, parts);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (std::get_if<MapExpr::VShear>(&it->node())) {
            g |= total_x;
            total_y |= total_x;
        } else if (std::get_if<MapExpr::HShear>(&it->node())) {
            g |= total_y;
            total_x |= total_y;
        }
    }
    return g;
}

// Visits the distinguished boundary grid: real parts over one period at the
// query density, imaginary parts at the sign choices of rho. Axes the
// expression's periodic part cannot depend on collapse to a single point.
template <class F>
void for_each_band_point(const BandNormQuery& q, unsigned deps, F&& f) {
    const int d = q.grid_density;
    const int signs = q.rho == 0.0 ? 1 : 2;
    const int sweep_x = (deps & 1u) ? d : 0;
    const int sweep_y = (deps & 2u) ? d : 0;
    const int signs_x = (deps & 1u) ? signs : 1;
    const int signs_y = (deps & 2u) ? signs : 1;
    for (int sx = 0; sx < signs_x; ++sx) {
        for (int sy = 0; sy < signs_y; ++sy) {
            double ix = (sx == 0 ? q.rho : -q.rho);
            double iy = (sy == 0 ? q.rho : -q.rho);
            for (int i = 0; i <= sweep_x; ++i) {
                for (int j = 0; j <= sweep_y; ++j) {
                    f(C(static_cast<double>(i) / d, ix), C(static_cast<double>(j) / d, iy));
                }
            }
        }
    }
}

}  // namespace

double band_norm(const MapExpr& e, const BandNormQuery& query) {
    validate_query(query);
    if (auto* v = std::get_if<MapExpr::VShear>(&e.node()))
        return std::abs(static_cast<double>(v->amplitude)) *
               std::cosh(kTwoPi * static_cast<double>(v->frequency) * query.rho);
    if (auto* h = std::get_if<MapExpr::HShear>(&e.node()))
        return std::abs(static_cast<double>(h->amplitude)) *
               std::cosh(kTwoPi * static_cast<double>(h->frequency) * query.rho);
    if (auto* t = std::get_if<MapExpr::Translate>(&e.node())) return norm(t->offset);
    const auto& c = std::get<MapExpr::Composite>(e.node());
    if (c.parts.size() == 1) return band_norm(c.parts[0], query);
    double sup = 0.0;
    for_each_band_point(query, periodic_part_deps(e),
                        [&](C zx, C zy) { sup = std::max(sup, periodic_part_mod(e, zx, zy)); });
    return sup;
}

double band_norm_numeric(const MapExpr& e, const BandNormQuery& query) {
    validate_query(query);
    double sup = 0.0;
    for_each_band_point(query, periodic_part_deps(e),
                        [&](C zx, C zy) { sup = std::max(sup, periodic_part_mod(e, zx, zy)); });
    return sup;
}

double d_rho(const MapExpr& e1, const MapExpr& e2, const BandNormQuery& query) {
    validate_query(query);
    std::vector<std::pair<C, C>> diff;
    for_each_band_point(query, periodic_part_deps(e1) | periodic_part_deps(e2), [&](C zx, C zy) {
        auto r1 = eval_node<C>(e1.node(), {zx, zy});
        auto r2 = eval_node<C>(e2.node(), {zx, zy});
        diff.emplace_back(r1.x - r2.x, r1.y - r2.y);
    });
    C mean1 = 0.0, mean2 = 0.0;
    for (const auto& [g1, g2] : diff) {
        mean1 += g1;
        mean2 += g2;
    }
    mean1 /= static_cast<double>(diff.size());
    mean2 /= static_cast<double>(diff.size());

    // Spread of the periodic part around its mean bounds how far a useful
    // integer shift can sit: |g + s| >= |s + mean| - spread pointwise.
    double spread = 0.0;
    for (const auto& [g1, g2] : diff)
        spread = std::max(spread, std::sqrt(std::norm(g1 - mean1) + std::norm(g2 - mean2)));

    auto sup_for_shift = [&](double p, double q) {
        double sup = 0.0;
        for (const auto& [g1, g2] : diff)
            sup = std::max(sup, std::sqrt(std::norm(g1 + p) + std::norm(g2 + q)));
        return sup;
    };

    const double cx = -std::round(mean1.real());
    const double cy = -std::round(mean2.real());
    double best = std::numeric_limits<double>::infinity();
    for (long long ring = 0;; ++ring) {
        // Any shift on this ring sits at least ring - 1/2 from -mean, so its
        // sup is at least ring - 1/2 - spread; stop once that can't win.
        if (ring > 2 && static_cast<double>(ring) - 1.0 - spread > best) break;
        for (long long dx = -ring; dx <= ring; ++dx) {
            for (long long dy = -ring; dy <= ring; ++dy) {
                if (std::max(std::llabs(dx), std::llabs(dy)) != ring) continue;
                best = std::min(best, sup_for_shift(cx + static_cast<double>(dx),
                                                    cy + static_cast<double>(dy)));
            }
        }
    }
    return best;
}

}  // namespace spreadlab
