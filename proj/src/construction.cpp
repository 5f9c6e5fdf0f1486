#include "spreadlab/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "spreadlab/errors.hpp"

namespace spreadlab {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

}  // namespace

std::optional<Rational> detect_rational(double alpha, double precision, long long max_denominator) {
    if (!std::isfinite(alpha)) throw std::domain_error("detect_rational: non-finite alpha");
    if (!(precision > 0.0)) throw std::invalid_argument("detect_rational: precision must be positive");

    double x = alpha;
    long long h1 = 1, h0 = 0;  // numerator convergents
    long long k1 = 0, k0 = 1;  // denominator convergents
    for (int step = 0; step < 64; ++step) {
        double fa = std::floor(x);
        // Reject before any integer multiply can overflow.
        if (std::abs(fa * static_cast<double>(h1) + static_cast<double>(h0)) > 9e17) return std::nullopt;
        if (fa * static_cast<double>(k1) + static_cast<double>(k0) > 9e17) return std::nullopt;
        long long a = static_cast<long long>(fa);
        long long h = a * h1 + h0;
        long long k = a * k1 + k0;
        if (k > max_denominator) return std::nullopt;
        double frac = x - fa;
        if (frac < precision) return Rational{h, k};
        h0 = h1;
        h1 = h;
        k0 = k1;
        k1 = k;
        x = 1.0 / frac;
    }
    return std::nullopt;
}

double SpreadParams::delta() const {
    return 2.0 * static_cast<double>(n) / (kPi * static_cast<double>(q) * static_cast<double>(m));
}

double SpreadParams::box_b() const {
    return 8.0 * static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(m);
}

double SpreadParams::box_a() const {
    double piqb = kPi * static_cast<double>(q) * box_b();
    return delta() + 2.0 * static_cast<double>(n) * piqb * piqb;
}

long long resolve_q(long long n, long long q) {
    if (n < 1 || q < 1) throw std::invalid_argument("resolve_q: n and q must be positive");
    if (q % n == 0 && q >= 2 * n) return q;
    return 2 * q * n;
}

SpreadParams validate_params(long long n, long long q, long long m, double alpha,
                             bool allow_rational) {
    if (n < 1 || q < 1 || m < 1)
        throw std::invalid_argument("validate_params: n, q, m must be positive integers");
    if (!std::isfinite(alpha)) throw std::domain_error("validate_params: non-finite alpha");

    SpreadParams p;
    p.n = n;
    p.q = q;
    p.m = m;
    p.alpha = alpha;
    if (q % n != 0) p.violations.push_back("q is not a multiple of n");
    if (q < 2 * n) p.violations.push_back("q < 2n");
    if (!(p.delta() / 2.0 < 1.0 / static_cast<double>(q)))
        p.violations.push_back("delta/2 >= 1/q");
    if (!(std::hypot(p.box_a(), p.box_b()) <= 1.0 / (2.0 * static_cast<double>(n))))
        p.violations.push_back("sqrt(a^2+b^2) > 1/(2n)");

    p.alpha_rational = detect_rational(alpha);
    if (p.alpha_rational) {
        if (!allow_rational) throw rational_alpha_error(p.alpha_rational->num, p.alpha_rational->den);
        p.rational_forced = true;
    }
    p.certified = p.violations.empty();
    return p;
}

long long choose_m(long long n, long long q) {
    if (n < 1 || q < 1) throw std::invalid_argument("choose_m: n and q must be positive");
    if (q % n != 0 || q < 2 * n)
        throw std::invalid_argument("choose_m: q must be a multiple of n with q >= 2n");
    for (long long m = 1; m <= 1'000'000'000; ++m) {
        SpreadParams p;
        p.n = n;
        p.q = q;
        p.m = m;
        bool small_delta = p.delta() / 2.0 < 1.0 / static_cast<double>(q);
        bool box_ok = std::hypot(p.box_a(), p.box_b()) <= 1.0 / (2.0 * static_cast<double>(n));
        if (small_delta && box_ok) return m;
    }
    throw search_exhausted_error("choose_m: no certifying m found", 0.0, 0);
}

MapExpr build_h(const SpreadParams& p) {
    return MapExpr::compose(MapExpr::hshear(p.n, p.q), MapExpr::vshear(p.m, p.q));
}

SegmentPair segments(const SpreadParams& p) {
    const double d = p.delta();
    const double jc = 1.0 / (4.0 * static_cast<double>(p.q));
    SegmentPair s;
    s.i_seg = {{-d, 0.0}, {d, 0.0}};
    s.j_seg = {{jc - d / 2.0, 0.0}, {jc + d / 2.0, 0.0}};
    return s;
}

Claim1Certificate claim1_verify(const SpreadParams& p, double tol, double grid_spacing,
                                std::size_t max_points) {
    if (!p.certified) throw std::invalid_argument("claim1_verify: parameters are not certified");
    const double n = static_cast<double>(p.n);
    const double radius = 1.0 / (2.0 * n);
    if (!(tol > 0.0) || !(tol < radius))
        throw std::invalid_argument("claim1_verify: tol must lie in (0, 1/(2n))");

    Claim1Certificate cert;
    cert.params = p;
    cert.requested_q = p.q;
    cert.delta = p.delta();
    cert.a = p.box_a();
    cert.b = p.box_b();
    cert.analytic_box_ok = std::hypot(cert.a, cert.b) <= radius;
    cert.tol = tol;
    cert.j_eps = 1.0 / n;
    cert.grid_spacing = grid_spacing > 0.0 ? grid_spacing : cert.j_eps / 4.0;

    const MapExpr h = build_h(p);
    const SegmentPair segs = segments(p);
    const Vec2 hole{n, static_cast<double>(p.m)};

    // Vertices lie on the true curve; points between them sit within tol of a
    // vertex, so vertex containment at radius - tol certifies the whole arc.
    Polyline pi = refine_segment_image(h, segs.i_seg.a, segs.i_seg.b, tol, max_points);
    double worst = 0.0;
    for (const Vec2& v : pi.vertices) worst = std::max(worst, norm(v - hole));
    cert.i_max_distance = worst;
    cert.i_segment_ok = worst <= radius - tol;

    // The first shear alone must already sweep J across [-n, n] vertically;
    // which endpoint goes up is left free.
    const MapExpr u = MapExpr::vshear(p.m, p.q);
    Polyline pu = refine_segment_image(u, segs.j_seg.a, segs.j_seg.b, tol, max_points);
    const Vec2 jc{(segs.j_seg.a.x + segs.j_seg.b.x) / 2.0, 0.0};
    const double c2 = eval(u, jc).y;
    double lo = 0.0, hi = 0.0;
    for (const Vec2& v : pu.vertices) {
        lo = std::min(lo, v.y - c2);
        hi = std::max(hi, v.y - c2);
    }
    cert.j_transversal_ok = lo <= -n && hi >= n;

    Polyline pj = refine_segment_image(h, segs.j_seg.a, segs.j_seg.b, tol, max_points);
    cert.j_density = eps_dense_square(pj.to_cloud(), {0.0, 0.0}, n, cert.j_eps, cert.grid_spacing);
    return cert;
}

LandingPair find_k_r(double alpha, long long q, double delta, long long k_max) {
    if (!std::isfinite(alpha)) throw std::domain_error("find_k_r: non-finite alpha");
    if (q < 1) throw std::invalid_argument("find_k_r: q must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("find_k_r: delta must be positive");
    if (k_max <= 0) k_max = 20 * static_cast<long long>(std::ceil(2.0 / delta));

    const double target = 1.0 / (4.0 * static_cast<double>(q));
    double best_res = std::numeric_limits<double>::infinity();
    long long best_k = 0;
    for (long long k = 1; k <= k_max; ++k) {
        double t = static_cast<double>(k) * alpha - target;
        long long r = std::llround(t);
        double res = std::abs(t - static_cast<double>(r));
        if (res <= delta / 2.0) return {k, r, res};
        if (res < best_res) {
            best_res = res;
            best_k = k;
        }
    }
    throw search_exhausted_error("find_k_r: no landing within k_max", best_res, best_k);
}

namespace {

// Deterministic candidate centers on the (1/q)-lattice near cloud
// concentrations: bucket the cloud into radius-sized cells, rank cells by
// count (ties resolved by cell coordinates), and snap cell centers to the
// lattice.
std::vector<Vec2> candidate_centers(const PointCloud& cloud, long long q, double radius,
                                    int max_candidates) {
    std::map<std::pair<long long, long long>, long long> cells;
    for (const Vec2& p : cloud.points()) {
        long long ix = static_cast<long long>(std::floor(p.x / radius));
        long long iy = static_cast<long long>(std::floor(p.y / radius));
        ++cells[{ix, iy}];
    }
    std::vector<std::pair<long long, std::pair<long long, long long>>> ranked;
    ranked.reserve(cells.size());
    for (const auto& [cell, count] : cells) ranked.push_back({count, cell});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<Vec2> out;
    std::map<std::pair<long long, long long>, bool> seen;
    for (const auto& [count, cell] : ranked) {
        if (static_cast<int>(out.size()) >= max_candidates) break;
        double cx = (static_cast<double>(cell.first) + 0.5) * radius;
        double cy = (static_cast<double>(cell.second) + 0.5) * radius;
        long long li = std::llround(cx * static_cast<double>(q));
        long long lj = std::llround(cy * static_cast<double>(q));
        if (seen.emplace(std::make_pair(li, lj), true).second) {
            out.push_back({static_cast<double>(li) / static_cast<double>(q),
                           static_cast<double>(lj) / static_cast<double>(q)});
        }
    }
    return out;
}

}  // namespace

SpreadResult spreading_search(const SpreadParams& p, const Ball& source, const SpreadOptions& opts) {
    if (!p.certified) throw std::invalid_argument("spreading_search: parameters are not certified");
    const double n = static_cast<double>(p.n);
    const double q = static_cast<double>(p.q);
    const double eps = 1.0 / n;
    if (!finite(source.center)) throw std::domain_error("spreading_search: non-finite source center");
    if (std::abs(source.radius - eps) > 1e-9)
        throw std::invalid_argument("spreading_search: source ball radius must be 1/n");

    const double spacing = opts.grid_spacing > 0.0 ? opts.grid_spacing : eps / 4.0;
    const double rtol = opts.refine_tol > 0.0 ? opts.refine_tol : eps / 50.0;
    const double delta = p.delta();
    const MapExpr h = build_h(p);

    // Nearest lattice point; its half-radius ball sits inside the source
    // because the lattice mesh 1/q is at most 1/(2n).
    const long long li = std::llround(source.center.x * q);
    const long long lj = std::llround(source.center.y * q);
    const Vec2 lattice{static_cast<double>(li) / q, static_cast<double>(lj) / q};
    if (norm(lattice - source.center) > 1.0 / (2.0 * n) + 1e-12)
        throw std::logic_error("spreading_search: lattice point escaped the source ball");

    LandingPair landing = find_k_r(p.alpha, p.q, delta, opts.k_max);

    SpreadResult res;
    res.landing = landing;
    res.lattice_point = lattice;
    DensityCertificate& cert = res.certificate;
    cert.params = p;
    cert.requested_q = p.q;
    cert.delta = delta;
    cert.a = p.box_a();
    cert.b = p.box_b();
    cert.source_ball = source;
    cert.eps = eps;

    const double base_y = static_cast<double>(lj - p.m * p.q) / q;

    if (opts.mode == SpreadMode::pipeline) {
        cert.k = landing.k;
        cert.r = landing.r;
        const double base_x = static_cast<double>(li - p.n * p.q) / q;
        const double shift = static_cast<double>(landing.k) * p.alpha;
        const Vec2 a{base_x + shift - delta, base_y};
        const Vec2 b{base_x + shift + delta, base_y};
        Polyline poly = refine_segment_image(h, a, b, rtol, opts.max_points);
        PointCloud cloud = poly.to_cloud();
        cloud.build_index(eps);

        const Vec2 predicted{static_cast<double>(li + (landing.r - p.n) * p.q) / q, base_y};
        const Ball target{predicted, n};
        DensityVerdict v = eps_dense(cloud, target, eps, spacing);
        cert.target_ball = target;
        cert.verdict = v;
        cert.predicted = true;
        if (v.status != Density::certified_dense) {
            for (const Vec2& c : candidate_centers(cloud, p.q, n, opts.candidates_per_k)) {
                DensityVerdict w = eps_dense(cloud, Ball{c, n}, eps, spacing);
                if (w.status == Density::certified_dense) {
                    cert.target_ball = Ball{c, n};
                    cert.verdict = w;
                    cert.predicted = false;
                    break;
                }
            }
        }
        res.image_cloud = std::move(cloud);
        return res;
    }

    // Direct mode: seed the whole source ball on a uniform grid and iterate
    // the seeds. The per-seed push is the exact conjugacy route (identical to
    // k applications of the map); a naive-route spot check guards it below.
    const double seed_spacing =
        source.radius * std::sqrt(kPi / static_cast<double>(opts.direct_points)) * 0.99;
    std::vector<Vec2> seeds;
    const long long reach = static_cast<long long>(std::ceil(source.radius / seed_spacing));
    for (long long ix = -reach; ix <= reach; ++ix) {
        for (long long iy = -reach; iy <= reach; ++iy) {
            Vec2 off{static_cast<double>(ix) * seed_spacing, static_cast<double>(iy) * seed_spacing};
            if (norm_sq(off) <= source.radius * source.radius) seeds.push_back(source.center + off);
        }
    }

    std::vector<Vec2> ws;
    ws.reserve(seeds.size());
    for (const Vec2& s : seeds) ws.push_back(eval_inverse(h, s));

    const MapExpr f = conjugate(h, MapExpr::translate({p.alpha, 0.0}));
    {
        // Fast/naive agreement spot check on a few seeds at a small step
        // count, under the Lipschitz-scaled tolerance.
        const double lip = lipschitz_bound(f);
        const long long kc = 3;
        const double tol = std::pow(lip, static_cast<double>(kc)) * opts.naive_check_tol_scale;
        for (std::size_t i = 0; i < seeds.size(); i += std::max<std::size_t>(1, seeds.size() / 3)) {
            Vec2 fast = iterate(f, seeds[i], kc);
            Vec2 naive = iterate_naive(f, seeds[i], kc);
            if (!(norm(fast - naive) <= tol))
                throw numeric_error("spreading_search: fast/naive iterate disagreement", kc);
        }
    }

    const double target_frac = 1.0 / (4.0 * q);
    std::vector<long long> order;
    order.push_back(landing.k);
    for (long long k = 1; k <= opts.direct_k_max; ++k)
        if (k != landing.k) order.push_back(k);

    // Fallback report if no k certifies: the landing-k predicted verdict.
    DensityVerdict landing_verdict{};
    std::vector<Vec2> landing_image;

    std::vector<Vec2> image(ws.size());
    for (long long k : order) {
        const double shift = static_cast<double>(k) * p.alpha;
        for (std::size_t i = 0; i < ws.size(); ++i)
            image[i] = eval(h, {ws[i].x + shift, ws[i].y});
        PointCloud cloud{image, 0.0};
        cloud.build_index(eps);

        // A target ball farther than eps from the cloud's bounding box cannot
        // be dense; skipping it avoids pointless long-range witness scans.
        double bx0 = image[0].x, bx1 = image[0].x, by0 = image[0].y, by1 = image[0].y;
        for (const Vec2& w : image) {
            bx0 = std::min(bx0, w.x);
            bx1 = std::max(bx1, w.x);
            by0 = std::min(by0, w.y);
            by1 = std::max(by1, w.y);
        }
        auto beyond_reach = [&](Vec2 c) {
            const double dx = std::max(std::max(bx0 - c.x, c.x - bx1), 0.0);
            const double dy = std::max(std::max(by0 - c.y, c.y - by1), 0.0);
            return std::hypot(dx, dy) > n + eps;
        };

        const double t = static_cast<double>(k) * p.alpha - target_frac;
        const long long rk = std::llround(t);
        const Vec2 predicted{static_cast<double>(li + (rk - p.n) * p.q) / q, base_y};

        std::vector<Vec2> cands;
        cands.push_back(predicted);
        for (const Vec2& c : candidate_centers(cloud, p.q, n, opts.candidates_per_k))
            cands.push_back(c);
        for (std::size_t ci = 0; ci < cands.size(); ++ci) {
            const bool is_landing_record = k == landing.k && ci == 0;
            if (!is_landing_record && beyond_reach(cands[ci])) continue;
            DensityVerdict v = eps_dense(cloud, Ball{cands[ci], n}, eps, spacing);
            if (v.status == Density::certified_dense) {
                cert.k = k;
                cert.r = rk;
                cert.target_ball = Ball{cands[ci], n};
                cert.verdict = v;
                cert.predicted = (ci == 0 && k == landing.k);
                res.image_cloud = std::move(cloud);
                return res;
            }
            if (k == landing.k && ci == 0) {
                landing_verdict = v;
                landing_image = cloud.points();
            }
        }
    }

    // Nothing certified anywhere in the scan.
    const Vec2 predicted{static_cast<double>(li + (landing.r - p.n) * p.q) / q, base_y};
    cert.k = landing.k;
    cert.r = landing.r;
    cert.target_ball = Ball{predicted, n};
    cert.verdict = landing_verdict;
    cert.predicted = true;
    res.image_cloud = PointCloud{std::move(landing_image), 0.0};
    return res;
}

}  // namespace spreadlab
