#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "spreadlab/construction.hpp"
#include "spreadlab/errors.hpp"
#include "spreadlab/geometry.hpp"
#include "spreadlab/maps.hpp"

using namespace spreadlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double irrational_angle() { return std::sqrt(2.0) - 1.0; }

SpreadParams reference_params(long long n, long long q, long long m) {
    return validate_params(n, q, m, irrational_angle());
}

}  // namespace

TEST_CASE("rationality probe recognizes simple fractions") {
    auto r = detect_rational(0.5);
    REQUIRE(r.has_value());
    CHECK(r->num == 1);
    CHECK(r->den == 2);

    r = detect_rational(0.3);
    REQUIRE(r.has_value());
    CHECK(r->num == 3);
    CHECK(r->den == 10);

    r = detect_rational(0.25);
    REQUIRE(r.has_value());
    CHECK(r->num == 1);
    CHECK(r->den == 4);

    r = detect_rational(2.0);
    REQUIRE(r.has_value());
    CHECK(r->num == 2);
    CHECK(r->den == 1);

    r = detect_rational(1.0 / 3.0);
    REQUIRE(r.has_value());
    CHECK(r->num == 1);
    CHECK(r->den == 3);

    CHECK_FALSE(detect_rational(irrational_angle()).has_value());
    CHECK_FALSE(detect_rational(kPi - 3.0).has_value());

    CHECK_THROWS_AS(detect_rational(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(detect_rational(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("q resolves to a compatible multiple") {
    CHECK(resolve_q(1, 2) == 2);
    CHECK(resolve_q(2, 4) == 4);
    CHECK(resolve_q(2, 3) == 12);
    CHECK(resolve_q(2, 2) == 8);
    CHECK(resolve_q(3, 6) == 6);
    CHECK(resolve_q(3, 7) == 42);
    CHECK(resolve_q(1, 1) == 2);
    CHECK_THROWS_AS(resolve_q(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(resolve_q(1, 0), std::invalid_argument);
}

TEST_CASE("parameter validation states its violations") {
    SpreadParams good = reference_params(1, 2, 120);
    CHECK(good.certified);
    CHECK(good.violations.empty());
    CHECK(good.delta() == doctest::Approx(1.0 / (120.0 * kPi)).epsilon(1e-14));
    CHECK(good.box_b() == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
    CHECK_FALSE(good.alpha_rational.has_value());
    CHECK_FALSE(good.rational_forced);

    SpreadParams weak = reference_params(1, 2, 1);
    CHECK_FALSE(weak.certified);
    REQUIRE(weak.violations.size() == 1);
    CHECK(weak.violations[0] == "sqrt(a^2+b^2) > 1/(2n)");
    CHECK(weak.box_b() == 8.0);

    SpreadParams bad_q = reference_params(2, 3, 100);
    CHECK_FALSE(bad_q.certified);
    CHECK(std::count(bad_q.violations.begin(), bad_q.violations.end(),
                     "q is not a multiple of n") == 1);
    CHECK(std::count(bad_q.violations.begin(), bad_q.violations.end(), "q < 2n") == 1);

    CHECK_THROWS_AS(validate_params(0, 2, 1, irrational_angle()), std::invalid_argument);
    CHECK_THROWS_AS(validate_params(1, 2, 0, irrational_angle()), std::invalid_argument);
    CHECK_THROWS_AS(validate_params(1, 2, 1, std::nan("")), std::domain_error);
}

TEST_CASE("rational rotation angles are rejected unless forced") {
    try {
        validate_params(1, 2, 102, 0.5);
        FAIL("expected a rational-angle rejection");
    } catch (const rational_alpha_error& e) {
        CHECK(e.p == 1);
        CHECK(e.q == 2);
    }

    SpreadParams forced = validate_params(1, 2, 102, 0.5, true);
    CHECK(forced.rational_forced);
    REQUIRE(forced.alpha_rational.has_value());
    CHECK(forced.alpha_rational->num == 1);
    CHECK(forced.alpha_rational->den == 2);
    CHECK(forced.certified);
}

TEST_CASE("the smallest certifying shear amplitude is found") {
    CHECK(choose_m(1, 2) == 102);
    CHECK_FALSE(reference_params(1, 2, 101).certified);
    CHECK(reference_params(1, 2, 102).certified);

    // The certifying norm decreases through the threshold.
    auto box_norm = [](long long n, long long q, long long m) {
        SpreadParams p = reference_params(n, q, m);
        return std::hypot(p.box_a(), p.box_b());
    };
    CHECK(box_norm(1, 2, 100) == doctest::Approx(0.5148).epsilon(1e-3));
    CHECK(box_norm(1, 2, 102) == doctest::Approx(0.4951).epsilon(1e-3));
    CHECK(box_norm(1, 2, 110) == doctest::Approx(0.4268).epsilon(1e-3));
    CHECK(box_norm(1, 2, 100) > 0.5);
    CHECK(box_norm(1, 2, 102) <= 0.5);

    CHECK(choose_m(2, 4) == 1612);
    CHECK_FALSE(reference_params(2, 4, 1611).certified);
    CHECK(reference_params(2, 4, 1612).certified);

    CHECK_THROWS_AS(choose_m(2, 3), std::invalid_argument);
    CHECK_THROWS_AS(choose_m(0, 2), std::invalid_argument);
}

TEST_CASE("source segments have the prescribed geometry") {
    SpreadParams p = reference_params(1, 2, 102);
    const double d = p.delta();
    SegmentPair s = segments(p);

    CHECK(s.i_seg.a == Vec2{-d, 0.0});
    CHECK(s.i_seg.b == Vec2{d, 0.0});
    CHECK(s.j_seg.a == Vec2{0.125 - d / 2.0, 0.0});
    CHECK(s.j_seg.b == Vec2{0.125 + d / 2.0, 0.0});

    // The second segment is half as long as the first.
    CHECK(s.j_seg.b.x - s.j_seg.a.x == doctest::Approx(d).epsilon(1e-12));
    CHECK(s.i_seg.b.x - s.i_seg.a.x == doctest::Approx(2.0 * d).epsilon(1e-12));
}

TEST_CASE("the composed map sends the origin to its designed landing point") {
    for (auto [n, q, m] : {std::tuple<long long, long long, long long>{1, 2, 102},
                           std::tuple<long long, long long, long long>{2, 4, 1612}}) {
        SpreadParams p = reference_params(n, q, m);
        Vec2 image = eval(build_h(p), {0.0, 0.0});
        CHECK(norm(image - Vec2{static_cast<double>(n), static_cast<double>(m)}) <= 1e-12);
    }
}

TEST_CASE("analytic containment certificate at the reference parameters") {
    SpreadParams p = reference_params(1, 2, 102);
    Claim1Certificate cert = claim1_verify(p, 1e-3);

    CHECK(cert.requested_q == 2);
    CHECK(cert.delta == doctest::Approx(0.0031206851586646146).epsilon(1e-9));
    CHECK(cert.a == doctest::Approx(0.4888220935936657).epsilon(1e-9));
    CHECK(cert.b == 8.0 / 102.0);
    CHECK(cert.analytic_box_ok);
    CHECK(cert.i_segment_ok);
    CHECK(cert.j_transversal_ok);
    CHECK(cert.j_density.status == Density::certified_dense);
    CHECK(cert.passed());

    CHECK(cert.i_max_distance == doctest::Approx(0.4574229043090686).epsilon(1e-9));
    CHECK(cert.j_density.max_gap == doctest::Approx(0.2745556089790298).epsilon(1e-9));
    CHECK(cert.j_eps == 1.0);
    CHECK(cert.grid_spacing == 0.25);
    CHECK(cert.tol == 1e-3);

    // The sampled spread never exceeds the closed-form box diagonal.
    CHECK(cert.i_max_distance <= std::hypot(cert.a, cert.b) + 1e-12);
}

TEST_CASE("certificate rejects out-of-range tolerances and uncertified inputs") {
    SpreadParams p = reference_params(1, 2, 102);
    CHECK_THROWS_AS(claim1_verify(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(claim1_verify(p, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(claim1_verify(p, 0.6), std::invalid_argument);

    SpreadParams weak = reference_params(1, 2, 1);
    CHECK_THROWS_AS(claim1_verify(weak, 1e-3), std::invalid_argument);
}

TEST_CASE("segment image density survives halving the certified scale") {
    // With q = 4n the image is dense at scale 2/q = 1/(2n), twice as fine as
    // the 1/n certificate requires.
    const long long m = choose_m(1, 4);
    SpreadParams p = reference_params(1, 4, m);
    Claim1Certificate cert = claim1_verify(p, 1e-3);
    REQUIRE(cert.passed());

    SegmentPair segs = segments(p);
    Polyline pj = refine_segment_image(build_h(p), segs.j_seg.a, segs.j_seg.b, 1e-3);
    PointCloud cloud = pj.to_cloud();
    cloud.build_index(0.5);
    CHECK(eps_dense_square(cloud, {0.0, 0.0}, 1.0, 0.5, 0.125).status == Density::certified_dense);
    CHECK(eps_dense_square(cloud, {0.0, 0.0}, 1.0, 1.0, 0.25).status == Density::certified_dense);
}

TEST_CASE("rotation landing search") {
    const double alpha = irrational_angle();

    SpreadParams p1 = reference_params(1, 2, 102);
    LandingPair l1 = find_k_r(alpha, 2, p1.delta());
    CHECK(l1.k == 51);
    CHECK(l1.r == 21);
    CHECK(l1.residual <= p1.delta() / 2.0);
    CHECK(l1.residual == doctest::Approx(1.083e-4).epsilon(1e-3));

    // No smaller k lands within the window.
    for (long long k = 1; k < l1.k; ++k) {
        double t = static_cast<double>(k) * alpha - 0.125;
        double res = std::abs(t - static_cast<double>(std::llround(t)));
        CHECK(res > p1.delta() / 2.0);
    }

    SpreadParams p2 = reference_params(2, 4, 1612);
    LandingPair l2 = find_k_r(alpha, 4, p2.delta());
    CHECK(l2.k == 1707);
    CHECK(l2.r == 707);
    CHECK(l2.residual <= p2.delta() / 2.0);
    CHECK(l2.residual == doctest::Approx(5.097e-5).epsilon(1e-3));

    // A quarter-integer angle lands immediately.
    LandingPair exact = find_k_r(0.125, 2, 1e-6);
    CHECK(exact.k == 1);
    CHECK(exact.r == 0);
    CHECK(exact.residual == 0.0);

    try {
        find_k_r(alpha, 2, 1e-9, 10);
        FAIL("expected the bounded search to give up");
    } catch (const search_exhausted_error& e) {
        CHECK(e.best_residual > 5e-10);
        CHECK(e.best_k >= 1);
        CHECK(e.best_k <= 10);
    }

    CHECK_THROWS_AS(find_k_r(alpha, 0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(find_k_r(alpha, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(find_k_r(std::nan(""), 2, 1e-3), std::domain_error);
}

TEST_CASE("spreading pipeline certifies the predicted target") {
    SpreadParams p = reference_params(1, 2, 102);
    SpreadResult res = spreading_search(p, Ball{{0.0, 0.0}, 1.0});

    CHECK(res.landing.k == 51);
    CHECK(res.landing.r == 21);
    CHECK(res.lattice_point == Vec2{0.0, 0.0});

    const DensityCertificate& cert = res.certificate;
    CHECK(cert.k == 51);
    CHECK(cert.r == 21);
    CHECK(cert.predicted);
    CHECK(cert.verdict.status == Density::certified_dense);
    CHECK(cert.eps == 1.0);
    CHECK(cert.target_ball.radius == 1.0);
    CHECK(cert.target_ball.center == Vec2{20.0, -102.0});
    CHECK_FALSE(res.image_cloud.empty());

    SpreadParams p2 = reference_params(2, 4, 1612);
    SpreadResult res2 = spreading_search(p2, Ball{{0.0, 0.0}, 0.5});
    CHECK(res2.landing.k == 1707);
    CHECK(res2.landing.r == 707);
    CHECK(res2.certificate.predicted);
    CHECK(res2.certificate.verdict.status == Density::certified_dense);
    CHECK(res2.certificate.eps == 0.5);
    CHECK(res2.certificate.target_ball.radius == 2.0);
    CHECK(res2.certificate.target_ball.center == Vec2{705.0, -1612.0});
}

TEST_CASE("spreading commutes with integer translation of the source") {
    SpreadParams p = reference_params(1, 2, 102);
    SpreadResult a = spreading_search(p, Ball{{0.3, 0.7}, 1.0});
    SpreadResult b = spreading_search(p, Ball{{1.3, 0.7}, 1.0});

    CHECK(a.certificate.verdict.status == Density::certified_dense);
    CHECK(b.certificate.verdict.status == Density::certified_dense);
    CHECK(a.certificate.k == b.certificate.k);
    CHECK(a.certificate.r == b.certificate.r);
    CHECK(b.lattice_point.x - a.lattice_point.x == 1.0);
    CHECK(b.lattice_point.y == a.lattice_point.y);
    CHECK(b.certificate.target_ball.center.x - a.certificate.target_ball.center.x == 1.0);
    CHECK(b.certificate.target_ball.center.y == a.certificate.target_ball.center.y);

    // A source centered on the lattice keeps its center verbatim.
    SpreadResult c = spreading_search(p, Ball{{0.5, 0.5}, 1.0});
    CHECK(c.lattice_point == Vec2{0.5, 0.5});
}

TEST_CASE("spreading input guards") {
    SpreadParams p = reference_params(1, 2, 102);
    CHECK_THROWS_AS(spreading_search(p, Ball{{0.0, 0.0}, 0.9}), std::invalid_argument);

    SpreadParams weak = reference_params(1, 2, 1);
    CHECK_THROWS_AS(spreading_search(weak, Ball{{0.0, 0.0}, 1.0}), std::invalid_argument);
}

TEST_CASE("direct cloud route reaches a certified verdict") {
    SpreadParams p = reference_params(1, 2, 102);
    SpreadOptions opts;
    opts.mode = SpreadMode::direct_cloud;
    opts.direct_points = 4000;
    SpreadResult res = spreading_search(p, Ball{{0.0, 0.0}, 1.0}, opts);

    CHECK(res.certificate.verdict.status == Density::certified_dense);
    CHECK(res.certificate.eps == 1.0);
    CHECK(res.certificate.target_ball.radius == 1.0);
    CHECK(res.certificate.k >= 1);
    CHECK_FALSE(res.image_cloud.empty());

    // Both routes agree that the map spreads this source.
    SpreadResult pipeline = spreading_search(p, Ball{{0.0, 0.0}, 1.0});
    CHECK(pipeline.certificate.verdict.status == res.certificate.verdict.status);
}

TEST_CASE("trigonometric envelope bounds hold on the sampled range") {
    bool cos_ok = true;
    bool sin_ok = true;
    for (int i = 0; i <= 100000; ++i) {
        double x = static_cast<double>(i) * (2.0 * kPi / 100000.0);
        if (!(1.0 - std::cos(x) <= x * x / 2.0 + 1e-15)) cos_ok = false;
        if (x <= kPi / 2.0 && !(std::sin(x) >= x / 2.0)) sin_ok = false;
    }
    CHECK(cos_ok);
    CHECK(sin_ok);
}
