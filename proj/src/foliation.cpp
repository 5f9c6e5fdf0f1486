#include "spreadlab/foliation.hpp"

#include <cmath>
#include <stdexcept>

#include "spreadlab/errors.hpp"
#include "spreadlab/geometry.hpp"

namespace spreadlab {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

std::vector<Vec2> default_directions(int count) {
    if (count < 1) throw std::invalid_argument("default_directions: count must be positive");
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        double t = kPi * static_cast<double>(j) / static_cast<double>(count);
        out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
}

WidthCertificate width_growth_certificate(const MapExpr& e, const std::vector<Vec2>& directions,
                                          double threshold, long long k_max, double window_tol) {
    if (directions.empty())
        throw std::invalid_argument("width_growth_certificate: directions must be non-empty");
    if (!(threshold > 0.0) || !std::isfinite(threshold))
        throw std::invalid_argument("width_growth_certificate: threshold must be positive");
    if (k_max < 1) throw std::invalid_argument("width_growth_certificate: k_max must be >= 1");
    if (!(window_tol > 0.0))
        throw std::invalid_argument("width_growth_certificate: window_tol must be positive");
    for (const Vec2& u : directions)
        if (std::abs(norm(u) - 1.0) > 1e-12)
            throw std::invalid_argument("width_growth_certificate: directions must be unit vectors");

    // One fundamental period of the horizontal axis, sampled at the window
    // tolerance. Identity refinement yields evenly spaced vertices.
    Polyline window = refine_segment_image(MapExpr::identity(), {0.0, 0.0}, {1.0, 0.0}, window_tol);

    WidthCertificate cert;
    cert.threshold = threshold;
    cert.k_max = k_max;
    cert.window_tol = window_tol;
    cert.window_points = window.vertices.size();
    cert.records.resize(directions.size());
    for (std::size_t d = 0; d < directions.size(); ++d) cert.records[d].direction = directions[d];

    std::size_t remaining = directions.size();
    auto scan = [&](const std::vector<Vec2>& pts, long long k) {
        PointCloud cloud(pts);
        for (std::size_t d = 0; d < directions.size(); ++d) {
            WidthRecord& rec = cert.records[d];
            if (rec.exceeded) continue;
            double w = direction_width(cloud, directions[d]);
            rec.width = std::max(rec.width, w);
            if (k >= 1 && w > threshold) {
                rec.exceeded = true;
                rec.k = k;
                rec.width = w;
                --remaining;
            }
        }
    };

    scan(window.vertices, 0);

    if (auto cf = as_conjugate_translation(e)) {
        std::vector<Vec2> ws(window.vertices.size());
        for (std::size_t i = 0; i < ws.size(); ++i) ws[i] = eval_inverse(cf->h, window.vertices[i]);
        std::vector<Vec2> img(ws.size());
        for (long long k = 1; k <= k_max && remaining > 0; ++k) {
            Vec2 shift{static_cast<double>(k) * cf->shift.x, static_cast<double>(k) * cf->shift.y};
            for (std::size_t i = 0; i < ws.size(); ++i) {
                img[i] = eval(cf->h, ws[i] + shift);
                if (!finite(img[i]))
                    throw numeric_error("width_growth_certificate: non-finite iterate", k);
            }
            scan(img, k);
        }
    } else {
        std::vector<Vec2> cur = window.vertices;
        for (long long k = 1; k <= k_max && remaining > 0; ++k) {
            for (Vec2& z : cur) {
                z = eval(e, z);
                if (!finite(z)) throw numeric_error("width_growth_certificate: non-finite iterate", k);
            }
            scan(cur, k);
        }
    }

    cert.pass = remaining == 0;
    return cert;
}

CircleLift::CircleLift(Family f, double omega, double epsilon)
    : family_(f), omega_(omega), epsilon_(epsilon) {
    if (!std::isfinite(omega)) throw std::domain_error("CircleLift: non-finite omega");
    if (f == Family::arnold && !(std::abs(epsilon) < 1.0))
        throw std::invalid_argument("CircleLift: |epsilon| must be < 1 to stay monotone");

    // Sampled contract checks over one period.
    double prev = eval(0.0);
    for (int i = 1; i <= 1000; ++i) {
        double x = static_cast<double>(i) / 1000.0;
        double v = eval(x);
        if (!(v > prev)) throw std::invalid_argument("CircleLift: map is not strictly increasing");
        if (std::abs(eval(x + 1.0) - v - 1.0) > 1e-12)
            throw std::logic_error("CircleLift: degree-one periodicity violated");
        prev = v;
    }
}

CircleLift CircleLift::rigid(double omega) { return CircleLift(Family::rigid, omega, 0.0); }

CircleLift CircleLift::arnold(double omega, double epsilon) {
    return CircleLift(Family::arnold, omega, epsilon);
}

double CircleLift::displacement(double x) const {
    if (family_ == Family::rigid) return omega_;
    return omega_ + epsilon_ / kTwoPi * std::sin(kTwoPi * x);
}

RotationEstimate rotation_number(const CircleLift& f, long long iterations, double y0) {
    if (iterations < 1) throw std::invalid_argument("rotation_number: iterations must be >= 1");
    if (!std::isfinite(y0)) throw std::domain_error("rotation_number: non-finite y0");

    double y = y0 - std::floor(y0);
    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation
    for (long long i = 0; i < iterations; ++i) {
        double d = f.displacement(y);
        double t = d - comp;
        double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
        y += d;
        y -= std::floor(y);
    }
    double n = static_cast<double>(iterations);
    return {sum / n, 1.0 / n};
}

}  // namespace spreadlab
