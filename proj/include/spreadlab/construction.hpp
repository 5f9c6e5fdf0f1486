#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spreadlab/geometry.hpp"
#include "spreadlab/maps.hpp"

namespace spreadlab {

struct Rational {
    long long num = 0;
    long long den = 1;
};

// Continued-fraction rationality probe. Reports p/q when the expansion
// terminates within `precision`; gives up (treats alpha as irrational) once a
// convergent denominator passes max_denominator, since every double is
// dyadic-rational and would terminate eventually.
std::optional<Rational> detect_rational(double alpha, double precision = 1e-12,
                                        long long max_denominator = 100'000'000);

// Shear pair parameters. q must be a positive multiple of n with q >= 2n; the
// geometric quantities below are
//   delta = 2n / (pi q m)                      half-length of the source segment
//   b     = 8 n^2 / m                          vertical spread of the first shear
//   a     = delta + 2 n (pi q b)^2             horizontal spread after the second
// and `certified` holds when delta/2 < 1/q and sqrt(a^2 + b^2) <= 1/(2n).
struct SpreadParams {
    long long n = 1;
    long long q = 2;
    long long m = 1;
    double alpha = 0.0;
    bool certified = false;
    std::vector<std::string> violations;
    std::optional<Rational> alpha_rational;
    bool rational_forced = false;

    double delta() const;
    double box_a() const;
    double box_b() const;
};

// q' = q when already a multiple of n with q >= 2n, else 2 q n.
long long resolve_q(long long n, long long q);

// Validates and annotates; throws rational_alpha_error when alpha is detected
// rational and not force-accepted.
SpreadParams validate_params(long long n, long long q, long long m, double alpha,
                             bool allow_rational = false);

// Smallest m whose closed-form bounds certify (monotone upward scan).
long long choose_m(long long n, long long q);

// h = hshear(n, q) . vshear(m, q)
MapExpr build_h(const SpreadParams& p);

struct Segment {
    Vec2 a, b;
};

// I = [-delta, delta] x {0};  J = [1/(4q) - delta/2, 1/(4q) + delta/2] x {0}.
struct SegmentPair {
    Segment i_seg;
    Segment j_seg;
};
SegmentPair segments(const SpreadParams& p);

struct Claim1Certificate {
    SpreadParams params;
    long long requested_q = 0;
    double delta = 0.0, a = 0.0, b = 0.0;
    bool analytic_box_ok = false;
    bool i_segment_ok = false;
    double i_max_distance = 0.0;   // max |h(I) vertex - (n, m)|
    bool j_transversal_ok = false; // first-shear image of J crosses [-n, n] vertically
    DensityVerdict j_density;      // of h(J) in the square [-n, n]^2 at eps = 1/n
    double j_eps = 0.0;
    double tol = 0.0;
    double grid_spacing = 0.0;

    bool passed() const {
        return analytic_box_ok && i_segment_ok && j_transversal_ok &&
               j_density.status == Density::certified_dense;
    }
};

// Checks h(I) subset B((n,m), 1/(2n)) analytically and by refined vertices at
// radius 1/(2n) - tol, and h(J)'s 1/n-density in the square [-n, n]^2.
// Also verifies the vertical transversality of the first-shear image of J
// (the arc must cross [-n, n]; the endpoint signs are not pinned).
Claim1Certificate claim1_verify(const SpreadParams& p, double tol, double grid_spacing = 0.0,
                                std::size_t max_points = 10'000'000);

struct LandingPair {
    long long k = 0;
    long long r = 0;
    double residual = 0.0;
};

// Smallest k <= k_max with |k alpha - r - 1/(4q)| <= delta/2 for some integer
// r. k_max = 0 selects the default 20 * ceil(2/delta). Throws
// search_exhausted_error with the best residual when no k lands.
LandingPair find_k_r(double alpha, long long q, double delta, long long k_max = 0);

enum class SpreadMode { pipeline, direct_cloud };

struct SpreadOptions {
    long long k_max = 0;           // 0: find_k_r default
    double grid_spacing = 0.0;     // 0: eps/4
    double refine_tol = 0.0;       // 0: eps/50
    std::size_t max_points = 10'000'000;
    SpreadMode mode = SpreadMode::pipeline;
    std::size_t direct_points = 10'000;  // source-ball seeds in direct mode
    long long direct_k_max = 600;
    int candidates_per_k = 8;
    double naive_check_tol_scale = 1e-12;  // fast/naive agreement, scaled by L^k
};

struct DensityCertificate {
    SpreadParams params;
    long long requested_q = 0;
    double delta = 0.0, a = 0.0, b = 0.0;
    long long k = 0, r = 0;
    Ball source_ball;
    Ball target_ball;
    double eps = 0.0;
    DensityVerdict verdict;
    bool predicted = false;  // verdict obtained at the predicted center, no fallback
};

struct SpreadResult {
    DensityCertificate certificate;
    LandingPair landing;
    Vec2 lattice_point;
    PointCloud image_cloud;
};

// Spreading pipeline for a radius-1/n source ball: pick the (1/q)-lattice
// point whose half-radius ball sits inside the source, land the rotation with
// find_k_r, push the translated source segment through h at the landed
// rotation, and certify 1/n-density in the predicted radius-n target ball
// (falling back to a bounded deterministic scan of lattice centers near cloud
// concentrations). Direct mode instead seeds the whole source ball as a cloud
// and iterates it, certifying against candidate centers for each k.
SpreadResult spreading_search(const SpreadParams& p, const Ball& source,
                              const SpreadOptions& opts = {});

}  // namespace spreadlab
