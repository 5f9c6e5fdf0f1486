#pragma once

#include <vector>

#include "spreadlab/maps.hpp"
#include "spreadlab/vec2.hpp"

namespace spreadlab {

// Per-direction growth record. k is the first iterate whose image width
// exceeds the threshold; k = 0 means the threshold was never exceeded within
// k_max, and width then holds the largest value seen.
struct WidthRecord {
    Vec2 direction;
    long long k = 0;
    double width = 0.0;
    bool exceeded = false;
};

struct WidthCertificate {
    std::vector<WidthRecord> records;
    double threshold = 0.0;
    long long k_max = 0;
    double window_tol = 0.0;
    std::size_t window_points = 0;
    bool pass = false;  // every direction exceeded within k_max
};

// count unit vectors at angles j*pi/count, j = 0..count-1. Width is symmetric
// under negating the direction, so half a turn covers every axis.
std::vector<Vec2> default_directions(int count);

// Samples the horizontal segment [0,1] x {0} at spacing window_tol, iterates
// the sample under e, and records for each direction the first iterate whose
// directional width exceeds threshold. pass requires every direction to
// exceed within k_max. Iteration uses the conjugated-translation fast path
// when e has one. A passing certificate rules out any invariant structure
// confining images of the sampled segment to a strip of width <= threshold
// in a tested direction.
WidthCertificate width_growth_certificate(const MapExpr& e, const std::vector<Vec2>& directions,
                                          double threshold, long long k_max, double window_tol);

// Monotone lift of a degree-one circle map: eval(x + 1) = eval(x) + 1.
// Families: rigid (x + omega) and arnold (x + omega + eps/(2 pi) sin(2 pi x),
// |eps| < 1 so the map stays strictly increasing). Construction samples the
// monotonicity and periodicity contracts.
class CircleLift {
public:
    enum class Family { rigid, arnold };

    static CircleLift rigid(double omega);
    static CircleLift arnold(double omega, double epsilon);

    Family family() const { return family_; }
    double omega() const { return omega_; }
    double epsilon() const { return epsilon_; }

    double eval(double x) const { return x + displacement(x); }
    // 1-periodic displacement eval(x) - x, in closed form per family.
    double displacement(double x) const;

private:
    CircleLift(Family f, double omega, double epsilon);

    Family family_;
    double omega_;
    double epsilon_;
};

struct RotationEstimate {
    double estimate = 0.0;
    double error_bound = 0.0;  // 1/iterations, from |lift^n(y) - y - n rho| <= 1
};

// Averages the per-step displacement along the orbit of y0. The orbit is kept
// reduced mod 1 (the displacement is 1-periodic) and summed with compensation,
// so rigid rotations are recovered to roundoff. estimate = (lift^n(y0) - y0)/n.
RotationEstimate rotation_number(const CircleLift& f, long long iterations, double y0);

}  // namespace spreadlab
