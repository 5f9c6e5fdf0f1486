#pragma once

#include <stdexcept>
#include <string>

namespace spreadlab {

// An iterate produced a non-finite coordinate; carries the offending step.
struct numeric_error : std::runtime_error {
    numeric_error(const std::string& what, long long index)
        : std::runtime_error(what), iterate_index(index) {}
    long long iterate_index;
};

// A refinement or witness grid would exceed the configured point budget.
struct resource_error : std::runtime_error {
    resource_error(const std::string& what, unsigned long long required)
        : std::runtime_error(what), required_points(required) {}
    unsigned long long required_points;
};

// A bounded search ran out of attempts; carries the best residual seen.
struct search_exhausted_error : std::runtime_error {
    search_exhausted_error(const std::string& what, double residual, long long k)
        : std::runtime_error(what), best_residual(residual), best_k(k) {}
    double best_residual;
    long long best_k;
};

// The rotation angle was recognized as p/q within the configured precision.
struct rational_alpha_error : std::runtime_error {
    rational_alpha_error(long long p_, long long q_)
        : std::runtime_error("alpha is rational within precision: " + std::to_string(p_) + "/" +
                             std::to_string(q_)),
          p(p_),
          q(q_) {}
    long long p;
    long long q;
};

}  // namespace spreadlab
