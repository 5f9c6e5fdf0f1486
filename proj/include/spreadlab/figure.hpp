#pragma once

#include <cstddef>
#include <string>

#include "spreadlab/construction.hpp"

namespace spreadlab {

struct FigureOptions {
    double tol = 1e-3;          // curve refinement tolerance
    double grid_spacing = 0.0;  // witness grid overlay; 0 selects (1/n)/4
    bool identity_map = false;  // draw the source segment itself (debug)
    std::size_t max_points = 10'000'000;
};

// SVG of the image of the J segment, clipped to [-n-1, n+1]^2, with the
// square [-n, n]^2 outlined and the witness grid overlaid. Output bytes
// depend only on the inputs: fixed viewbox, fixed formatting, no timestamps.
std::string figure_svg(const SpreadParams& p, const FigureOptions& opts = {});

}  // namespace spreadlab
