#pragma once

#include <string>

namespace spreadlab {

// One bag of flag values shared by every subcommand; each subcommand binds
// the subset it uses. Values round-trip through the key=value config file.
struct RunConfig {
    long long n = 1;
    long long q = 2;
    std::string m = "auto";
    double alpha = 0.41421356237309515;  // sqrt(2) - 1
    std::string center = "0,0";
    double tol = 1e-3;
    double grid_spacing = 0.0;  // 0 selects eps/4
    long long k_max = 0;        // 0 selects the landing-search default
    bool allow_rational = false;

    // widths
    std::string map_kind = "conjugate";
    int directions = 16;
    double threshold = 0.0;  // 0 selects 2x the initial max width
    long long widths_k_max = 64;
    double window_tol = 1e-3;

    // rotnum
    std::string family = "rigid";
    double omega = 0.25;
    double epsilon = 0.0;
    long long iterations = 1000;
    double y0 = 0.0;

    // rho
    long long rho_m = 3;
    long long rho_q = 2;
    double rho = 0.1;
    int grid_density = 10000;

    // figure
    bool identity_map = false;

    // outputs and misc
    std::string config_path;
    std::string json_path;
    std::string csv_path;
    std::string out_path = "figure.svg";
    std::string verify_path;
    long long seed = 0;  // reserved for randomized diagnostics
};

// Exit codes: 0 certified-positive, 1 certified-negative, 2 inconclusive,
// 3 resource or search exhaustion, 64 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace spreadlab
