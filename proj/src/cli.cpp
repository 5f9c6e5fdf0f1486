#include "spreadlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "spreadlab/certificates.hpp"
#include "spreadlab/construction.hpp"
#include "spreadlab/errors.hpp"
#include "spreadlab/figure.hpp"
#include "spreadlab/foliation.hpp"
#include "spreadlab/geometry.hpp"
#include "spreadlab/maps.hpp"

namespace spreadlab {

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInconclusive = 2;
constexpr int kResource = 3;
constexpr int kUsage = 64;

Vec2 parse_center(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--center expects \"x,y\"");
    std::size_t ax = 0, ay = 0;
    double x = 0.0, y = 0.0;
    try {
        x = std::stod(s.substr(0, comma), &ax);
        y = std::stod(s.substr(comma + 1), &ay);
    } catch (const std::exception&) {
        throw std::invalid_argument("--center expects \"x,y\"");
    }
    if (ax != comma || ay != s.size() - comma - 1 || !std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("--center expects \"x,y\"");
    return {x, y};
}

long long parse_m(const std::string& s, long long n, long long q_eff) {
    if (s == "auto") return choose_m(n, q_eff);
    std::size_t used = 0;
    long long m = 0;
    try {
        m = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("--m expects a positive integer or \"auto\"");
    }
    if (used != s.size() || m < 1)
        throw std::invalid_argument("--m expects a positive integer or \"auto\"");
    return m;
}

void emit(const json& doc, const std::string& json_path) {
    std::string text = doc.dump(2);
    text += '\n';
    std::fwrite(text.data(), 1, text.size(), stdout);
    if (!json_path.empty()) write_text_atomic(json_path, text);
}

int claim1_exit(const json& doc) {
    if (!doc.at("violations").empty()) return kNegative;
    if (!doc.at("analytic_box_ok").get<bool>() || !doc.at("i_segment_ok").get<bool>() ||
        !doc.at("j_transversal_ok").get<bool>())
        return kNegative;
    const std::string v = doc.at("j_verdict").get<std::string>();
    if (v == "certified-dense") return kOk;
    if (v == "certified-not-dense") return kNegative;
    return kInconclusive;
}

int spread_exit(const json& doc) {
    if (doc.contains("violations")) return kNegative;
    const std::string v = doc.at("verdict").get<std::string>();
    if (v == "certified-dense") return kOk;
    if (v == "certified-not-dense") return kNegative;
    return kInconclusive;
}

int cmd_verify_claim1(const RunConfig& cfg) {
    const long long q_eff = resolve_q(cfg.n, cfg.q);
    const long long m = parse_m(cfg.m, cfg.n, q_eff);
    json doc = claim1_doc(cfg.n, cfg.q, m, cfg.alpha, cfg.tol, cfg.grid_spacing, cfg.allow_rational);
    emit(doc, cfg.json_path);
    return claim1_exit(doc);
}

int cmd_spread(const RunConfig& cfg) {
    const long long q_eff = resolve_q(cfg.n, cfg.q);
    const long long m = parse_m(cfg.m, cfg.n, q_eff);
    const Vec2 center = parse_center(cfg.center);
    SpreadResult res;
    json doc = spread_doc(cfg.n, cfg.q, m, cfg.alpha, center, cfg.grid_spacing, cfg.k_max,
                          cfg.allow_rational, &res);
    emit(doc, cfg.json_path);
    if (!cfg.csv_path.empty() && !doc.contains("violations")) {
        const std::string tmp = cfg.csv_path + ".tmp";
        save_csv(res.image_cloud.points(), tmp);
        if (std::rename(tmp.c_str(), cfg.csv_path.c_str()) != 0)
            throw std::runtime_error("rename failed: " + cfg.csv_path);
    }
    return spread_exit(doc);
}

int cmd_figure(const RunConfig& cfg) {
    const long long q_eff = resolve_q(cfg.n, cfg.q);
    const long long m = parse_m(cfg.m, cfg.n, q_eff);
    SpreadParams p = validate_params(cfg.n, q_eff, m, cfg.alpha, cfg.allow_rational);
    if (!p.certified) {
        for (const std::string& v : p.violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
        return kNegative;
    }
    FigureOptions fo;
    fo.tol = cfg.tol;
    fo.grid_spacing = cfg.grid_spacing;
    fo.identity_map = cfg.identity_map;
    write_text_atomic(cfg.out_path, figure_svg(p, fo));
    std::printf("wrote %s\n", cfg.out_path.c_str());
    return kOk;
}

int cmd_widths(const RunConfig& cfg) {
    MapExpr e = MapExpr::identity();
    json desc;
    if (cfg.map_kind == "conjugate") {
        const long long q_eff = resolve_q(cfg.n, cfg.q);
        const long long m = parse_m(cfg.m, cfg.n, q_eff);
        SpreadParams p = validate_params(cfg.n, q_eff, m, cfg.alpha, cfg.allow_rational);
        if (!p.certified) {
            for (const std::string& v : p.violations)
                std::fprintf(stderr, "violation: %s\n", v.c_str());
            return kNegative;
        }
        e = conjugate(build_h(p), MapExpr::translate({cfg.alpha, 0.0}));
        desc = {{"kind", "conjugate"}, {"n", cfg.n}, {"q", q_eff}, {"m", m}, {"alpha", cfg.alpha}};
    } else if (cfg.map_kind == "identity") {
        desc = {{"kind", "identity"}};
    } else if (cfg.map_kind == "rotation") {
        e = MapExpr::translate({cfg.alpha, 0.0});
        desc = {{"kind", "rotation"}, {"alpha", cfg.alpha}};
    } else {
        throw std::invalid_argument("--map must be conjugate, identity, or rotation");
    }

    const std::vector<Vec2> dirs = default_directions(cfg.directions);
    double threshold = cfg.threshold;
    if (!(threshold > 0.0)) {
        // Default: twice the widest initial extent over the direction set.
        Polyline window =
            refine_segment_image(MapExpr::identity(), {0.0, 0.0}, {1.0, 0.0}, cfg.window_tol);
        PointCloud cloud(window.vertices);
        double w0 = 0.0;
        for (const Vec2& u : dirs) w0 = std::max(w0, direction_width(cloud, u));
        threshold = 2.0 * w0;
    }

    WidthCertificate cert =
        width_growth_certificate(e, dirs, threshold, cfg.widths_k_max, cfg.window_tol);
    emit(widths_doc(cert, desc), cfg.json_path);
    return cert.pass ? kOk : kNegative;
}

int cmd_rotnum(const RunConfig& cfg) {
    CircleLift f = cfg.family == "rigid" ? CircleLift::rigid(cfg.omega)
                   : cfg.family == "arnold"
                       ? CircleLift::arnold(cfg.omega, cfg.epsilon)
                       : throw std::invalid_argument("--family must be rigid or arnold");
    emit(rotnum_doc(f, cfg.iterations, cfg.y0), cfg.json_path);
    return kOk;
}

int cmd_rho(const RunConfig& cfg) {
    json doc = rho_doc(cfg.rho_m, cfg.rho_q, cfg.rho, cfg.grid_density);
    emit(doc, cfg.json_path);
    const double closed = doc.at("closed_form").get<double>();
    const double est = doc.at("estimate").get<double>();
    return std::abs(est - closed) <= 1e-6 * std::max(closed, 1e-300) ? kOk : kInconclusive;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Applies a key=value file to the parsed subcommand's options. This runs
// after the command line so explicit flags always win; unknown keys are
// rejected. (The config option cannot be delegated to the parser itself:
// only the root app processes config files, and these flags live on
// subcommands.)
void apply_config_file(CLI::App& sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
        if (!opt) throw std::invalid_argument("unknown config key: " + key);
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

int cmd_verify(const RunConfig& cfg) {
    std::ifstream in(cfg.verify_path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "cannot read %s\n", cfg.verify_path.c_str());
        return kUsage;
    }
    json doc = json::parse(in);
    VerifyOutcome o = verify_certificate(doc);
    if (!o.known_kind) {
        std::fprintf(stderr, "unrecognized certificate: %s\n", o.detail.c_str());
        return kUsage;
    }
    std::printf("%s certificate: %s\n", o.kind.c_str(), o.reproduced ? "reproduced" : "MISMATCH");
    if (!o.reproduced && !o.detail.empty()) std::printf("%s\n", o.detail.c_str());
    return o.reproduced ? kOk : kNegative;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    RunConfig cfg;
    CLI::App app{"Certified construction and verification of spreading torus maps"};
    app.require_subcommand(1);

    // Accepted for compatibility with batch environments; every computation
    // is deterministic regardless of the setting.
    if (const char* t = std::getenv("LAB_THREADS")) (void)t;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cfg.config_path,
                        "Read flags from a key=value file (command line wins)");
        sub->add_option("--seed", cfg.seed, "Seed for randomized diagnostics");
    };
    auto add_json = [&](CLI::App* sub) {
        sub->add_option("--json", cfg.json_path, "Also write the JSON document to this path");
    };
    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "Density scale n")->check(CLI::PositiveNumber);
        sub->add_option("--q", cfg.q, "Shear frequency q (substituted by 2qn when incompatible)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--m", cfg.m, "Shear amplitude m, or \"auto\" for the smallest certified");
        sub->add_option("--alpha", cfg.alpha, "Rotation angle");
        sub->add_flag("--allow-rational", cfg.allow_rational,
                      "Proceed when alpha is detected rational (recorded in the certificate)");
    };

    CLI::App* c1 = app.add_subcommand("verify-claim1", "Certify the containment and density claims");
    add_params(c1);
    c1->add_option("--tol", cfg.tol, "Curve refinement tolerance")->check(CLI::PositiveNumber);
    c1->add_option("--grid-spacing", cfg.grid_spacing, "Density witness grid spacing (0 = eps/4)");
    add_json(c1);
    add_common(c1);

    CLI::App* sp = app.add_subcommand("spread", "Search for a certified spreading iterate");
    add_params(sp);
    sp->add_option("--center", cfg.center, "Source ball center \"x,y\" (radius is 1/n)")->required();
    sp->add_option("--k-max", cfg.k_max, "Landing search bound (0 = default)");
    sp->add_option("--grid-spacing", cfg.grid_spacing, "Density witness grid spacing (0 = eps/4)");
    sp->add_option("--csv", cfg.csv_path, "Dump the final image cloud as CSV");
    add_json(sp);
    add_common(sp);

    CLI::App* fg = app.add_subcommand("figure", "Render the image of the J segment as SVG");
    add_params(fg);
    fg->add_option("--tol", cfg.tol, "Curve refinement tolerance")->check(CLI::PositiveNumber);
    fg->add_option("--grid-spacing", cfg.grid_spacing, "Witness grid spacing (0 = (1/n)/4)");
    fg->add_option("--out", cfg.out_path, "Output SVG path");
    fg->add_flag("--identity-map", cfg.identity_map, "Draw the source segment itself");
    add_common(fg);

    CLI::App* wd = app.add_subcommand("widths", "Certify directional width growth under iteration");
    wd->add_option("--map", cfg.map_kind, "conjugate | identity | rotation");
    add_params(wd);
    wd->add_option("--directions", cfg.directions, "Number of test directions")
        ->check(CLI::PositiveNumber);
    wd->add_option("--threshold", cfg.threshold, "Width threshold (0 = 2x initial max width)");
    wd->add_option("--k-max", cfg.widths_k_max, "Iterate bound")->check(CLI::PositiveNumber);
    wd->add_option("--window-tol", cfg.window_tol, "Window sampling spacing")
        ->check(CLI::PositiveNumber);
    add_json(wd);
    add_common(wd);

    CLI::App* rn = app.add_subcommand("rotnum", "Estimate a circle-lift rotation number");
    rn->add_option("--family", cfg.family, "rigid | arnold");
    rn->add_option("--omega", cfg.omega, "Rotation angle of the family");
    rn->add_option("--epsilon", cfg.epsilon, "Nonlinearity (arnold family, |epsilon| < 1)");
    rn->add_option("--iters", cfg.iterations, "Orbit length")->check(CLI::PositiveNumber);
    rn->add_option("--y0", cfg.y0, "Starting point");
    add_json(rn);
    add_common(rn);

    CLI::App* rh = app.add_subcommand("rho", "Band norm of a vertical shear: closed form vs grid");
    rh->add_option("--m", cfg.rho_m, "Shear amplitude")->check(CLI::PositiveNumber);
    rh->add_option("--q", cfg.rho_q, "Shear frequency")->check(CLI::PositiveNumber);
    rh->add_option("--rho", cfg.rho, "Band half-width (>= 0)");
    rh->add_option("--grid-density", cfg.grid_density, "Boundary grid samples per unit")
        ->check(CLI::Range(16, 1000000));
    add_json(rh);
    add_common(rh);

    CLI::App* vf = app.add_subcommand("verify", "Recompute a stored certificate and compare");
    vf->add_option("file", cfg.verify_path, "Certificate JSON path")->required();
    add_common(vf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        for (CLI::App* sub : app.get_subcommands()) apply_config_file(*sub, cfg.config_path);
        if (c1->parsed()) return cmd_verify_claim1(cfg);
        if (sp->parsed()) return cmd_spread(cfg);
        if (fg->parsed()) return cmd_figure(cfg);
        if (wd->parsed()) return cmd_widths(cfg);
        if (rn->parsed()) return cmd_rotnum(cfg);
        if (rh->parsed()) return cmd_rho(cfg);
        if (vf->parsed()) return cmd_verify(cfg);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const rational_alpha_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const search_exhausted_error& e) {
        std::fprintf(stderr, "error: %s (best residual %.3e at k=%lld)\n", e.what(),
                     e.best_residual, e.best_k);
        return kResource;
    } catch (const resource_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kResource;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInconclusive;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kResource;
    }
    return kUsage;
}

}  // namespace spreadlab
