#include "spreadlab/certificates.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "spreadlab/geometry.hpp"

namespace spreadlab {

namespace {

json ball_json(const Ball& b) {
    return json{{"center", {b.center.x, b.center.y}}, {"radius", b.radius}};
}

Ball ball_from(const json& j) {
    return Ball{{j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()},
                j.at("radius").get<double>()};
}

json params_json(long long n, long long q_requested, long long m, double alpha) {
    return json{{"n", n}, {"q", q_requested}, {"m", m}, {"alpha", alpha}};
}

}  // namespace

json claim1_doc(long long n, long long q_requested, long long m, double alpha, double tol,
                double grid_spacing, bool allow_rational) {
    long long q_eff = resolve_q(n, q_requested);
    SpreadParams p = validate_params(n, q_eff, m, alpha, allow_rational);
    const double radius = 1.0 / (2.0 * static_cast<double>(n));
    const double eps = 1.0 / static_cast<double>(n);
    const double gs = grid_spacing > 0.0 ? grid_spacing : eps / 4.0;

    json doc;
    doc["params"] = params_json(n, q_requested, m, alpha);
    doc["substituted_q"] = q_eff;
    doc["delta"] = p.delta();
    doc["a"] = p.box_a();
    doc["b"] = p.box_b();
    doc["analytic_box_ok"] = std::hypot(p.box_a(), p.box_b()) <= radius;
    doc["violations"] = p.violations;
    if (p.rational_forced) doc["rational_forced"] = true;
    doc["tol"] = tol;
    doc["grid_spacing"] = gs;
    doc["i_radius"] = radius;
    doc["j_eps"] = eps;
    if (!p.certified) {
        doc["i_segment_ok"] = nullptr;
        doc["i_max_distance"] = nullptr;
        doc["j_transversal_ok"] = nullptr;
        doc["j_verdict"] = nullptr;
        doc["j_max_gap"] = nullptr;
        return doc;
    }
    Claim1Certificate c = claim1_verify(p, tol, gs);
    doc["i_segment_ok"] = c.i_segment_ok;
    doc["i_max_distance"] = c.i_max_distance;
    doc["j_transversal_ok"] = c.j_transversal_ok;
    doc["j_verdict"] = to_string(c.j_density.status);
    doc["j_max_gap"] = c.j_density.max_gap;
    return doc;
}

json spread_doc(long long n, long long q_requested, long long m, double alpha, Vec2 source_center,
                double grid_spacing, long long k_max, bool allow_rational,
                SpreadResult* result_out) {
    long long q_eff = resolve_q(n, q_requested);
    SpreadParams p = validate_params(n, q_eff, m, alpha, allow_rational);
    const Ball source{source_center, 1.0 / static_cast<double>(n)};

    json doc;
    doc["params"] = params_json(n, q_requested, m, alpha);
    doc["substituted_q"] = q_eff;
    doc["delta"] = p.delta();
    doc["a"] = p.box_a();
    doc["b"] = p.box_b();
    if (p.rational_forced) doc["rational_forced"] = true;
    doc["source_ball"] = ball_json(source);
    if (!p.certified) {
        doc["violations"] = p.violations;
        return doc;
    }

    SpreadOptions opts;
    opts.grid_spacing = grid_spacing;
    opts.k_max = k_max;
    SpreadResult res = spreading_search(p, source, opts);
    const DensityCertificate& c = res.certificate;
    doc["k"] = c.k;
    doc["r"] = c.r;
    doc["target_ball"] = ball_json(c.target_ball);
    doc["eps"] = c.eps;
    doc["verdict"] = to_string(c.verdict.status);
    doc["max_gap"] = c.verdict.max_gap;
    doc["grid_spacing"] = c.verdict.grid_spacing;
    doc["predicted"] = c.predicted;
    if (result_out) *result_out = std::move(res);
    return doc;
}

json widths_doc(const WidthCertificate& cert, const json& map_desc) {
    json dirs = json::array();
    json records = json::array();
    for (const WidthRecord& r : cert.records) {
        dirs.push_back({r.direction.x, r.direction.y});
        records.push_back({{"k", r.k}, {"width", r.width}});
    }
    json doc;
    doc["map"] = map_desc;
    doc["directions"] = dirs;
    doc["records"] = records;
    doc["threshold"] = cert.threshold;
    doc["k_max"] = cert.k_max;
    doc["window_tol"] = cert.window_tol;
    doc["pass"] = cert.pass;
    return doc;
}

json rotnum_doc(const CircleLift& f, long long iterations, double y0) {
    RotationEstimate est = rotation_number(f, iterations, y0);
    json doc;
    doc["family"] = f.family() == CircleLift::Family::rigid ? "rigid" : "arnold";
    doc["omega"] = f.omega();
    doc["epsilon"] = f.epsilon();
    doc["y0"] = y0;
    doc["iterations"] = iterations;
    doc["estimate"] = est.estimate;
    doc["error_bound"] = est.error_bound;
    return doc;
}

json rho_doc(long long m, long long q, double rho, int grid_density) {
    MapExpr e = MapExpr::vshear(m, q);
    BandNormQuery query{rho, grid_density};
    json doc;
    doc["kind"] = "vshear";
    doc["m"] = m;
    doc["q"] = q;
    doc["rho"] = rho;
    doc["grid_density"] = grid_density;
    doc["norm"] = "euclidean";
    doc["closed_form"] = band_norm(e, query);
    doc["estimate"] = band_norm_numeric(e, query);
    doc["d_rho_to_identity"] = d_rho(e, MapExpr::identity(), query);
    return doc;
}

MapExpr map_from_desc(const json& desc) {
    const std::string kind = desc.at("kind").get<std::string>();
    if (kind == "identity") return MapExpr::identity();
    if (kind == "rotation")
        return MapExpr::translate({desc.at("alpha").get<double>(), 0.0});
    if (kind == "conjugate") {
        SpreadParams p;
        p.n = desc.at("n").get<long long>();
        p.q = desc.at("q").get<long long>();
        p.m = desc.at("m").get<long long>();
        return conjugate(build_h(p), MapExpr::translate({desc.at("alpha").get<double>(), 0.0}));
    }
    throw std::invalid_argument("map description kind must be identity, rotation, or conjugate");
}

VerifyOutcome verify_certificate(const json& doc) {
    VerifyOutcome out;
    out.known_kind = true;
    json re;
    try {
        if (doc.contains("source_ball")) {
            out.kind = "spread";
            const json& P = doc.at("params");
            Ball src = ball_from(doc.at("source_ball"));
            // Capping the landing scan at the stored k reproduces it: the
            // finder returns the smallest landing k, and the stored k was
            // found under a cap at least as large.
            re = spread_doc(P.at("n").get<long long>(), P.at("q").get<long long>(),
                            P.at("m").get<long long>(), P.at("alpha").get<double>(), src.center,
                            doc.value("grid_spacing", 0.0), doc.value("k", 0LL),
                            doc.value("rational_forced", false), nullptr);
        } else if (doc.contains("i_segment_ok")) {
            out.kind = "claim1";
            const json& P = doc.at("params");
            re = claim1_doc(P.at("n").get<long long>(), P.at("q").get<long long>(),
                            P.at("m").get<long long>(), P.at("alpha").get<double>(),
                            doc.at("tol").get<double>(), doc.at("grid_spacing").get<double>(),
                            doc.value("rational_forced", false));
        } else if (doc.contains("records")) {
            out.kind = "widths";
            MapExpr e = map_from_desc(doc.at("map"));
            std::vector<Vec2> dirs;
            for (const json& d : doc.at("directions"))
                dirs.push_back({d.at(0).get<double>(), d.at(1).get<double>()});
            WidthCertificate cert =
                width_growth_certificate(e, dirs, doc.at("threshold").get<double>(),
                                         doc.at("k_max").get<long long>(),
                                         doc.at("window_tol").get<double>());
            re = widths_doc(cert, doc.at("map"));
        } else if (doc.contains("family")) {
            out.kind = "rotnum";
            const std::string fam = doc.at("family").get<std::string>();
            CircleLift f = fam == "rigid"
                               ? CircleLift::rigid(doc.at("omega").get<double>())
                               : CircleLift::arnold(doc.at("omega").get<double>(),
                                                    doc.at("epsilon").get<double>());
            re = rotnum_doc(f, doc.at("iterations").get<long long>(), doc.at("y0").get<double>());
        } else if (doc.contains("closed_form")) {
            out.kind = "band-norm";
            re = rho_doc(doc.at("m").get<long long>(), doc.at("q").get<long long>(),
                         doc.at("rho").get<double>(), doc.at("grid_density").get<int>());
        } else {
            out.known_kind = false;
            out.detail = "no recognized certificate fields";
            return out;
        }
    } catch (const std::exception& e) {
        out.detail = e.what();
        return out;
    }
    out.reproduced = re == doc;
    if (!out.reproduced) out.detail = "recomputed document differs from the stored one";
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

}  // namespace spreadlab
