// Acceptance gate: one pass/fail line per criterion, exit 0 only when all
// pass. argv[1] names the CLI binary; everything else goes through the
// library. Runtime limits are part of the criteria and are enforced.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadlab/construction.hpp"
#include "spreadlab/errors.hpp"
#include "spreadlab/foliation.hpp"
#include "spreadlab/geometry.hpp"
#include "spreadlab/maps.hpp"

using namespace spreadlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string g_cli;
fs::path g_dir;
int g_failures = 0;

double now_seconds() {
    static const auto start = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cli(const std::string& args, const std::string& log_name) {
    const fs::path log = g_dir / log_name;
    return run_shell(g_cli + " " + args + " > " + log.string() + " 2>&1");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const fs::path& p) { return json::parse(read_file(p)); }

double snap(double x) { return std::ldexp(std::round(std::ldexp(x, 40)), -40); }

double irrational_angle() { return std::sqrt(2.0) - 1.0; }

void criterion(int index, const std::function<std::string()>& body) {
    const double t0 = now_seconds();
    std::string detail;
    bool ok = false;
    try {
        detail = body();
        ok = detail.rfind("FAIL", 0) != 0;
        if (!ok) detail = detail.substr(4).empty() ? "check failed" : detail.substr(5);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs = now_seconds() - t0;
    std::printf("[%s] criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", index, detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

// Square grid of the given spacing whose nodes cover the ball.
PointCloud covering_grid(Ball b, double spacing) {
    std::vector<Vec2> pts;
    long long reach = static_cast<long long>(std::ceil(b.radius / spacing)) + 1;
    for (long long i = -reach; i <= reach; ++i)
        for (long long j = -reach; j <= reach; ++j)
            pts.push_back(b.center + Vec2{static_cast<double>(i) * spacing,
                                          static_cast<double>(j) * spacing});
    return PointCloud(std::move(pts));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <cli-binary>\n");
        return 1;
    }
    g_cli = argv[1];
    g_dir = fs::temp_directory_path() / "spreadlab_acceptance";
    fs::create_directories(g_dir);

    const double alpha = irrational_angle();

    // 1. Containment certificate for (1, 2, auto) through the CLI.
    criterion(1, [&] {
        const double t0 = now_seconds();
        const fs::path doc_path = g_dir / "c1.json";
        const int code = run_cli("verify-claim1 --n 1 --q 2 --m auto --tol 0.001 --json " +
                                     doc_path.string(),
                                 "c1.log");
        const double secs = now_seconds() - t0;
        if (code != 0) return std::string("FAIL verify-claim1 exited ") + std::to_string(code);
        json doc = load_json(doc_path);
        const double a = doc.at("a").get<double>();
        const double b = doc.at("b").get<double>();
        const double box = std::hypot(a, b);
        if (!(box <= 0.5)) return std::string("FAIL box norm exceeds 1/2");
        if (doc.at("analytic_box_ok") != true || doc.at("i_segment_ok") != true)
            return std::string("FAIL containment checks did not pass");
        if (secs >= 5.0) return std::string("FAIL runtime over 5s");
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "verify-claim1 (1,2,m=%lld) exit 0, box norm %.4f <= 0.5, vertex check ok",
                      doc.at("params").at("m").get<long long>(), box);
        return std::string(buf);
    });

    // 2. Density of the image of the second segment at both stated scales.
    criterion(2, [&] {
        const double t0 = now_seconds();
        SpreadParams p = validate_params(1, 2, choose_m(1, 2), alpha);
        Claim1Certificate cert = claim1_verify(p, 1e-3);
        if (cert.j_density.status != Density::certified_dense)
            return std::string("FAIL image not certified dense at eps 1");
        if (cert.grid_spacing != 0.25) return std::string("FAIL grid spacing is not 1/4");

        SegmentPair segs = segments(p);
        Polyline pj = refine_segment_image(build_h(p), segs.j_seg.a, segs.j_seg.b, 1e-3);
        PointCloud cloud = pj.to_cloud();
        cloud.build_index(1.0);
        const double fine_eps = 2.0 / static_cast<double>(p.q);
        DensityVerdict fine = eps_dense_square(cloud, {0.0, 0.0}, 1.0, fine_eps, 0.25);
        if (fine.status != Density::certified_dense)
            return std::string("FAIL image not certified dense at eps 2/q");
        if (now_seconds() - t0 >= 10.0) return std::string("FAIL runtime over 10s");
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "image certified 1-dense in [-1,1]^2 at spacing 1/4 (max gap %.3f), "
                      "and %.0f/q-dense",
                      cert.j_density.max_gap, 2.0);
        return std::string(buf);
    });

    // 3. Certified spreading iterate for (2, 4, auto) at the predicted center.
    criterion(3, [&] {
        const double t0 = now_seconds();
        const fs::path doc_path = g_dir / "spread24.json";
        const int code = run_cli("spread --n 2 --q 4 --m auto --center 0.3,0.7 --json " +
                                     doc_path.string(),
                                 "spread24.log");
        const double secs = now_seconds() - t0;
        if (code != 0) return std::string("FAIL spread exited ") + std::to_string(code);
        json doc = load_json(doc_path);
        if (doc.at("verdict") != "certified-dense") return std::string("FAIL verdict not dense");
        if (doc.at("eps") != 0.5) return std::string("FAIL eps is not 1/2");
        if (doc.at("target_ball").at("radius") != 2.0)
            return std::string("FAIL target radius is not 2");
        if (doc.at("predicted") != true)
            return std::string("FAIL fallback scan was needed for the target center");
        if (secs >= 60.0) return std::string("FAIL runtime over 60s");
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "certified dense at eps 1/2, k=%lld, predicted center (%.2f, %.2f)",
                      doc.at("k").get<long long>(),
                      doc.at("target_ball").at("center").at(0).get<double>(),
                      doc.at("target_ball").at("center").at(1).get<double>());
        return std::string(buf);
    });

    // 4. Direct cloud iteration cross-checks the conjugacy fast path.
    criterion(4, [&] {
        const double t0 = now_seconds();
        SpreadParams p = validate_params(2, 4, choose_m(2, 4), alpha);
        const Ball source{{0.3, 0.7}, 0.5};

        SpreadResult fast = spreading_search(p, source);
        SpreadOptions opts;
        opts.mode = SpreadMode::direct_cloud;
        opts.direct_points = 10'000;
        SpreadResult direct = spreading_search(p, source, opts);

        if (fast.certificate.verdict.status != Density::certified_dense)
            return std::string("FAIL conjugacy route verdict not dense");
        if (direct.certificate.verdict.status != Density::certified_dense)
            return std::string("FAIL direct route verdict not dense");
        if (fast.certificate.eps != direct.certificate.eps)
            return std::string("FAIL the two routes used different eps");

        const MapExpr f = conjugate(build_h(p), MapExpr::translate({alpha, 0.0}));
        const double tol = std::pow(lipschitz_bound(f), 5.0) * 1e-12;
        double worst = 0.0;
        for (Vec2 z : {Vec2{0.3, 0.7}, Vec2{0.1, 0.5}, Vec2{0.55, 0.9}}) {
            worst = std::max(worst, norm(iterate(f, z, 5) - iterate_naive(f, z, 5)));
        }
        if (!(worst <= tol)) return std::string("FAIL fast and naive iterates disagree");
        if (now_seconds() - t0 >= 120.0) return std::string("FAIL runtime over 120s");
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "both routes certified dense at eps 1/2 (k=%lld fast, k=%lld direct), "
                      "iterate agreement %.1e",
                      fast.certificate.k, direct.certificate.k, worst);
        return std::string(buf);
    });

    // 5. Density transfer through a fixed shear with its certified constant.
    criterion(5, [&] {
        MapExpr g = MapExpr::vshear(1, 1);
        const double C = lipschitz_bound(g);
        if (std::abs(C - (1.0 + 2.0 * kPi)) > 1e-12)
            return std::string("FAIL transfer constant is not 1 + 2pi");

        std::mt19937_64 rng(20260817);
        std::uniform_real_distribution<double> ud(-1.0, 1.0);
        int failures = 0;
        for (int trial = 0; trial < 100; ++trial) {
            Ball b{{ud(rng), ud(rng)}, 0.5 + 0.5 * std::abs(ud(rng))};
            const double spacing = b.radius / 12.0;
            PointCloud cloud = covering_grid(b, spacing);
            const double eps = 2.0 * spacing;
            if (eps_dense(cloud, b, eps, eps / 4.0).status != Density::certified_dense) {
                ++failures;
                continue;
            }
            std::vector<Vec2> mapped;
            mapped.reserve(cloud.size());
            for (const Vec2& pt : cloud.points()) mapped.push_back(eval(g, pt));
            PointCloud image(std::move(mapped));
            image.build_index(C * eps);
            Ball target{eval(g, b.center), b.radius / C};
            for (int i = 0; i < 100; ++i) {
                Vec2 off{ud(rng) * target.radius, ud(rng) * target.radius};
                if (norm_sq(off) > target.radius * target.radius) continue;
                if (image.nearest_distance(target.center + off) > C * eps + 1e-9) {
                    ++failures;
                    break;
                }
            }
        }
        if (failures != 0)
            return std::string("FAIL ") + std::to_string(failures) + " of 100 trials failed";
        return std::string("100 randomized transfer trials, zero failures (C = 1 + 2pi)");
    });

    // 6. Width growth passes for the spreading map, fails for rigid motions.
    criterion(6, [&] {
        const fs::path doc_path = g_dir / "widths.json";
        const int pass_code = run_cli(
            "widths --map conjugate --n 2 --q 4 --m auto --threshold 4 --k-max 64 --json " +
                doc_path.string(),
            "widths.log");
        if (pass_code != 0) return std::string("FAIL widths exited ") + std::to_string(pass_code);
        json doc = load_json(doc_path);
        if (doc.at("pass") != true) return std::string("FAIL certificate did not pass");
        for (const json& rec : doc.at("records"))
            if (rec.at("k").get<long long>() < 1) return std::string("FAIL a direction never grew");

        const int id_code = run_cli("widths --map identity --threshold 4 --k-max 64", "widths_id.log");
        const int rot_code = run_cli("widths --map rotation --threshold 4 --k-max 64", "widths_rot.log");
        if (id_code != 1) return std::string("FAIL identity map did not exit 1");
        if (rot_code != 1) return std::string("FAIL rotation did not exit 1");
        return std::string("16 directions exceeded threshold 4 within k_max 64; "
                           "identity and rotation exit 1");
    });

    // 7. Rotation numbers: exact for rigid lifts, start-independent for the
    // perturbed family.
    criterion(7, [&] {
        RotationEstimate rigid = rotation_number(CircleLift::rigid(0.25), 1000, 0.6);
        if (rigid.estimate != 0.25 || rigid.error_bound != 0.001)
            return std::string("FAIL rigid lift estimate is not exact");

        CircleLift arnold = CircleLift::arnold(0.3, 0.1);
        RotationEstimate e0 = rotation_number(arnold, 1'000'000, 0.0);
        RotationEstimate e1 = rotation_number(arnold, 1'000'000, 0.37);
        const double gap = std::abs(e0.estimate - e1.estimate);
        if (!(gap <= 2e-6)) return std::string("FAIL two-start estimates differ");
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "rigid recovered exactly (bound 1/n); perturbed two-start gap %.2e <= 2e-6",
                      gap);
        return std::string(buf);
    });

    // 8. Band norm closed form versus grid, plus metric identities.
    criterion(8, [&] {
        MapExpr e = MapExpr::vshear(3, 2);
        BandNormQuery query{0.1, 10000};
        const double closed = band_norm(e, query);
        const double expected = 3.0 * std::cosh(0.4 * kPi);
        if (std::abs(closed - expected) > 1e-12 * expected)
            return std::string("FAIL closed form mismatch");
        const double est = band_norm_numeric(e, query);
        if (std::abs(est - closed) > 1e-6 * closed)
            return std::string("FAIL grid estimate beyond 1e-6 relative");

        BandNormQuery coarse{0.1, 64};
        for (const MapExpr& same :
             {e, MapExpr::translate({0.3, -0.8}), MapExpr::identity(), MapExpr::hshear(2, 3)})
            if (d_rho(same, same, coarse) != 0.0)
                return std::string("FAIL self distance is not zero");

        std::mt19937_64 rng(20260817);
        std::uniform_real_distribution<double> ud(-2.0, 2.0);
        for (int i = 0; i < 100; ++i) {
            MapExpr a = MapExpr::translate({ud(rng), ud(rng)});
            MapExpr b = i % 3 == 0 ? MapExpr::vshear(1 + i % 4, 1 + i % 2)
                                   : MapExpr::translate({ud(rng), ud(rng)});
            MapExpr c = i % 5 == 0 ? MapExpr::hshear(1 + i % 3, 1 + i % 3)
                                   : MapExpr::translate({ud(rng), ud(rng)});
            const double ab = d_rho(a, b, coarse);
            const double bc = d_rho(b, c, coarse);
            const double ac = d_rho(a, c, coarse);
            if (!(ac <= ab + bc + 1e-9)) return std::string("FAIL triangle inequality violated");
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "closed form %.12f reproduced by the grid within 1e-6; metric identities ok",
                      closed);
        return std::string(buf);
    });

    // 9. Structural invariants of the shear pairs on seeded random input.
    criterion(9, [&] {
        std::mt19937_64 rng(20260817);
        std::uniform_real_distribution<double> ud(-3.0, 3.0);
        std::uniform_int_distribution<int> ui(-3, 3);
        double worst_equiv = 0.0, worst_lattice = 0.0, worst_det = 0.0, worst_inv = 0.0;
        bool inv_ok = true;
        for (auto [n, q, m] : {std::tuple<long long, long long, long long>{1, 2, 102},
                               std::tuple<long long, long long, long long>{2, 4, 1612}}) {
            MapExpr h = MapExpr::compose(MapExpr::hshear(n, q), MapExpr::vshear(m, q));
            const double step = 1.0 / static_cast<double>(q);
            // The vertical stage amplifies the recovered x by its Lipschitz
            // constant 1 + 2 pi q m, so the round-trip bound scales with it.
            const double inv_tol =
                (1.0 + 2.0 * kPi * static_cast<double>(q * m)) * 1e-15;
            for (int i = 0; i < 200; ++i) {
                const Vec2 z{snap(ud(rng)), snap(ud(rng))};
                const Vec2 v{static_cast<double>(ui(rng)), static_cast<double>(ui(rng))};
                worst_equiv =
                    std::max(worst_equiv, norm(eval(h, z + v) - (eval(h, z) + v)));
                worst_lattice = std::max(
                    worst_lattice, norm(eval(h, z + Vec2{step, 0.0}) - (eval(h, z) + Vec2{step, 0.0})));
                worst_lattice = std::max(
                    worst_lattice, norm(eval(h, z + Vec2{0.0, step}) - (eval(h, z) + Vec2{0.0, step})));
                worst_det = std::max(worst_det, std::abs(std::abs(jacobian(h, z).det()) - 1.0));
                const double inv_err = norm(eval_inverse(h, eval(h, z)) - z);
                worst_inv = std::max(worst_inv, inv_err);
                if (!(inv_err <= inv_tol)) inv_ok = false;
            }
        }
        if (!(worst_equiv <= 1e-12)) return std::string("FAIL integer equivariance drift");
        if (!(worst_lattice <= 1e-12)) return std::string("FAIL lattice commutation drift");
        if (!(worst_det <= 1e-5)) return std::string("FAIL area distortion");
        if (!inv_ok) return std::string("FAIL inverse round-trip drift beyond the scaled bound");
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "equivariance %.1e, lattice %.1e, |det|-1 %.1e, inverse %.1e",
                      worst_equiv, worst_lattice, worst_det, worst_inv);
        return std::string(buf);
    });

    // 10. Byte-level determinism across repeated runs and thread settings.
    criterion(10, [&] {
        const fs::path j1 = g_dir / "det1.json";
        const fs::path j2 = g_dir / "det2.json";
        const fs::path j3 = g_dir / "det3.json";
        const std::string spread_args = " spread --center 0.3,0.7 --json ";
        if (run_shell(g_cli + spread_args + j1.string() + " > /dev/null 2>&1") != 0 ||
            run_shell("LAB_THREADS=1 " + g_cli + spread_args + j2.string() +
                      " > /dev/null 2>&1") != 0 ||
            run_shell("LAB_THREADS=4 " + g_cli + spread_args + j3.string() +
                      " > /dev/null 2>&1") != 0)
            return std::string("FAIL spread run did not exit 0");
        const std::string a = read_file(j1);
        if (a.empty() || a != read_file(j2) || a != read_file(j3))
            return std::string("FAIL spread certificates differ across runs");

        const fs::path s1 = g_dir / "det1.svg";
        const fs::path s2 = g_dir / "det2.svg";
        if (run_shell("LAB_THREADS=1 " + g_cli + " figure --out " + s1.string() +
                      " > /dev/null 2>&1") != 0 ||
            run_shell("LAB_THREADS=4 " + g_cli + " figure --out " + s2.string() +
                      " > /dev/null 2>&1") != 0)
            return std::string("FAIL figure run did not exit 0");
        const std::string svg = read_file(s1);
        if (svg.empty() || svg != read_file(s2))
            return std::string("FAIL figures differ across thread settings");
        return std::string("certificates and figure byte-identical across runs and LAB_THREADS");
    });

    if (g_failures == 0) {
        std::printf("acceptance: all 10 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria failed\n", g_failures);
    return 1;
}
