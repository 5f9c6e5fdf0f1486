#pragma once

#include <string>

#include <json.hpp>

#include "spreadlab/construction.hpp"
#include "spreadlab/foliation.hpp"

namespace spreadlab {

using json = nlohmann::json;

// Canonical certificate documents. Each builder takes the user-facing inputs
// (requested q before any substitution, concrete m) and recomputes everything
// else, so a stored document can be re-verified by rebuilding it from its own
// fields and comparing for exact equality. All doubles round-trip through the
// serialization, which makes that comparison byte-safe.

// Claim-level certificate: analytic box bound, refined image containment,
// vertical transversality, and square density. Uncertified parameters yield a
// document carrying the violations with the numeric checks nulled out.
json claim1_doc(long long n, long long q_requested, long long m, double alpha, double tol,
                double grid_spacing, bool allow_rational);

// Spreading certificate (fixed schema). When result_out is non-null the full
// search result is copied there (for CSV dumps). Uncertified parameters yield
// a violations document, as above.
json spread_doc(long long n, long long q_requested, long long m, double alpha, Vec2 source_center,
                double grid_spacing, long long k_max, bool allow_rational,
                SpreadResult* result_out);

// Width growth certificate plus the map description needed to re-verify it.
json widths_doc(const WidthCertificate& cert, const json& map_desc);

json rotnum_doc(const CircleLift& f, long long iterations, double y0);

// Band-norm report for a single vertical shear: closed form vs boundary-grid
// estimate, plus the band distance to the identity. Records the pointwise
// norm convention used.
json rho_doc(long long m, long long q, double rho, int grid_density);

// Rebuilds the map a widths document describes.
MapExpr map_from_desc(const json& desc);

struct VerifyOutcome {
    bool known_kind = false;
    bool reproduced = false;
    std::string kind;
    std::string detail;
};

// Recomputes a stored certificate from its own inputs and compares exactly.
VerifyOutcome verify_certificate(const json& doc);

// Writes content to path via a temp file and rename, so readers never observe
// a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace spreadlab
