#pragma once

// JSON payloads for matrices, polynomials, jets, branch data, scenes and
// reports. Exact values travel as strings "p/q"; float inputs are accepted
// and converted to the exact binary rational they denote.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluing.hpp"
#include "linalg.hpp"
#include "localpotential.hpp"
#include "planepair.hpp"

namespace lagimm::io
{

using json = nlohmann::json;

/// Input that does not match the expected schema; `where` is a JSON-pointer-like path.
class SchemaError : public std::runtime_error
{
public:
    SchemaError(const std::string &where, const std::string &what)
        : std::runtime_error(where + ": " + what), location(where)
    {
    }
    std::string location;
};

// ---------------------------------------------------------------------------
// Scalars

inline json to_json(const Rational &r) { return to_string(r); }

inline Rational rational_from_json(const json &j, const std::string &where)
{
    try {
        if (j.is_string()) {
            return parse_rational(j.get<std::string>());
        }
        if (j.is_number_integer()) {
            return Rational(j.get<long>());
        }
        if (j.is_number_float()) {
            return from_double(j.get<double>());
        }
    } catch (const std::invalid_argument &e) {
        throw SchemaError(where, e.what());
    }
    throw SchemaError(where, "expected a rational (string \"p/q\" or number)");
}

inline const json &field(const json &j, const char *key, const std::string &where)
{
    if (!j.is_object()) {
        throw SchemaError(where, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(where, std::string("missing field \"") + key + "\"");
    }
    return *it;
}

inline long long integer_from_json(const json &j, const std::string &where)
{
    if (!j.is_number_integer()) {
        throw SchemaError(where, "expected an integer");
    }
    return j.get<long long>();
}

// ---------------------------------------------------------------------------
// Matrices: {"n", "mode", "entries"}; non-square matrices add "cols".

inline json to_json(const QMatrix &m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            r.push_back(to_string(m(i, j)));
        }
        rows.push_back(std::move(r));
    }
    json out{{"n", m.rows()}, {"mode", "exact"}, {"entries", std::move(rows)}};
    if (m.cols() != m.rows()) {
        out["cols"] = m.cols();
    }
    return out;
}

inline json to_json(const GMatrix &m)
{
    json out = to_json(real_part(m));
    out["imag"] = to_json(imag_part(m))["entries"];
    return out;
}

inline json to_json(const DMatrix &m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j));
        }
        rows.push_back(std::move(r));
    }
    json out{{"n", m.rows()}, {"mode", "float"}, {"entries", std::move(rows)}};
    if (m.cols() != m.rows()) {
        out["cols"] = m.cols();
    }
    return out;
}

struct ParsedMatrix {
    QMatrix value;
    bool from_float = false;
};

inline ParsedMatrix matrix_from_json(const json &j, const std::string &where = "")
{
    const long long n = integer_from_json(field(j, "n", where), where + "/n");
    if (n <= 0) {
        throw SchemaError(where + "/n", "must be positive");
    }
    long long cols = n;
    if (j.contains("cols")) {
        cols = integer_from_json(j["cols"], where + "/cols");
    }
    std::string mode = "exact";
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) {
            throw SchemaError(where + "/mode", "expected \"exact\" or \"float\"");
        }
        mode = j["mode"].get<std::string>();
        if (mode != "exact" && mode != "float") {
            throw SchemaError(where + "/mode", "expected \"exact\" or \"float\", got \"" + mode + "\"");
        }
    }
    const json &e = field(j, "entries", where);
    if (!e.is_array() || static_cast<long long>(e.size()) != n) {
        throw SchemaError(where + "/entries", "expected " + std::to_string(n) + " rows");
    }
    ParsedMatrix out{QMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(cols)), mode == "float"};
    for (long long i = 0; i < n; ++i) {
        const std::string wr = where + "/entries/" + std::to_string(i);
        const json &row = e[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<long long>(row.size()) != cols) {
            throw SchemaError(wr, "expected " + std::to_string(cols) + " entries");
        }
        for (long long k = 0; k < cols; ++k) {
            const json &x = row[static_cast<std::size_t>(k)];
            if (x.is_number_float()) {
                out.from_float = true;
            }
            out.value(static_cast<std::size_t>(i), static_cast<std::size_t>(k))
                = rational_from_json(x, wr + "/" + std::to_string(k));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polynomials: {"vars": [...], "terms": [{"exp": [...], "coef": "p/q"}]}

inline json to_json(const Poly &p, const std::vector<std::string> &vars)
{
    json terms = json::array();
    for (const auto &[e, c] : p.terms()) {
        terms.push_back({{"exp", e}, {"coef", to_string(c)}});
    }
    return {{"vars", vars}, {"terms", std::move(terms)}};
}

inline Poly poly_from_json(const json &j, const std::string &where, std::size_t expected_vars)
{
    const json &vars = field(j, "vars", where);
    if (!vars.is_array()) {
        throw SchemaError(where + "/vars", "expected an array of names");
    }
    if (vars.size() != expected_vars) {
        throw SchemaError(where + "/vars",
                          "expected " + std::to_string(expected_vars) + " variables, got " + std::to_string(vars.size()));
    }
    const json &terms = field(j, "terms", where);
    if (!terms.is_array()) {
        throw SchemaError(where + "/terms", "expected an array");
    }
    Poly p(expected_vars);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string wt = where + "/terms/" + std::to_string(t);
        const json &ex = field(terms[t], "exp", wt);
        if (!ex.is_array() || ex.size() != expected_vars) {
            throw SchemaError(wt + "/exp", "expected " + std::to_string(expected_vars) + " exponents");
        }
        Exponent e;
        for (std::size_t i = 0; i < ex.size(); ++i) {
            const long long k = integer_from_json(ex[i], wt + "/exp/" + std::to_string(i));
            if (k < 0) {
                throw SchemaError(wt + "/exp/" + std::to_string(i), "exponents must be non-negative");
            }
            e.push_back(static_cast<int>(k));
        }
        p.add_term(e, rational_from_json(field(terms[t], "coef", wt), wt + "/coef"));
    }
    return p;
}

inline std::size_t declared_vars(const json &j, const std::string &where)
{
    const json &vars = field(j, "vars", where);
    if (!vars.is_array()) {
        throw SchemaError(where + "/vars", "expected an array of names");
    }
    return vars.size();
}

// ---------------------------------------------------------------------------
// Jet maps: {"m", "K", "components": [Poly...]}

inline json to_json(const JetMap &f, const std::vector<std::string> &vars)
{
    json comps = json::array();
    for (const auto &c : f.components()) {
        comps.push_back(to_json(c.poly(), vars));
    }
    return {{"m", f.source_dim()}, {"K", f.order()}, {"components", std::move(comps)}};
}

inline JetMap jetmap_from_json(const json &j, const std::string &where, std::size_t m, int order)
{
    const json &comps = field(j, "components", where);
    if (!comps.is_array()) {
        throw SchemaError(where + "/components", "expected an array");
    }
    if (j.contains("m") && integer_from_json(j["m"], where + "/m") != static_cast<long long>(m)) {
        throw SchemaError(where + "/m", "expected " + std::to_string(m) + " source variables");
    }
    std::vector<Jet> c;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        c.emplace_back(poly_from_json(comps[i], where + "/components/" + std::to_string(i), m), order);
    }
    if (c.empty()) {
        return JetMap();
    }
    return JetMap(std::move(c));
}

// ---------------------------------------------------------------------------
// Branch data: {"n", "lambda", "phi", "psi", "order"}

inline json to_json(const BranchData &b)
{
    json lam = json::array();
    for (const auto &l : b.lambda) {
        lam.push_back(to_string(l));
    }
    const auto t = indexed_names("t", b.n);
    return {{"n", b.n}, {"lambda", std::move(lam)}, {"phi", to_json(b.phi, t)}, {"psi", to_json(b.psi, t)},
            {"order", b.order}};
}

inline BranchData branch_from_json(const json &j, const std::string &where = "", std::optional<int> order = {})
{
    BranchData b;
    const long long n = integer_from_json(field(j, "n", where), where + "/n");
    if (n <= 0) {
        throw SchemaError(where + "/n", "must be positive");
    }
    b.n = static_cast<std::size_t>(n);
    b.order = order.value_or(j.contains("order") ? static_cast<int>(integer_from_json(j["order"], where + "/order"))
                                                 : default_jet_order);
    const json &lam = field(j, "lambda", where);
    if (!lam.is_array()) {
        throw SchemaError(where + "/lambda", "expected an array");
    }
    for (std::size_t i = 0; i < lam.size(); ++i) {
        b.lambda.push_back(rational_from_json(lam[i], where + "/lambda/" + std::to_string(i)));
    }
    std::vector<Jet> zero(b.n, Jet(b.n, b.order));
    b.phi = j.contains("phi") ? jetmap_from_json(j["phi"], where + "/phi", b.n, b.order) : JetMap(zero);
    b.psi = j.contains("psi") ? jetmap_from_json(j["psi"], where + "/psi", b.n, b.order) : JetMap(zero);
    try {
        b.validate();
    } catch (const ContractViolation &e) {
        throw SchemaError(where.empty() ? "/" : where, e.what());
    }
    return b;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const UPoly &p)
{
    json c = json::array();
    for (int k = 0; k <= p.degree(); ++k) {
        c.push_back(to_string(p.coeff(k)));
    }
    return {{"coefficients", std::move(c)}, {"text", p.str("x")}};
}

inline json to_json(const WeinstockReport &w)
{
    return {{"locally_rc", w.locally_rc},
            {"imaginary_axis_poly", to_json(w.imaginary_axis_poly)},
            {"offending", w.offending},
            {"boundary", w.boundary}};
}

template <typename T>
json jordan_block_json(const JordanBlock<T> &b)
{
    auto val = [](const T &x) -> json {
        if constexpr (std::is_same_v<T, Rational>) {
            return to_string(x);
        } else {
            return x;
        }
    };
    json out{{"size", b.size}};
    if (b.kind == JordanBlock<T>::Kind::Real) {
        out["kind"] = "real";
        out["lambda"] = val(b.lambda);
    } else {
        out["kind"] = "complex";
        out["s"] = val(b.s);
        out["t"] = val(b.t);
    }
    return out;
}

inline json to_json(const DiagonalizabilityCertificate &c)
{
    json out{{"diagonalizable", c.diagonalizable},
             {"minimal_polynomial", to_json(c.minimal_polynomial)},
             {"minpoly_squarefree", c.minpoly_squarefree},
             {"minpoly_real_roots", c.minpoly_real_roots},
             {"eigenvalues", c.eigenvalues},
             {"reason", c.reason}};
    if (c.exact_eigenvectors) {
        out["eigenvectors"] = to_json(*c.exact_eigenvectors);
    } else if (c.float_eigenvectors) {
        out["eigenvectors"] = to_json(*c.float_eigenvectors);
    }
    if (c.exact_offending_block) {
        out["offending_block"] = jordan_block_json(*c.exact_offending_block);
    } else if (c.float_offending_block) {
        out["offending_block"] = jordan_block_json(*c.float_offending_block);
    }
    return out;
}

inline json to_json(const Matrix<FieldElement> &m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j).str());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json to_json(const ForcedVanishing &f)
{
    return {{"case", f.kind == ForcedVanishing::Case::JordanBlock ? "jordan_block" : "complex_pair"},
            {"field", f.field},
            {"eigenvalue", f.eigenvalue},
            {"weight", f.weight},
            {"frame", to_json(f.frame)},
            {"J", to_json(f.J)},
            {"solution_dimension", f.solution_dimension},
            {"relation", f.relation()},
            {"verified", f.verified}};
}

inline json to_json(const ClassificationReport &r, const QMatrix &a)
{
    json out{{"A", to_json(a)},
             {"class", to_string(r.cls)},
             {"weinstock_rc", r.weinstock_rc},
             {"lagrangian_capable", r.lagrangian_capable},
             {"weinstock", to_json(r.weinstock)},
             {"certificate", to_json(r.certificate)}};
    if (r.witness) {
        out["witness"] = to_json(*r.witness);
    } else if (auto fv = forced_vanishing(a)) {
        out["forced_vanishing"] = to_json(*fv);
    }
    return out;
}

inline json to_json(const ObstructionReport &o)
{
    return {{"im_h", to_json(o.im_h)}, {"c", to_json(o.c)}, {"zero", o.is_zero()}};
}

inline json to_json(const LocalVerification &v)
{
    return {{"degree", v.degree},
            {"npde1", v.npde1},
            {"npde2", v.npde2},
            {"gradient_zero", v.gradient_zero},
            {"hessian_zero", v.hessian_zero},
            {"alpha_vanishes", v.alpha_vanishes},
            {"leading_minus_identity", v.leading_minus_identity},
            {"pullback_first", v.pullback_first},
            {"pullback_second", v.pullback_second},
            {"samples", v.samples},
            {"positive_samples", v.positive_samples},
            {"sampled_radius", to_string(v.sampled_radius)},
            {"certified_radius", to_string(v.certified_radius)},
            {"ok", v.ok()}};
}

inline json to_json(const LocalPotential &lp, const BranchData &br, const LocalVerification &v)
{
    const std::size_t n = lp.n;
    const auto xy = complex_coordinate_names(n);
    std::vector<std::string> uv = indexed_names("u", n);
    for (const auto &s : indexed_names("v", n)) {
        uv.push_back(s);
    }
    json alpha = json::array();
    for (std::size_t j = 0; j < lp.scaffold.alpha.cols(); ++j) {
        alpha.push_back(to_json(lp.scaffold.alpha(0, j).poly(), indexed_names("u", n)));
    }
    return {{"n", n},
            {"order", lp.f.order()},
            {"branches", to_json(br)},
            {"f", to_json(lp.f.poly(), xy)},
            {"r", to_json(lp.r.poly(), xy)},
            {"rtilde", to_json(lp.scaffold.rtilde.poly(), uv)},
            {"sigma", to_json(lp.scaffold.sigma, indexed_names("u", n))},
            {"alpha", std::move(alpha)},
            {"verification", to_json(v)}};
}

// ---------------------------------------------------------------------------
// Scenes
//
// {"n", "phi": Poly, "delta", "eps", "C"?, "box": [lo, hi]?,
//  "points": [{"center": [...], "potential": "file.json" | Poly, "A"?: Matrix}],
//  "branches"?: [{"name", "map": [Poly...]}]}
//
// A point carrying a matrix A contributes the translates of R^n and S(A)
// through that point as branches.

struct LoadedScene {
    GlobalScene scene;
    std::vector<BranchMap> branches;
    bool has_C = false;
};

inline std::vector<BranchMap> translated_plane_branches(const QMatrix &a, const std::vector<Rational> &center,
                                                        const std::string &tag)
{
    auto bs = plane_pair_branches(a);
    for (auto &b : bs) {
        b.name = tag + "/" + b.name;
        for (std::size_t k = 0; k < b.map.size(); ++k) {
            b.map[k] += Poly::constant(b.map[k].nvars(), center[k]);
        }
    }
    return bs;
}

inline json read_json_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError(path.string(), "cannot open file");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw SchemaError(path.string(), std::string("invalid JSON: ") + e.what());
    }
}

inline LoadedScene scene_from_json(const json &j, const std::filesystem::path &base = {})
{
    LoadedScene out;
    GlobalScene &s = out.scene;
    const long long n = integer_from_json(field(j, "n", ""), "/n");
    if (n <= 0) {
        throw SchemaError("/n", "must be positive");
    }
    s.n = static_cast<std::size_t>(n);
    const std::size_t dim = 2 * s.n;
    s.phi = poly_from_json(field(j, "phi", ""), "/phi", dim);
    s.eps = rational_from_json(field(j, "eps", ""), "/eps");
    s.delta = j.contains("delta") ? rational_from_json(j["delta"], "/delta") : Rational(s.eps / 2);
    if (j.contains("C")) {
        s.C = rational_from_json(j["C"], "/C");
        out.has_C = true;
    }
    if (j.contains("box")) {
        const json &b = j["box"];
        if (!b.is_array() || b.size() != 2) {
            throw SchemaError("/box", "expected [lo, hi]");
        }
        s.box_lo = rational_from_json(b[0], "/box/0");
        s.box_hi = rational_from_json(b[1], "/box/1");
    }
    if (j.contains("points")) {
        const json &pts = j["points"];
        if (!pts.is_array()) {
            throw SchemaError("/points", "expected an array");
        }
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const std::string w = "/points/" + std::to_string(k);
            ScenePoint p;
            const json &c = field(pts[k], "center", w);
            if (!c.is_array() || c.size() != dim) {
                throw SchemaError(w + "/center", "expected " + std::to_string(dim) + " coordinates");
            }
            for (std::size_t a = 0; a < dim; ++a) {
                p.center.push_back(rational_from_json(c[a], w + "/center/" + std::to_string(a)));
            }
            const json &pot = field(pts[k], "potential", w);
            if (pot.is_string()) {
                const auto file = base / pot.get<std::string>();
                const json lp = read_json_file(file);
                p.f = poly_from_json(field(lp, "f", file.string()), file.string() + "/f", dim);
            } else {
                p.f = poly_from_json(pot, w + "/potential", dim);
            }
            if (pts[k].contains("A")) {
                const QMatrix a = matrix_from_json(pts[k]["A"], w + "/A").value;
                if (a.rows() != s.n || a.cols() != s.n) {
                    throw SchemaError(w + "/A", "expected an n x n matrix");
                }
                for (auto &b : translated_plane_branches(a, p.center, "p" + std::to_string(k + 1))) {
                    out.branches.push_back(std::move(b));
                }
            }
            s.points.push_back(std::move(p));
        }
    }
    if (j.contains("branches")) {
        const json &bs = j["branches"];
        if (!bs.is_array()) {
            throw SchemaError("/branches", "expected an array");
        }
        for (std::size_t k = 0; k < bs.size(); ++k) {
            const std::string w = "/branches/" + std::to_string(k);
            BranchMap b;
            b.name = bs[k].contains("name") && bs[k]["name"].is_string() ? bs[k]["name"].get<std::string>()
                                                                          : "branch" + std::to_string(k + 1);
            const json &m = field(bs[k], "map", w);
            if (!m.is_array() || m.size() != dim) {
                throw SchemaError(w + "/map", "expected " + std::to_string(dim) + " polynomials");
            }
            for (std::size_t a = 0; a < dim; ++a) {
                b.map.push_back(poly_from_json(m[a], w + "/map/" + std::to_string(a), s.n));
            }
            out.branches.push_back(std::move(b));
        }
    }
    try {
        s.validate();
    } catch (const SceneError &e) {
        throw SchemaError("/", e.what());
    }
    return out;
}

inline json to_json(const GlobalScene &s, const std::vector<json> &potentials)
{
    const auto xy = complex_coordinate_names(s.n);
    json pts = json::array();
    for (std::size_t k = 0; k < s.points.size(); ++k) {
        json c = json::array();
        for (const auto &x : s.points[k].center) {
            c.push_back(to_string(x));
        }
        json p{{"center", std::move(c)}};
        p["potential"] = k < potentials.size() ? potentials[k] : to_json(s.points[k].f, xy);
        pts.push_back(std::move(p));
    }
    return {{"n", s.n},
            {"phi", to_json(s.phi, xy)},
            {"delta", to_string(s.delta)},
            {"eps", to_string(s.eps)},
            {"C", to_string(s.C)},
            {"box", {to_string(s.box_lo), to_string(s.box_hi)}},
            {"points", std::move(pts)}};
}

inline json to_json(const CertifyReport &r)
{
    json bs = json::array();
    for (const auto &b : r.branches) {
        bs.push_back({{"name", b.name}, {"exact_zero", b.exact_zero}, {"max_residual", b.max_residual}});
    }
    json fails = json::array();
    for (const auto &z : r.failures) {
        fails.push_back(z);
    }
    return {{"samples", r.samples},
            {"positive", r.positive},
            {"positive_everywhere", r.positive_everywhere()},
            {"failed_points", std::move(fails)},
            {"min_eigenvalue", r.min_eigenvalue},
            {"max_non_11", r.max_non_11},
            {"branches", std::move(bs)},
            {"ok", r.ok()}};
}

/// Sorted keys, two-space indent, trailing newline.
inline std::string dump(const json &j)
{
    return j.dump(2) + "\n";
}

} // namespace lagimm::io
