#pragma once

// Verb implementations shared by the command-line front end and the demo suite.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lagimm/io.hpp"
#include "lagimm/random.hpp"

namespace lagimm::cli
{

using io::json;

enum ExitCode { Ok = 0, UsageError = 1, NegativeVerdict = 2 };

struct Outcome {
    json report;
    int code = Ok;
};

struct Options {
    int order = default_jet_order;
    double tol = default_tolerance;
    int grid = 11;
    std::optional<std::string> delta;
    std::optional<std::string> eps;
    std::uint64_t seed = 1;
};

inline QMatrix load_matrix(const std::filesystem::path &p)
{
    return io::matrix_from_json(io::read_json_file(p), p.string()).value;
}

inline Outcome classify_cmd(const QMatrix &a)
{
    const auto rep = classify(a);
    return {io::to_json(rep, a), rep.cls == PairClass::LagrangianAndRC ? Ok : NegativeVerdict};
}

inline Outcome witness_cmd(const QMatrix &a)
{
    try {
        const QMatrix h = witness_matrix(a);
        const GMatrix hg = to_gauss(h);
        const DiffForm w = kahler_form(hg);
        const bool first = pullback(w, real_plane_parametrization(a.rows())).is_zero();
        const bool second = pullback(w, graph_plane_parametrization(a)).is_zero();
        json r{{"A", io::to_json(a)},
               {"H", io::to_json(h)},
               {"spd", is_spd(h)},
               {"commutes", h * a == a.transpose() * h},
               {"obstruction", io::to_json(lagrangian_obstruction(hg, a))},
               {"pullback_real_plane_zero", first},
               {"pullback_graph_plane_zero", second}};
        return {r, Ok};
    } catch (const NoWitnessError &e) {
        json r{{"A", io::to_json(a)}, {"error", e.what()}, {"certificate", io::to_json(e.certificate)}};
        if (auto fv = forced_vanishing(a)) {
            r["forced_vanishing"] = io::to_json(*fv);
        }
        return {r, NegativeVerdict};
    }
}

inline Outcome jordan_cmd(const QMatrix &a)
{
    json r{{"A", io::to_json(a)},
           {"charpoly", io::to_json(charpoly(a))},
           {"minimal_polynomial", io::to_json(minimal_polynomial(a))}};
    try {
        const auto jd = real_jordan(a);
        json blocks = json::array();
        for (const auto &b : jd.blocks) {
            blocks.push_back(io::jordan_block_json(b));
        }
        r["mode"] = "exact";
        r["P"] = io::to_json(jd.P);
        r["J"] = io::to_json(jd.J());
        r["blocks"] = std::move(blocks);
    } catch (const JordanStructureError &) {
        // Irrational spectrum: the real Jordan form is only available in floating point.
        const auto jd = real_jordan(to_double(a));
        json blocks = json::array();
        for (const auto &b : jd.blocks) {
            blocks.push_back(io::jordan_block_json(b));
        }
        r["mode"] = "float";
        r["P"] = io::to_json(jd.P);
        r["J"] = io::to_json(jd.J());
        r["blocks"] = std::move(blocks);
    }
    return {r, Ok};
}

inline Outcome reduce_cmd(const QMatrix &f1, const QMatrix &f2)
{
    try {
        const auto red = reduce_to_standard(f1, f2);
        const auto rep = classify(red.A);
        return {json{{"A", io::to_json(red.A)}, {"G", io::to_json(red.G)}, {"class", to_string(rep.cls)}}, Ok};
    } catch (const TotallyRealViolation &e) {
        return {json{{"error", e.what()}, {"violation", "totally_real"}}, NegativeVerdict};
    } catch (const TransversalityViolation &e) {
        return {json{{"error", e.what()}, {"violation", "transversality"}}, NegativeVerdict};
    }
}

inline Outcome local_potential_cmd(const BranchData &br, const Options &opt)
{
    const auto lp = assemble_f(br);
    const auto v = verify_local(lp, br, Rational(1, 8), opt.grid);
    return {io::to_json(lp, br, v), v.ok() ? Ok : NegativeVerdict};
}

inline void apply_radii(GlobalScene &s, const Options &opt)
{
    if (opt.eps) {
        s.eps = parse_rational(*opt.eps);
        if (!opt.delta) {
            s.delta = s.eps / 2;
        }
    }
    if (opt.delta) {
        s.delta = parse_rational(*opt.delta);
    }
    s.validate();
}

inline Outcome glue_cmd(io::LoadedScene ls, const json &raw, const Options &opt)
{
    apply_radii(ls.scene, opt);
    json out = raw;
    out["delta"] = to_string(ls.scene.delta);
    out["eps"] = to_string(ls.scene.eps);
    try {
        const auto cal = calibrate_C(ls.scene, opt.grid, opt.tol);
        out["C"] = to_string(cal.C);
        out["calibration"] = {{"exponent", cal.exponent}, {"samples", cal.samples}, {"grid", opt.grid}};
        return {out, Ok};
    } catch (const CalibrationFailure &e) {
        out.erase("C");
        out["calibration"] = {{"error", e.what()}, {"grid", opt.grid}};
        return {out, NegativeVerdict};
    }
}

inline Outcome certify_cmd(io::LoadedScene ls, const Options &opt)
{
    apply_radii(ls.scene, opt);
    json extra;
    if (!ls.has_C) {
        try {
            const auto cal = calibrate_C(ls.scene, opt.grid, opt.tol);
            ls.scene.C = cal.C;
            extra = {{"exponent", cal.exponent}, {"samples", cal.samples}};
        } catch (const CalibrationFailure &e) {
            return {json{{"error", e.what()}}, NegativeVerdict};
        }
    }
    const GluedForm g(ls.scene);
    const auto rep = certify(g, ls.branches, opt.grid, opt.tol);
    json r = io::to_json(rep);
    r["C"] = to_string(ls.scene.C);
    r["grid"] = opt.grid;
    if (!extra.is_null()) {
        r["calibration"] = extra;
    }
    return {r, rep.ok() ? Ok : NegativeVerdict};
}

// ---------------------------------------------------------------------------
// Demo suite

inline void write_file(const std::filesystem::path &p, const json &j)
{
    std::ofstream out(p);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << io::dump(j);
}

inline QMatrix mat2(int a, int b, int c, int d)
{
    QMatrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

/// Writes the worked examples and their reports into dir; returns a summary.
inline json demo_suite(const std::filesystem::path &dir, const Options &opt)
{
    std::filesystem::create_directories(dir);
    json summary = json::object();
    const std::vector<std::pair<std::string, QMatrix>> matrices{
        {"diag12", QMatrix::diagonal({Rational(1), Rational(2)})},
        {"jordan01", mat2(0, 1, 0, 0)},
        {"rotation", mat2(0, -1, 1, 0)},
        {"pm2i", mat2(0, -2, 2, 0)},
    };
    for (const auto &[name, a] : matrices) {
        write_file(dir / (name + ".json"), io::to_json(a));
        const auto c = classify_cmd(a);
        write_file(dir / (name + ".classify.json"), c.report);
        const auto w = witness_cmd(a);
        write_file(dir / (name + ".witness.json"), w.report);
        summary[name] = {{"class", c.report["class"]}, {"classify_exit", c.code}, {"witness_exit", w.code}};
    }

    const BranchData flat = BranchData::flat({Rational(1), Rational(2)}, opt.order);
    write_file(dir / "flat.json", io::to_json(flat));
    const auto lf = local_potential_cmd(flat, opt);
    write_file(dir / "flat.potential.json", lf.report);
    summary["flat"] = {{"exit", lf.code}, {"ok", lf.report["verification"]["ok"]}};

    Sampler rng(opt.seed);
    const BranchData curved = rng.branch(2, opt.order);
    write_file(dir / "curved.json", io::to_json(curved));
    const auto lc = local_potential_cmd(curved, opt);
    write_file(dir / "curved.potential.json", lc.report);
    summary["curved"] = {{"exit", lc.code}, {"ok", lc.report["verification"]["ok"]}};

    // Flat glue scene: one double point at the origin, phi = |y|^2.
    const std::size_t n = 2;
    const auto xy = complex_coordinate_names(n);
    Poly phi(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        phi += Poly::variable(2 * n, n + j) * Poly::variable(2 * n, n + j);
    }
    json scene{{"n", n},
               {"phi", io::to_json(phi, xy)},
               {"eps", "1"},
               {"delta", "1/2"},
               {"box", {"-2", "2"}},
               {"points",
                {{{"center", {"0", "0", "0", "0"}},
                  {"potential", "flat.potential.json"},
                  {"A", io::to_json(flat.A())}}}}};
    write_file(dir / "flat_scene.json", scene);
    const auto glued = glue_cmd(io::scene_from_json(scene, dir), scene, opt);
    write_file(dir / "flat_scene.glued.json", glued.report);
    summary["glue"] = {{"exit", glued.code}, {"C", glued.report.value("C", json())}};
    if (glued.code == Ok) {
        const auto cert = certify_cmd(io::scene_from_json(glued.report, dir), opt);
        write_file(dir / "flat_scene.certify.json", cert.report);
        summary["certify"] = {{"exit", cert.code}, {"ok", cert.report["ok"]}};
    }
    write_file(dir / "summary.json", summary);
    return summary;
}

} // namespace lagimm::cli
