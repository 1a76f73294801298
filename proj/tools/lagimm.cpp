// Command-line front end. Every verb reads JSON, writes a JSON report to --out
// (or stdout) and exits 0 on success, 2 on a negative mathematical verdict and
// 1 on usage or input errors.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace
{

using namespace lagimm;
using namespace lagimm::cli;

int emit(const Outcome &o, const std::string &out)
{
    if (out.empty()) {
        std::cout << io::dump(o.report);
    } else {
        write_file(out, o.report);
    }
    return o.code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Lagrangian-compatibility checks for totally real plane pairs and immersed double points"};
    app.require_subcommand(1);

    Options opt;
    std::string out;
    auto common = [&](CLI::App *sub) {
        sub->add_option("--out,-o", out, "Report file (default: stdout)");
        sub->add_option("--tol", opt.tol, "Tolerance for floating-point checks")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "Random seed");
    };

    std::string a_path, f1_path, f2_path, b_path, s_path, demo_dir = "demo";

    auto *classify_sub = app.add_subcommand("classify", "Classify the pair (R^n, S(A))");
    classify_sub->add_option("-A,--matrix", a_path, "Matrix JSON")->required()->check(CLI::ExistingFile);
    common(classify_sub);

    auto *witness_sub = app.add_subcommand("witness", "Construct H > 0 with HA = A^T H");
    witness_sub->add_option("-A,--matrix", a_path, "Matrix JSON")->required()->check(CLI::ExistingFile);
    common(witness_sub);

    auto *jordan_sub = app.add_subcommand("jordan", "Real Jordan form of A");
    jordan_sub->add_option("-A,--matrix", a_path, "Matrix JSON")->required()->check(CLI::ExistingFile);
    common(jordan_sub);

    auto *reduce_sub = app.add_subcommand("reduce", "Reduce two plane frames (2n x n) to (R^n, S(A))");
    reduce_sub->add_option("--plane1", f1_path, "First frame JSON")->required()->check(CLI::ExistingFile);
    reduce_sub->add_option("--plane2", f2_path, "Second frame JSON")->required()->check(CLI::ExistingFile);
    common(reduce_sub);

    auto *lp_sub = app.add_subcommand("local-potential", "Build and verify the local potential of a double point");
    lp_sub->add_option("-b,--branches", b_path, "Branch data JSON")->required()->check(CLI::ExistingFile);
    auto *order_opt = lp_sub->add_option("--order", opt.order, "Jet order K")->check(CLI::Range(2, 12));
    lp_sub->add_option("--grid", opt.grid, "Sample points per axis")->check(CLI::Range(1, 101));
    common(lp_sub);

    auto *glue_sub = app.add_subcommand("glue", "Calibrate the constant C of a glued scene");
    auto *certify_sub = app.add_subcommand("certify", "Check positivity and branch pullbacks of a glued scene");
    for (auto *sub : {glue_sub, certify_sub}) {
        sub->add_option("-s,--scene", s_path, "Scene JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--grid", opt.grid, "Sample points per axis")->check(CLI::Range(1, 101));
        sub->add_option("--delta", opt.delta, "Plateau radius (default eps/2)");
        sub->add_option("--eps", opt.eps, "Cutoff radius");
        common(sub);
    }

    auto *demo_sub = app.add_subcommand("demo", "Write the worked examples and their reports");
    demo_sub->add_option("--dir", demo_dir, "Output directory");
    demo_sub->add_option("--order", opt.order, "Jet order K")->check(CLI::Range(2, 12));
    demo_sub->add_option("--grid", opt.grid, "Sample points per axis")->check(CLI::Range(1, 101));
    common(demo_sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : UsageError;
    }

    try {
        if (*classify_sub) {
            return emit(classify_cmd(load_matrix(a_path)), out);
        }
        if (*witness_sub) {
            return emit(witness_cmd(load_matrix(a_path)), out);
        }
        if (*jordan_sub) {
            return emit(jordan_cmd(load_matrix(a_path)), out);
        }
        if (*reduce_sub) {
            return emit(reduce_cmd(load_matrix(f1_path), load_matrix(f2_path)), out);
        }
        if (*lp_sub) {
            const auto raw = io::read_json_file(b_path);
            auto br = io::branch_from_json(raw, "", order_opt->count() > 0 ? std::optional<int>(opt.order)
                                                                           : std::nullopt);
            return emit(local_potential_cmd(br, opt), out);
        }
        if (*glue_sub || *certify_sub) {
            const auto raw = io::read_json_file(s_path);
            const auto base = std::filesystem::path(s_path).parent_path();
            auto scene = io::scene_from_json(raw, base);
            return emit(*glue_sub ? glue_cmd(std::move(scene), raw, opt) : certify_cmd(std::move(scene), opt), out);
        }
        if (*demo_sub) {
            const auto summary = demo_suite(demo_dir, opt);
            std::cout << io::dump(summary);
            return Ok;
        }
    } catch (const io::SchemaError &e) {
        std::cerr << "input error at " << e.what() << "\n";
        return UsageError;
    } catch (const SceneError &e) {
        std::cerr << "scene error: " << e.what() << "\n";
        return UsageError;
    } catch (const std::invalid_argument &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return UsageError;
    }
    return UsageError;
}
