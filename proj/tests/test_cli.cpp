#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

const fs::path &workdir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "lagimm_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string &args)
{
    const std::string cmd = std::string("\"") + LAGIMM_CLI + "\" " + args + " > /dev/null 2> \""
                            + (workdir() / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path &p) { return json::parse(slurp(p)); }

std::string q(const fs::path &p) { return "\"" + p.string() + "\""; }

class CliTest : public ::testing::Test
{
protected:
    static void SetUpTestSuite() { ASSERT_EQ(run("demo --dir " + q(workdir() / "demo")), 0); }
    static fs::path demo(const std::string &name) { return workdir() / "demo" / name; }
};

} // namespace

TEST_F(CliTest, DemoSummary)
{
    const json s = load(demo("summary.json"));
    EXPECT_EQ(s["diag12"]["class"], "LAGRANGIAN_AND_RC");
    EXPECT_EQ(s["jordan01"]["class"], "RC_NOT_LAGRANGIAN");
    EXPECT_EQ(s["rotation"]["class"], "RC_NOT_LAGRANGIAN");
    EXPECT_EQ(s["pm2i"]["class"], "NOT_LOCALLY_RC");
    EXPECT_EQ(s["flat"]["ok"], true);
    EXPECT_EQ(s["curved"]["ok"], true);
    EXPECT_EQ(s["certify"]["ok"], true);
}

TEST_F(CliTest, ClassifyExitCodes)
{
    const fs::path out = workdir() / "classify.json";
    EXPECT_EQ(run("classify -A " + q(demo("diag12.json")) + " --out " + q(out)), 0);
    EXPECT_EQ(load(out)["witness"]["entries"], json::parse(R"([["1","0"],["0","1"]])"));
    EXPECT_EQ(run("classify -A " + q(demo("jordan01.json")) + " --out " + q(out)), 2);
    EXPECT_EQ(load(out)["class"], "RC_NOT_LAGRANGIAN");
    EXPECT_EQ(load(out)["forced_vanishing"]["relation"], "h11 = 0");
    EXPECT_EQ(run("classify -A " + q(demo("pm2i.json")) + " --out " + q(out)), 2);
    EXPECT_EQ(load(out)["class"], "NOT_LOCALLY_RC");
}

TEST_F(CliTest, WitnessAndJordan)
{
    const fs::path out = workdir() / "witness.json";
    EXPECT_EQ(run("witness -A " + q(demo("diag12.json")) + " --out " + q(out)), 0);
    const json w = load(out);
    EXPECT_EQ(w["H"]["entries"], json::parse(R"([["1","0"],["0","1"]])"));
    EXPECT_EQ(w["pullback_graph_plane_zero"], true);
    EXPECT_EQ(run("witness -A " + q(demo("rotation.json")) + " --out " + q(out)), 2);
    EXPECT_EQ(run("jordan -A " + q(demo("jordan01.json")) + " --out " + q(out)), 0);
    EXPECT_EQ(load(out)["blocks"][0]["size"], 2);
}

TEST_F(CliTest, LocalPotentialFlat)
{
    const fs::path out = workdir() / "lp.json";
    EXPECT_EQ(run("local-potential -b " + q(demo("flat.json")) + " --order 4 --out " + q(out)), 0);
    const json lp = load(out);
    EXPECT_EQ(lp["rtilde"]["terms"].size(), 0u);
    EXPECT_EQ(lp["f"]["terms"].size(), 4u);
    EXPECT_EQ(lp["verification"]["ok"], true);
}

TEST_F(CliTest, GlueThenCertifyRoundTrip)
{
    const fs::path glued = workdir() / "demo" / "again.glued.json";
    EXPECT_EQ(run("glue -s " + q(demo("flat_scene.json")) + " --grid 7 --out " + q(glued)), 0);
    const fs::path cert = workdir() / "cert.json";
    EXPECT_EQ(run("certify -s " + q(glued) + " --grid 7 --out " + q(cert)), 0);
    const json c = load(cert);
    EXPECT_EQ(c["positive_everywhere"], true);
    for (const auto &b : c["branches"]) {
        EXPECT_EQ(b["exact_zero"], true);
    }
}

TEST_F(CliTest, OutputIsDeterministic)
{
    const fs::path a = workdir() / "det_a.json", b = workdir() / "det_b.json";
    ASSERT_EQ(run("local-potential -b " + q(demo("curved.json")) + " --grid 3 --out " + q(a)), 0);
    ASSERT_EQ(run("local-potential -b " + q(demo("curved.json")) + " --grid 3 --out " + q(b)), 0);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, BadInputExitsWithOne)
{
    const fs::path bad = workdir() / "bad.json";
    std::ofstream(bad) << R"({"n": 2, "entries": [["1", "0"], ["1/0", "1"]]})";
    EXPECT_EQ(run("classify -A " + q(bad)), 1);
    EXPECT_NE(slurp(workdir() / "stderr.txt").find("/entries/1/0"), std::string::npos);
    EXPECT_EQ(run("classify"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
}
