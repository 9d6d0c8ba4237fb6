#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dyadlab/cli.hpp"

namespace fs = std::filesystem;
using dyadlab::cli::run;

namespace {

struct Out {
    int code;
    std::string out;
    std::string err;
};

Out call(const std::vector<std::string>& args)
{
    std::ostringstream o;
    std::ostringstream e;
    int code = run(args, o, e);
    return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("dyadlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

} // namespace

TEST_F(CliTest, UsageErrors)
{
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"bogus"}).code, 2);
    EXPECT_EQ(call({"construct", "nothing"}).code, 2);
    EXPECT_EQ(call({"construct", "universal", "--limit", "1,4"}).code, 2);
    EXPECT_EQ(call({"construct", "universal", "--limit", "x"}).code, 2);
    EXPECT_EQ(call({"verify", "universal", "--suite", "nope", "--limit", "1,1"}).code, 2);
    EXPECT_EQ(call({"verify", "universal"}).code, 2);
    EXPECT_EQ(call({"verify", "universal", "--suite", "gaps", "--seq", path("missing.json")}).code, 2);
}

TEST_F(CliTest, ConstructSummary)
{
    auto r = call({"construct", "universal", "--limit", "1,1", "--out", path("u.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("blocks=2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("points=8309"), std::string::npos) << r.out;
    auto doc = dyadlab::io::Json::parse(slurp(path("u.json")));
    EXPECT_EQ(doc.at("origin"), "15*2^0");

    auto t = call({"construct", "thm33", "--jmax", "1"});
    ASSERT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("points=64"), std::string::npos) << t.out;

    auto d = call({"construct", "thm31", "--jmax", "12", "--out", path("d.json")});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_FALSE(dyadlab::io::Json::parse(slurp(path("d.json"))).at("JG").empty());
}

TEST_F(CliTest, UniversalSuitesPass)
{
    for (std::string suite : {"lemma", "gaps", "integrality", "covering", "escape", "series", "smooth"}) {
        auto r = call({"verify", "universal", "--suite", suite, "--limit", "2,0", "--samples", "20", "--seed", "3"});
        EXPECT_EQ(r.code, 0) << suite << ": " << r.out << r.err;
    }
}

TEST_F(CliTest, Thm31AndThm33SuitesPass)
{
    for (std::string suite : {"lower", "outside", "cross", "density", "tail"}) {
        auto r = call({"verify", "thm31", "--suite", suite, "--jmax", "12", "--samples", "3"});
        EXPECT_EQ(r.code, 0) << suite << ": " << r.out << r.err;
    }
    for (std::string suite : {"gaps", "diverge", "converge", "probe"}) {
        auto r = call({"verify", "thm33", "--suite", suite, "--jmax", "4", "--samples", "10"});
        EXPECT_EQ(r.code, 0) << suite << ": " << r.out << r.err;
    }
}

TEST_F(CliTest, TamperedSequenceFails)
{
    ASSERT_EQ(call({"construct", "universal", "--limit", "1,2", "--out", path("u.json")}).code, 0);
    auto doc = dyadlab::io::Json::parse(slurp(path("u.json")));
    doc["blocks"][1]["gap"] = "1*2^-2";
    std::ofstream(path("bad.json")) << doc.dump();
    auto g = call({"verify", "universal", "--suite", "gaps", "--seq", path("bad.json"), "--report", path("r.json")});
    EXPECT_EQ(g.code, 1) << g.out;
    auto reports = dyadlab::io::Json::parse(slurp(path("r.json")));
    bool saw = false;
    for (const auto& r : reports)
        if (r.at("claim") == "lattice.monotone_gaps")
            saw = !r.at("pass").get<bool>();
    EXPECT_TRUE(saw);
    doc = dyadlab::io::Json::parse(slurp(path("u.json")));
    doc["blocks"][0]["gap"] = "61441*2^-24";
    std::ofstream(path("bad2.json")) << doc.dump();
    EXPECT_EQ(call({"verify", "universal", "--suite", "integrality", "--seq", path("bad2.json")}).code, 1);
}

TEST_F(CliTest, DeterministicReports)
{
    std::vector<std::string> base{"verify", "universal", "--suite", "covering", "--limit", "2,0", "--samples", "25",
                                  "--seed", "11", "--report"};
    auto a = base;
    a.push_back(path("a.json"));
    auto b = base;
    b.push_back(path("b.json"));
    ASSERT_EQ(call(a).code, 0);
    ASSERT_EQ(call(b).code, 0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    EXPECT_FALSE(slurp(path("a.json")).empty());
}

TEST_F(CliTest, RoundTripMatchesInProcess)
{
    ASSERT_EQ(call({"construct", "universal", "--limit", "2,0", "--out", path("u.json")}).code, 0);
    for (std::string suite : {"gaps", "integrality", "covering", "escape"}) {
        auto from_file = call({"verify", "universal", "--suite", suite, "--seq", path("u.json"), "--samples", "10",
                               "--report", path("f.json")});
        auto direct = call({"verify", "universal", "--suite", suite, "--limit", "2,0", "--samples", "10", "--report",
                            path("d.json")});
        ASSERT_EQ(from_file.code, 0) << suite;
        ASSERT_EQ(direct.code, 0) << suite;
        EXPECT_EQ(slurp(path("f.json")), slurp(path("d.json"))) << suite;
    }
}

TEST_F(CliTest, GuardSkipExitCode)
{
    auto r = call({"construct", "universal", "--limit", "3,0", "--guard-bits", "64"});
    EXPECT_EQ(r.code, 3) << r.out << r.err;
}

TEST_F(CliTest, EvalCsv)
{
    auto r = call({"eval", "universal", "--x", "3/4", "--limits", "1,0", "1,1", "1,2", "1,3"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "x,limit,sum_dyadic,sum_decimal,error");
    std::vector<std::string> rows;
    while (std::getline(lines, line))
        rows.push_back(line);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].rfind("3*2^-2,1:0,", 0), 0u) << rows[0];
    long prev = -1;
    for (const auto& row : rows) {
        std::vector<std::string> cols;
        std::stringstream ss(row);
        std::string c;
        while (std::getline(ss, c, ','))
            cols.push_back(c);
        ASSERT_GE(cols.size(), 4u) << row;
        long v = std::stol(cols[3]);
        EXPECT_GE(v, prev) << row;
        prev = v;
    }
    EXPECT_GE(prev, 1);

    auto t = call({"eval", "thm33", "--x", "0", "1", "--limits", "1", "2"});
    ASSERT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("0*2^0,1,3*2^-5,0.09375,"), std::string::npos) << t.out;

    auto bad = call({"eval", "thm33", "--x", "1/3", "--limits", "1"});
    EXPECT_EQ(bad.code, 2);
}

#ifdef DYADLAB_CLI_PATH
TEST(CliBinary, ExitCodesFromProcess)
{
    std::string exe = DYADLAB_CLI_PATH;
    EXPECT_EQ(std::system((exe + " verify universal --suite lemma --limit 2,0 > /dev/null").c_str()), 0);
    int usage = std::system((exe + " construct universal --limit 1,9 > /dev/null 2>&1").c_str());
    EXPECT_EQ(WEXITSTATUS(usage), 2);
}
#endif
