#include "jetvar/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using jetvar::cli::main_entry;

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

std::string problem(const std::string& name) { return std::string(JETVAR_PROBLEMS_DIR) + "/" + name; }

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "jetvar");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

} // namespace

TEST(Cli, EulerLagrangeOscillator)
{
    auto r = run({"el", problem("oscillator.jv")});
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "e_1 = -y - y_tt\n");
    EXPECT_TRUE(r.err.empty());
}

TEST(Cli, LatexOutput)
{
    auto r = run({"el", problem("oscillator.jv"), "--format", "latex"});
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "e_{1} = -y - y_{tt}\n");
}

TEST(Cli, HelmholtzVerdicts)
{
    auto bad = run({"helmholtz", problem("source_yt.jv"), "--source", "e"});
    EXPECT_EQ(bad.status, 0);
    EXPECT_NE(bad.out.find("H[t](y,y) = 2"), std::string::npos);
    EXPECT_NE(bad.out.find("verdict: not locally variational"), std::string::npos);
    auto good = run({"helmholtz", problem("source_yt.jv"), "--source", "f"});
    EXPECT_EQ(good.status, 0);
    EXPECT_NE(good.out.find("H = 0"), std::string::npos);
    EXPECT_NE(good.out.find("verdict: locally variational"), std::string::npos);
    auto el = run({"helmholtz", problem("oscillator.jv")});
    EXPECT_NE(el.out.find("verdict: locally variational"), std::string::npos);
}

TEST(Cli, StructuredIsDeterministic)
{
    auto a = run({"jacobi", problem("geodesic.jv"), "--format", "structured"});
    auto b = run({"jacobi", problem("geodesic.jv"), "--format", "structured"});
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j.at("command"), "jacobi");
    EXPECT_EQ(j.at("self_adjoint"), true);
    EXPECT_EQ(j.at("vertical_differential").at("kind"), "bilinear");
}

TEST(Cli, JacobiOnShellReport)
{
    auto r = run({"jacobi", problem("oscillator.jv")});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("self-adjoint: yes"), std::string::npos);
    EXPECT_NE(r.out.find("agree on shell: yes"), std::string::npos);
}

TEST(Cli, HessianAndVariation)
{
    auto h = run({"hessian", problem("oscillator.jv"), "--fields", "xi,eta"});
    EXPECT_EQ(h.status, 0);
    EXPECT_NE(h.out.find("hessian = -t"), std::string::npos);
    EXPECT_NE(h.out.find("S1 = 0"), std::string::npos);
    auto v = run({"variation", problem("oscillator.jv"), "--fields", "xi"});
    EXPECT_EQ(v.status, 0);
    EXPECT_EQ(v.out, "variation = -y - y_tt\n");
    auto one = run({"hessian", problem("oscillator.jv"), "--fields", "xi"});
    EXPECT_EQ(one.status, 2);
}

TEST(Cli, CheckCritical)
{
    auto ok = run({"check-critical", problem("oscillator.jv"), "--section", "s", "--fields", "xi,eta"});
    EXPECT_EQ(ok.status, 0) << ok.err;
    EXPECT_NE(ok.out.find("critical: Euler-Lagrange residual"), std::string::npos);
    auto bad = run({"check-critical", problem("oscillator.jv"), "--section", "line"});
    EXPECT_EQ(bad.status, 3);
    EXPECT_NE(bad.out.find("not critical"), std::string::npos);
    auto j = nlohmann::json::parse(
        run({"check-critical", problem("oscillator.jv"), "--section", "line", "--format", "structured"}).out);
    EXPECT_GT(j.at("critical").at("residual").get<double>(), 1.0);
    EXPECT_EQ(j.at("critical").at("critical"), false);
}

TEST(Cli, SecondVariation)
{
    auto ok = run({"second-var", problem("oscillator.jv"), "--section", "s", "--fields", "xi,eta"});
    EXPECT_EQ(ok.status, 0) << ok.out << ok.err;
    auto bad = run({"second-var", problem("oscillator.jv"), "--section", "line", "--fields", "xi,eta"});
    EXPECT_EQ(bad.status, 3);
    EXPECT_NE(bad.out.find("requires a critical section"), std::string::npos);
}

TEST(Cli, NumericOverrides)
{
    auto r = run({"second-var", problem("oscillator.jv"), "--section", "s", "--fields", "xi,eta", "--nodes", "48",
                  "--step", "1e-3", "--tol", "1e-5", "--format", "structured"});
    EXPECT_EQ(r.status, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("second_variation").at("matches_jacobi"), true);
    EXPECT_EQ(run({"second-var", problem("oscillator.jv"), "--section", "s", "--fields", "xi,eta", "--nodes", "0"})
                  .status,
              2);
}

TEST(Cli, Adjoint)
{
    auto r = run({"adjoint", problem("operators.jv"), "--bilinear", "D"});
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "D*[t](y,y) = -1\n");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run({}).status, 1);
    EXPECT_EQ(run({"frobnicate", problem("oscillator.jv")}).status, 1);
    EXPECT_EQ(run({"el", problem("missing.jv")}).status, 1);
    EXPECT_EQ(run({"el", problem("oscillator.jv"), "--format", "xml"}).status, 1);
    EXPECT_EQ(run({"el", problem("oscillator.jv"), "--lagrangian", "nope"}).status, 2);
    EXPECT_EQ(run({"check-critical", problem("source_yt.jv")}).status, 2);
}

TEST(Cli, ParseErrorsReportPositions)
{
    auto dir = fs::temp_directory_path() / "jetvar-cli-test";
    fs::create_directories(dir);
    auto path = dir / "broken.jv";
    std::ofstream(path) << "context\n  base t\n  fields y\nlagrangian L = y_t^2 +\n";
    auto r = run({"el", path.string()});
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("broken.jv:4:"), std::string::npos) << r.err;
    fs::remove_all(dir);
}

TEST(Cli, OutputFileOnlyWhenRequested)
{
    auto dir = fs::temp_directory_path() / "jetvar-cli-output";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto path = dir / "report.json";
    auto r = run({"el", problem("oscillator.jv"), "--format", "structured", "--output", path.string()});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("command"), "el");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
    fs::remove_all(dir);
}
