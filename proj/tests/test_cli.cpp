#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(NCRADAR_EXE) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("ncr_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, HelpAndVersion) {
    EXPECT_EQ(run("--help").code, 0);
    const auto v = run("--version");
    EXPECT_EQ(v.code, 0);
}

TEST(Cli, UnknownOptionIsInputError) {
    EXPECT_EQ(run("roc --no-such-flag").code, 2);
    EXPECT_EQ(run("roc --rho 1.5").code, 2);
    EXPECT_EQ(run("pdf --family bogus").code, 2);
}

TEST(Cli, MissingFileIsIoError) {
    const auto r = run("estimate /nonexistent/dir/none.csv");
    EXPECT_EQ(r.code, 4);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("exit_code"), 4);
}

TEST(Cli, ZeroSignalPowerReported) {
    const auto f = scratch("zeros.csv");
    {
        std::ofstream o(f);
        o << "i1,q1,i2,q2\n";
        for (int k = 0; k < 10; ++k) o << "0,0," << k + 1 << ",1\n";
    }
    const auto r = run("estimate " + f.string());
    EXPECT_EQ(r.code, 3);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("error"), "zero-signal-power");
    EXPECT_EQ(j.at("exit_code"), 3);
}

TEST(Cli, MalformedFileIsInputError) {
    const auto f = scratch("bad.csv");
    {
        std::ofstream o(f);
        o << "i1,q1,i2,q2\n1,2,x,4\n";
    }
    EXPECT_EQ(run("estimate " + f.string()).code, 2);
}

TEST(Cli, SimulateThenEstimateRoundTrip) {
    for (const std::string fmt : {"csv", "binary"}) {
        const auto f = scratch("batch." + fmt);
        const auto s = run("simulate --iq --format " + fmt +
                           " --sigma1 2 --sigma2 0.5 --rho 0.6 --phi 1.0 --n 200000 --seed 3 --out " +
                           f.string());
        ASSERT_EQ(s.code, 0) << s.out;
        const auto e = run("estimate " + f.string());
        ASSERT_EQ(e.code, 0) << e.out;
        const auto j = nlohmann::json::parse(e.out);
        EXPECT_EQ(j.at("n"), 200000);
        EXPECT_NEAR(j.at("sigma1_hat").get<double>(), 2.0, 0.02);
        EXPECT_NEAR(j.at("sigma2_hat").get<double>(), 0.5, 0.005);
        EXPECT_NEAR(j.at("rho_hat").get<double>(), 0.6, 0.01);
        EXPECT_NEAR(j.at("phi_hat").get<double>(), 1.0, 0.01);
    }
}

TEST(Cli, SimulateTrialsDeterministic) {
    const auto a = scratch("t1.csv");
    const auto b = scratch("t2.csv");
    ASSERT_EQ(run("simulate --rho 0.3 --n 20 --trials 50 --seed 9 --out " + a.string()).code, 0);
    ASSERT_EQ(run("simulate --rho 0.3 --n 20 --trials 50 --seed 9 --threads 2 --out " + b.string()).code,
              0);
    const auto ta = slurp(a);
    EXPECT_EQ(ta, slurp(b));
    EXPECT_EQ(ta.rfind("# ncradar", 0), 0u);
    EXPECT_NE(ta.find("\ntrial,sigma1_hat,"), std::string::npos);
    EXPECT_NE(ta.find(" rho=0.3 "), std::string::npos);
}

TEST(Cli, RocCsvHasStatusColumn) {
    const auto r = run("roc --detector rho --method exact --rho 0.4 --n 10 --pfa-grid 0.01,0.1");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("status"), std::string::npos);
    EXPECT_NE(r.out.find(",ok"), std::string::npos);
}

TEST(Cli, TotalFailureIsEvaluationError) {
    EXPECT_EQ(run("roc --detector rho --method exact --rho 0.9999 --n 100000 --pfa-grid 0.1").code, 5);
}

TEST(Cli, FiguresWritesFiles) {
    const auto d = scratch("figs");
    const auto r = run("figures fig2 --out " + d.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(d / "fig2_manifest.json"));
}
