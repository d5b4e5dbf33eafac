#include "ncr/errors.hpp"
#include "ncr/figures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace ncr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("ncr_fig_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Grids, LinearAndLog) {
    const auto l = linear_grid(0.0, 1.0, 5);
    ASSERT_EQ(l.size(), 5u);
    EXPECT_DOUBLE_EQ(l[2], 0.5);
    EXPECT_DOUBLE_EQ(l.back(), 1.0);
    const auto g = log_grid(1.0, 100.0, 3);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_NEAR(g[1], 10.0, 1e-12);
}

TEST(Grids, Parse) {
    EXPECT_EQ(parse_grid("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(parse_grid("0.1,0.2,0.5"), (std::vector<double>{0.1, 0.2, 0.5}));
    const auto g = parse_grid("log:1:1000:4");
    ASSERT_EQ(g.size(), 4u);
    EXPECT_NEAR(g[2], 100.0, 1e-9);
    EXPECT_THROW(parse_grid("1:0"), DomainError);
    EXPECT_THROW(parse_grid("a,b"), DomainError);
    EXPECT_THROW(parse_grid(""), DomainError);
}

TEST(CurveTableTest, FailuresBecomeNanRows) {
    CurveTable t;
    t.name = "x";
    t.columns = {"x", "y"};
    t.add_point(1.0, [](double x) { return 2.0 * x; });
    t.add_point(2.0, [](double) -> double { throw SeriesDivergedError("boom, twice"); });
    EXPECT_EQ(t.failed_rows(), 1u);
    EXPECT_EQ(t.overall_status(), "partial");
    std::ostringstream os;
    write_curve_csv(os, t);
    const std::string s = os.str();
    EXPECT_NE(s.find("x,y,status"), std::string::npos);
    EXPECT_NE(s.find("1,2,ok"), std::string::npos);
    EXPECT_NE(s.find("2,nan,failed:"), std::string::npos);
    EXPECT_EQ(s.find("boom,"), std::string::npos);
}

TEST(Figures, IdsAndExpansion) {
    EXPECT_EQ(figure_ids().size(), 16u);
    EXPECT_EQ(expand_figure_id("fig3"), (std::vector<std::string>{"fig3a", "fig3b"}));
    EXPECT_EQ(expand_figure_id("all").size(), 16u);
    EXPECT_THROW(expand_figure_id("fig99"), DomainError);
}

TEST(Figures, PdfFigureWritesCsvAndManifest) {
    const auto dir = scratch_dir("fig1");
    const auto rep = write_figure("fig1", dir);
    EXPECT_EQ(rep.failed_points, 0u);
    EXPECT_EQ(rep.files.size(), 3u);
    for (const auto& f : rep.files) {
        std::ifstream in(f);
        std::string first, header;
        std::getline(in, first);
        std::getline(in, header);
        EXPECT_EQ(first.rfind("# ncradar", 0), 0u);
        EXPECT_EQ(header.substr(header.size() - 6), "status");
    }
    std::ifstream m(rep.manifest);
    const auto j = nlohmann::json::parse(m);
    EXPECT_EQ(j.at("figure"), "fig1");
    EXPECT_EQ(j.at("curves").size(), 3u);
    fs::remove_all(dir);
}

TEST(Figures, EveryFigureBuildsWithoutFailures) {
    for (const auto& id : figure_ids()) {
        const auto curves = build_figure(id);
        EXPECT_FALSE(curves.empty()) << id;
        for (const auto& c : curves) {
            EXPECT_EQ(c.failed_rows(), 0u) << id << " " << c.name;
            EXPECT_FALSE(c.rows.empty()) << id << " " << c.name;
        }
    }
}
