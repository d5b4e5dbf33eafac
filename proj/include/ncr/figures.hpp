#pragma once

// Tabular curve data: density curves, TVD sweeps, ROC curves, and the
// parameter grids behind each published figure.

#include "ncr/detection.hpp"
#include "ncr/distributions.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ncr {

struct CurveTable {
    std::string figure;  // e.g. "fig3a"; empty for ad-hoc CLI output
    std::string name;    // e.g. "rho0.4_exact"
    std::string kind;    // pdf | tvd | roc | kappa
    std::string method;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::string> columns;  // numeric columns; "status" is appended on output
    std::vector<std::vector<double>> rows;
    std::vector<std::string> status;   // "ok" or "failed:<reason>", one per row
    std::string note;

    std::size_t failed_rows() const;
    // "ok", "partial" or "failed"
    std::string overall_status() const;
    std::string file_name() const;
    // Evaluates `f` and appends {x, f(x)}; failures become a NaN row.
    void add_point(double x, const std::function<double(double)>& f);
};

// Header comment line, column header, one row per point.
void write_curve_csv(std::ostream& out, const CurveTable& table);

std::vector<double> linear_grid(double lo, double hi, int count);
std::vector<double> log_grid(double lo, double hi, int count);
// "lo:hi:count", "log:lo:hi:count" or "a,b,c".
std::vector<double> parse_grid(std::string_view text);

CurveTable pdf_table(const DistributionSpec& d, const std::vector<double>& grid);
// TVD(exact, approx) at each sweep value; `make` returns the pair for a value.
CurveTable tvd_table(
    std::string sweep_name, const std::vector<double>& sweep,
    const std::function<std::pair<DistributionSpec, DistributionSpec>(double)>& make);
CurveTable roc_table(const RocCurve& curve);

// fig1, fig2, fig3a, fig3b, fig4, fig5, fig6a, fig6b, fig7a, fig7b, fig8,
// fig9a, fig9b, fig10a, fig10b, fig11
const std::vector<std::string>& figure_ids();
// "fig3" -> {fig3a, fig3b}; "all" -> every id.  Throws DomainError.
std::vector<std::string> expand_figure_id(std::string_view id);
std::vector<CurveTable> build_figure(std::string_view id);

struct FigureReport {
    std::string figure;
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
    std::size_t failed_curves = 0;
    std::size_t failed_points = 0;
};

// Writes <id>_<curve>.csv for every curve plus <id>_manifest.json.
FigureReport write_figure(std::string_view id, const std::filesystem::path& dir);

} // namespace ncr
