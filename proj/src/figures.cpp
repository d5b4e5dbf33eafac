#include "ncr/figures.hpp"

#include "ncr/errors.hpp"
#include "ncr/iq_io.hpp"
#include "ncr/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

namespace ncr {
namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

double parse_double(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DomainError("bad number '" + std::string(s) + "' in grid");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Integer N values, log spaced and deduplicated.
std::vector<double> log_n_grid(double lo, double hi, int count) {
    std::set<int> ns;
    for (double v : log_grid(lo, hi, count)) ns.insert(static_cast<int>(std::lround(v)));
    return {ns.begin(), ns.end()};
}

// ---- per-figure builders ----

std::vector<CurveTable> fig1() {
    std::vector<CurveTable> out;
    const auto grid = linear_grid(0.5, 1.5, 401);
    for (int n : {25, 100, 250}) {
        CurveTable t = pdf_table(SigmaExact{1.0, n}, grid);
        t.name = "N" + std::to_string(n);
        t.params = {{"sigma", "1"}, {"n", std::to_string(n)}};
        out.push_back(std::move(t));
    }
    return out;
}

CurveTable rho_tvd_curve(double rho) {
    const auto ns = linear_grid(10, 250, 25);
    CurveTable t = tvd_table("n", ns, [rho](double n) {
        const int ni = static_cast<int>(n);
        return std::pair<DistributionSpec, DistributionSpec>{RhoExact{rho, ni},
                                                             rice_approx_for_rho(rho, ni)};
    });
    t.name = "rho" + short_num(rho);
    t.method = "exact-vs-rice";
    t.params = {{"rho", short_num(rho)}};
    return t;
}

std::vector<CurveTable> fig2() {
    std::vector<CurveTable> out;
    for (double rho : {0.3, 0.6, 0.9}) out.push_back(rho_tvd_curve(rho));
    return out;
}

std::vector<CurveTable> rho_pdf_panel(const std::vector<std::pair<double, int>>& cases,
                                      bool name_by_n) {
    std::vector<CurveTable> out;
    const auto grid = linear_grid(0.0, 1.0, 401);
    for (auto [rho, n] : cases) {
        const std::string tag =
            name_by_n ? "N" + std::to_string(n) : "rho" + short_num(rho);
        const std::vector<std::pair<std::string, std::string>> params{
            {"rho", short_num(rho)}, {"n", std::to_string(n)}};
        CurveTable exact = pdf_table(RhoExact{rho, n}, grid);
        exact.name = tag + "_exact";
        exact.params = params;
        CurveTable approx = pdf_table(rice_approx_for_rho(rho, n), grid);
        approx.name = tag + "_rice";
        approx.method = "approx";
        approx.params = params;
        out.push_back(std::move(exact));
        out.push_back(std::move(approx));
    }
    return out;
}

std::vector<CurveTable> fig4() {
    constexpr double rho = 0.05;
    std::set<int> ns;
    for (double s : log_grid(0.01, 100.0, 41))
        ns.insert(std::max(1, static_cast<int>(std::lround(s / (rho * rho)))));

    CurveTable fitted, sqrt_rule, linear_rule;
    for (CurveTable* t : {&fitted, &sqrt_rule, &linear_rule}) {
        t->kind = "kappa";
        t->columns = {"nrho2", "n", "kappa"};
        t->params = {{"rho", short_num(rho)}};
    }
    fitted.name = "fitted";
    fitted.method = "resultant-length";
    sqrt_rule.name = "sqrt-rule";
    sqrt_rule.method = "2*sqrt(N rho^2)";
    linear_rule.name = "linear-rule";
    linear_rule.method = "2*N*rho^2";
    for (int n : ns) {
        const double s = n * rho * rho;
        auto add = [&](CurveTable& t, const std::function<double()>& f) {
            try {
                t.rows.push_back({s, static_cast<double>(n), f()});
                t.status.emplace_back("ok");
            } catch (const std::exception& e) {
                t.rows.push_back({s, static_cast<double>(n), std::numeric_limits<double>::quiet_NaN()});
                t.status.push_back(std::string("failed:") + e.what());
            }
        };
        add(fitted, [&] { return fitted_kappa(rho, n); });
        add(sqrt_rule, [&] { return 2.0 * std::sqrt(s); });
        add(linear_rule, [&] { return 2.0 * s; });
    }
    return {fitted, sqrt_rule, linear_rule};
}

std::vector<CurveTable> fig5() {
    std::vector<CurveTable> out;
    const auto ns = log_n_grid(2, 2000, 40);
    for (double rho : {0.05, 0.1, 0.15, 0.2}) {
        CurveTable t = tvd_table("n", ns, [rho](double n) {
            const int ni = static_cast<int>(n);
            return std::pair<DistributionSpec, DistributionSpec>{
                PhiExact{rho, 0.0, ni}, von_mises_approx_for_phi(rho, 0.0, ni)};
        });
        t.name = "rho" + short_num(rho);
        t.method = "exact-vs-von-mises";
        t.params = {{"rho", short_num(rho)}, {"phi", "0"}};
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<CurveTable> phi_pdf_panel(const std::vector<std::pair<double, int>>& cases,
                                      bool name_by_n) {
    std::vector<CurveTable> out;
    const auto grid = linear_grid(-kPi, kPi, 361);
    for (auto [rho, n] : cases) {
        const std::string tag =
            name_by_n ? "N" + std::to_string(n) : "rho" + short_num(rho);
        const std::vector<std::pair<std::string, std::string>> params{
            {"rho", short_num(rho)}, {"phi", "0"}, {"n", std::to_string(n)}};
        CurveTable exact = pdf_table(PhiExact{rho, 0.0, n}, grid);
        exact.name = tag + "_exact";
        exact.params = params;
        CurveTable approx;
        if (rho == 0.0) {
            // kappa -> 0: the von Mises limit is the uniform density
            approx.kind = "pdf";
            approx.columns = {"x", "density"};
            for (double x : grid) approx.add_point(x, [](double) { return 0.5 / kPi; });
            approx.method = "uniform";
            approx.note = "rho = 0: von Mises with kappa = 0";
        } else {
            approx = pdf_table(von_mises_approx_for_phi(rho, 0.0, n), grid);
            approx.method = "approx";
        }
        approx.name = tag + "_vonmises";
        approx.params = params;
        out.push_back(std::move(exact));
        out.push_back(std::move(approx));
    }
    return out;
}

std::vector<CurveTable> fig8() {
    std::vector<CurveTable> out;
    const auto ns = log_n_grid(10, 1000, 25);
    for (double rho : {0.2, 0.4, 0.6}) {
        CurveTable t = tvd_table("n", ns, [rho](double n) {
            const int ni = static_cast<int>(n);
            return std::pair<DistributionSpec, DistributionSpec>{
                DdnExact{1.0, 1.0, rho, ni}, rice_approx_for_ddn(1.0, 1.0, rho, ni)};
        });
        t.name = "rho" + short_num(rho);
        t.method = "exact-vs-rice";
        t.params = {{"rho", short_num(rho)}, {"sigma1", "1"}, {"sigma2", "1"}};
        out.push_back(std::move(t));
    }
    return out;
}

// Densities in the normalized variable x_tilde: sigma1 sigma2 = 2 makes x
// and x_tilde coincide.
std::vector<CurveTable> ddn_pdf_panel(const std::vector<std::pair<double, int>>& cases,
                                      bool name_by_n) {
    double hi = 0.0;
    for (auto [rho, n] : cases)
        hi = std::max(hi, n * rho + 6.0 * std::sqrt(n / 2.0) / (1.0 - rho * rho) + 6.0);
    const auto grid = linear_grid(0.0, hi, 401);
    std::vector<CurveTable> out;
    for (auto [rho, n] : cases) {
        const std::string tag =
            name_by_n ? "N" + std::to_string(n) : "rho" + short_num(rho);
        const std::vector<std::pair<std::string, std::string>> params{
            {"rho", short_num(rho)}, {"n", std::to_string(n)}, {"variable", "x_tilde"}};
        CurveTable exact = pdf_table(DdnExact{2.0, 1.0, rho, n}, grid);
        exact.name = tag + "_exact";
        exact.params = params;
        CurveTable approx = pdf_table(rice_approx_for_ddn(2.0, 1.0, rho, n), grid);
        approx.name = tag + "_rice";
        approx.method = "approx";
        approx.params = params;
        out.push_back(std::move(exact));
        out.push_back(std::move(approx));
    }
    return out;
}

std::vector<CurveTable> roc_panel(Detector detector,
                                  const std::vector<std::pair<double, int>>& cases,
                                  bool name_by_n) {
    std::vector<CurveTable> out;
    const auto grid = default_pfa_grid();
    for (auto [rho, n] : cases) {
        RocParams p;
        p.rho = rho;
        p.n = n;
        const std::string tag =
            name_by_n ? "N" + std::to_string(n) : "rho" + short_num(rho);
        CurveTable exact = roc_table(build_roc_curve(detector, RocMethod::Exact, p, grid));
        exact.name = tag + "_exact";
        CurveTable approx = roc_table(build_roc_curve(detector, RocMethod::ClosedForm, p, grid));
        approx.name = tag + "_approx";
        out.push_back(std::move(exact));
        out.push_back(std::move(approx));
    }
    return out;
}

std::vector<CurveTable> fig11() {
    std::vector<CurveTable> out;
    const auto grid = default_pfa_grid();
    for (double rho : {0.2, 0.5, 0.8}) {
        RocParams p;
        p.rho = rho;
        p.n = 10;
        for (Detector d : {Detector::RhoHat, Detector::Ddn}) {
            CurveTable t = roc_table(build_roc_curve(d, RocMethod::Exact, p, grid));
            t.name = "rho" + short_num(rho) + "_" + std::string(to_string(d));
            out.push_back(std::move(t));
        }
    }
    return out;
}

const std::vector<std::pair<double, int>> kPanelA_rho{{0.0, 10}, {0.4, 10}, {0.8, 10}};
const std::vector<std::pair<double, int>> kPanelB_rho{{0.1, 25}, {0.1, 50}, {0.1, 75}, {0.1, 100}};
const std::vector<std::pair<double, int>> kRocA{{0.2, 10}, {0.4, 10}, {0.6, 10}, {0.8, 10}};
const std::vector<std::pair<double, int>> kRocB{{0.2, 10}, {0.2, 50}, {0.2, 100}, {0.2, 200}};

} // namespace

// ---------------------------------------------------------------- CurveTable

std::size_t CurveTable::failed_rows() const {
    return static_cast<std::size_t>(std::count_if(
        status.begin(), status.end(), [](const std::string& s) { return s != "ok"; }));
}

std::string CurveTable::overall_status() const {
    const std::size_t failed = failed_rows();
    if (failed == 0) return "ok";
    return failed == rows.size() ? "failed" : "partial";
}

std::string CurveTable::file_name() const {
    return (figure.empty() ? name : figure + "_" + name) + ".csv";
}

void CurveTable::add_point(double x, const std::function<double(double)>& f) {
    try {
        const double y = f(x);
        if (!std::isfinite(y)) throw QuadratureError("non-finite value");
        rows.push_back({x, y});
        status.emplace_back("ok");
    } catch (const std::exception& e) {
        rows.push_back({x, std::numeric_limits<double>::quiet_NaN()});
        status.push_back(std::string("failed:") + e.what());
    }
}

void write_curve_csv(std::ostream& out, const CurveTable& t) {
    out << "# ncradar " << kVersion;
    if (!t.figure.empty()) out << " figure=" << t.figure;
    if (!t.name.empty()) out << " curve=" << t.name;
    out << " kind=" << t.kind << " method=" << t.method;
    for (const auto& [k, v] : t.params) out << ' ' << k << '=' << v;
    out << '\n';
    for (const auto& c : t.columns) out << c << ',';
    out << "status\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (double v : t.rows[i]) out << (std::isnan(v) ? "nan" : num(v)) << ',';
        out << sanitize(t.status[i]) << '\n';
    }
}

std::vector<double> linear_grid(double lo, double hi, int count) {
    if (count < 1) throw DomainError("grid needs at least one point");
    if (count == 1) return {lo};
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
    g.back() = hi;
    return g;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi > 0.0)) throw DomainError("log grid bounds must be positive");
    auto g = linear_grid(std::log(lo), std::log(hi), count);
    for (double& v : g) v = std::exp(v);
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> parse_grid(std::string_view text) {
    if (text.empty()) throw DomainError("empty grid");
    const auto parts = split(text, ':');
    auto count_of = [](std::string_view s) {
        const double c = parse_double(s);
        if (c < 1 || c != std::floor(c) || c > 1e7) throw DomainError("bad grid point count");
        return static_cast<int>(c);
    };
    if (parts.size() == 4 && parts[0] == "log")
        return log_grid(parse_double(parts[1]), parse_double(parts[2]), count_of(parts[3]));
    if (parts.size() == 3)
        return linear_grid(parse_double(parts[0]), parse_double(parts[1]), count_of(parts[2]));
    if (parts.size() != 1) throw DomainError("grid must be lo:hi:count, log:lo:hi:count or a list");
    std::vector<double> out;
    for (auto p : split(text, ',')) out.push_back(parse_double(p));
    return out;
}

CurveTable pdf_table(const DistributionSpec& d, const std::vector<double>& grid) {
    validate(d);
    CurveTable t;
    t.kind = "pdf";
    t.method = "exact";
    t.columns = {"x", "density"};
    for (double x : grid) t.add_point(x, [&](double v) { return pdf(d, v); });
    return t;
}

CurveTable tvd_table(
    std::string sweep_name, const std::vector<double>& sweep,
    const std::function<std::pair<DistributionSpec, DistributionSpec>(double)>& make) {
    CurveTable t;
    t.kind = "tvd";
    t.columns = {std::move(sweep_name), "tvd"};
    for (double v : sweep)
        t.add_point(v, [&](double s) {
            const auto [f, g] = make(s);
            return total_variation_distance(f, g);
        });
    return t;
}

CurveTable roc_table(const RocCurve& curve) {
    CurveTable t;
    t.kind = "roc";
    t.method = std::string(to_string(curve.method));
    t.columns = {"pfa", "pd", "threshold"};
    t.params = {{"detector", std::string(to_string(curve.detector))},
                {"sigma1", short_num(curve.params.sigma1)},
                {"sigma2", short_num(curve.params.sigma2)},
                {"rho", short_num(curve.params.rho)},
                {"n", std::to_string(curve.params.n)}};
    if (curve.method == RocMethod::MonteCarlo) {
        t.params.emplace_back("phi", short_num(curve.params.phi));
        t.params.emplace_back("variant", std::string(to_string(curve.params.variant)));
        t.params.emplace_back("trials", std::to_string(curve.params.trials));
        t.params.emplace_back("seed", std::to_string(curve.params.seed));
    }
    for (const auto& p : curve.points) {
        t.rows.push_back({p.pfa, p.pd, p.threshold});
        t.status.push_back(p.status);
    }
    return t;
}

// ---------------------------------------------------------------- figures

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig1",  "fig2",  "fig3a", "fig3b",
                                              "fig4",  "fig5",  "fig6a", "fig6b",
                                              "fig7a", "fig7b", "fig8",  "fig9a",
                                              "fig9b", "fig10a", "fig10b", "fig11"};
    return ids;
}

std::vector<std::string> expand_figure_id(std::string_view id) {
    const auto& ids = figure_ids();
    if (id == "all") return ids;
    std::vector<std::string> out;
    for (const auto& f : ids)
        if (f == id || (f.size() == id.size() + 1 && f.compare(0, id.size(), id) == 0 &&
                        (f.back() == 'a' || f.back() == 'b')))
            out.push_back(f);
    if (out.empty()) throw DomainError("unknown figure id '" + std::string(id) + "'");
    return out;
}

std::vector<CurveTable> build_figure(std::string_view id) {
    std::vector<CurveTable> curves;
    if (id == "fig1") curves = fig1();
    else if (id == "fig2") curves = fig2();
    else if (id == "fig3a") curves = rho_pdf_panel(kPanelA_rho, false);
    else if (id == "fig3b") curves = rho_pdf_panel(kPanelB_rho, true);
    else if (id == "fig4") curves = fig4();
    else if (id == "fig5") curves = fig5();
    else if (id == "fig6a") curves = phi_pdf_panel({{0.0, 10}, {0.2, 10}, {0.4, 10}}, false);
    else if (id == "fig6b") curves = phi_pdf_panel({{0.1, 25}, {0.1, 50}, {0.1, 250}}, true);
    else if (id == "fig7a") curves = roc_panel(Detector::RhoHat, kRocA, false);
    else if (id == "fig7b") curves = roc_panel(Detector::RhoHat, kRocB, true);
    else if (id == "fig8") curves = fig8();
    else if (id == "fig9a") curves = ddn_pdf_panel({{0.0, 10}, {0.3, 10}, {0.6, 10}}, false);
    else if (id == "fig9b") curves = ddn_pdf_panel(kPanelB_rho, true);
    else if (id == "fig10a") curves = roc_panel(Detector::Ddn, kRocA, false);
    else if (id == "fig10b") curves = roc_panel(Detector::Ddn, kRocB, true);
    else if (id == "fig11") curves = fig11();
    else throw DomainError("unknown figure id '" + std::string(id) + "'");
    for (auto& c : curves) c.figure = std::string(id);
    return curves;
}

FigureReport write_figure(std::string_view id, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const auto curves = build_figure(id);
    FigureReport report;
    report.figure = std::string(id);
    nlohmann::ordered_json manifest;
    manifest["figure"] = id;
    manifest["version"] = kVersion;
    manifest["curves"] = nlohmann::ordered_json::array();
    for (const auto& c : curves) {
        const auto path = dir / c.file_name();
        write_file_atomically(path, [&](std::ostream& os) { write_curve_csv(os, c); });
        report.files.push_back(path);
        report.failed_points += c.failed_rows();
        if (c.overall_status() != "ok") ++report.failed_curves;

        nlohmann::ordered_json entry;
        entry["file"] = c.file_name();
        entry["curve"] = c.name;
        entry["kind"] = c.kind;
        entry["method"] = c.method;
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        for (const auto& [k, v] : c.params) params[k] = v;
        entry["params"] = params;
        entry["points"] = c.rows.size();
        entry["failed_points"] = c.failed_rows();
        entry["status"] = c.overall_status();
        if (!c.note.empty()) entry["note"] = c.note;
        if (c.failed_rows() > 0) {
            for (const auto& s : c.status)
                if (s != "ok") {
                    entry["first_failure"] = s;
                    break;
                }
        }
        manifest["curves"].push_back(entry);
    }
    report.manifest = dir / (std::string(id) + "_manifest.json");
    write_file_atomically(report.manifest,
                          [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
    return report;
}

} // namespace ncr
