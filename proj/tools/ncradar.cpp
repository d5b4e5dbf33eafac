// ncradar: estimation, distributions, ROC curves, simulation and figure data
// for noise-type radar covariance models.
//
// Exit codes: 0 ok, 2 bad input, 3 degenerate data, 4 I/O, 5 evaluation.

#include "ncr/detection.hpp"
#include "ncr/distributions.hpp"
#include "ncr/errors.hpp"
#include "ncr/estimators.hpp"
#include "ncr/figures.hpp"
#include "ncr/iq_io.hpp"
#include "ncr/simulator.hpp"
#include "ncr/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace ncr;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 2, kDegenerate = 3, kIo = 4, kEval = 5 };

struct EvaluationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelOptions {
    std::string variant = "qtms";
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
    double phi = 0.0;
    int n = 100;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--variant", variant, "qtms or noise")->capture_default_str();
        cmd->add_option("--sigma1", sigma1, "received amplitude")->capture_default_str();
        cmd->add_option("--sigma2", sigma2, "reference amplitude")->capture_default_str();
        cmd->add_option("--rho", rho, "correlation coefficient")->capture_default_str();
        cmd->add_option("--phi", phi, "relative phase (rad)")->capture_default_str();
        cmd->add_option("--n", n, "samples per batch (N)")->capture_default_str();
    }
    CovarianceParams params() const {
        return CovarianceParams::make(sigma1, sigma2, rho, phi, parse_variant(variant));
    }
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    write_file_atomically(out_path, [&](std::ostream& os) { os << text; });
}

std::string table_text(const CurveTable& t) {
    std::ostringstream os;
    write_curve_csv(os, t);
    return os.str();
}

void require_some_success(const CurveTable& t) {
    if (!t.rows.empty() && t.failed_rows() == t.rows.size()) {
        std::string first = t.status.empty() ? "" : t.status.front();
        throw EvaluationFailed("every point failed; first: " + first);
    }
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const std::string& input, const std::string& variant) {
    const IQBatch batch = read_iq_file(input);
    const SampleStats stats = sample_stats(batch, parse_variant(variant));
    const Estimates est = estimate(stats);
    json j;
    j["variant"] = to_string(stats.variant);
    j["n"] = stats.n;
    j["sigma1_hat"] = est.sigma1_hat;
    j["sigma2_hat"] = est.sigma2_hat;
    j["rho_hat"] = est.rho_hat;
    j["phi_hat"] = est.phi_hat;
    j["rho_clamped"] = est.rho_clamped;
    j["phi_degenerate"] = est.phi_degenerate;
    j["ddn"] = ddn_statistic(stats);
    j["glr"] = est.rho_hat >= 1.0 ? json(nullptr) : number_or_null(glr_statistic(stats));
    json cov = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(stats.s_hat(r, c));
        cov.push_back(row);
    }
    j["sample_covariance"] = cov;
    std::cout << j.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- simulate

struct MeanStd {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    void add(double v) {
        if (!std::isfinite(v)) return;
        sum += v;
        sum2 += v * v;
        ++n;
    }
    json to_json() const {
        const double m = n ? sum / n : 0.0;
        const double var = n > 1 ? std::max(0.0, (sum2 - n * m * m) / (n - 1)) : 0.0;
        return json{{"mean", m}, {"std", std::sqrt(var)}, {"count", n}};
    }
};

int cmd_simulate(const ModelOptions& m, std::size_t trials, std::uint64_t seed,
                 const std::string& out, bool iq, const std::string& format, unsigned threads) {
    if (m.n < 1) throw DomainError("--n must be positive");
    const CovarianceParams params = m.params();
    json summary;
    summary["version"] = kVersion;
    summary["params"] = {{"variant", to_string(params.variant)}, {"sigma1", params.sigma1},
                         {"sigma2", params.sigma2}, {"rho", params.rho},
                         {"phi", params.phi}, {"n", m.n}, {"seed", seed}};
    if (iq) {
        IqFormat fmt;
        if (format == "csv") fmt = IqFormat::Csv;
        else if (format == "binary" || format == "bin") fmt = IqFormat::Binary;
        else throw DomainError("--format must be csv or binary");
        auto rng = trial_engine(seed, 0);
        const IQBatch batch = sample_batch(params, static_cast<std::size_t>(m.n), rng);
        write_iq_file(out, batch, fmt);
        summary["output"] = out;
        summary["format"] = format;
        summary["samples"] = batch.size();
        std::cout << summary.dump(2) << '\n';
        return kOk;
    }

    SimConfig cfg{params, static_cast<std::size_t>(m.n), trials, seed};
    const TrialResults r = run_trials(cfg, threads);
    std::ostringstream os;
    os.precision(15);
    os << "# ncradar " << kVersion << " kind=trials variant=" << to_string(params.variant)
       << " sigma1=" << params.sigma1 << " sigma2=" << params.sigma2 << " rho=" << params.rho
       << " phi=" << params.phi << " n=" << m.n << " trials=" << trials << " seed=" << seed
       << '\n';
    os << "trial,sigma1_hat,sigma2_hat,rho_hat,phi_hat,ddn,glr\n";
    os.precision(17);
    MeanStd s1, s2, rh, ph, dd, gl;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const auto& e = r.estimates[k];
        os << k << ',' << e.sigma1_hat << ',' << e.sigma2_hat << ',' << e.rho_hat << ','
           << e.phi_hat << ',' << r.ddn[k] << ',' << r.glr[k] << '\n';
        s1.add(e.sigma1_hat);
        s2.add(e.sigma2_hat);
        rh.add(e.rho_hat);
        ph.add(e.phi_hat);
        dd.add(r.ddn[k]);
        gl.add(r.glr[k]);
    }
    emit(out, os.str());
    summary["trials"] = trials;
    summary["output"] = out.empty() ? "-" : out;
    summary["sigma1_hat"] = s1.to_json();
    summary["sigma2_hat"] = s2.to_json();
    summary["rho_hat"] = rh.to_json();
    summary["phi_hat"] = ph.to_json();
    summary["ddn"] = dd.to_json();
    summary["glr"] = gl.to_json();
    (out.empty() || out == "-" ? std::cerr : std::cout) << summary.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- pdf / tvd

DistributionSpec family_spec(const std::string& family, const std::string& method,
                             const ModelOptions& m) {
    const bool exact = method == "exact";
    if (!exact && method != "approx")
        throw DomainError("--method must be exact or approx for this command");
    if (family == "sigma") {
        if (!exact) throw DomainError("sigma family has no approximation");
        return SigmaExact{m.sigma1, m.n};
    }
    if (family == "rho")
        return exact ? DistributionSpec(RhoExact{m.rho, m.n})
                     : DistributionSpec(rice_approx_for_rho(m.rho, m.n));
    if (family == "phi")
        return exact ? DistributionSpec(PhiExact{m.rho, m.phi, m.n})
                     : DistributionSpec(von_mises_approx_for_phi(m.rho, m.phi, m.n));
    if (family == "ddn")
        return exact ? DistributionSpec(DdnExact{m.sigma1, m.sigma2, m.rho, m.n})
                     : DistributionSpec(rice_approx_for_ddn(m.sigma1, m.sigma2, m.rho, m.n));
    throw DomainError("--family must be sigma, rho, phi or ddn");
}

std::vector<std::pair<std::string, std::string>> model_params(const ModelOptions& m) {
    auto s = [](double v) {
        std::ostringstream os;
        os.precision(15);
        os << v;
        return os.str();
    };
    return {{"sigma1", s(m.sigma1)}, {"sigma2", s(m.sigma2)}, {"rho", s(m.rho)},
            {"phi", s(m.phi)},       {"n", std::to_string(m.n)}};
}

int cmd_pdf(const std::string& family, const std::string& method, const ModelOptions& m,
            const std::string& grid_text, const std::string& out) {
    const DistributionSpec d = family_spec(family, method, m);
    validate(d);
    std::vector<double> grid;
    if (grid_text.empty()) {
        const Interval sup = effective_support(d);
        double lo = sup.lo, hi = sup.hi;
        if (!is_circular(d) && family != "rho") {
            // the 30-sigma support is mostly empty; plot the central part
            const double c = 0.5 * (lo + hi);
            lo = std::max(lo, c - (c - lo) / 3.0);
            hi = c + (hi - c) / 3.0;
        }
        grid = linear_grid(lo, hi, 201);
    } else {
        grid = parse_grid(grid_text);
    }
    CurveTable t = pdf_table(d, grid);
    t.name = family;
    t.method = method;
    t.params = model_params(m);
    t.params.emplace_back("family", std::string(family_name(d)));
    require_some_success(t);
    emit(out, table_text(t));
    return kOk;
}

int cmd_tvd(const std::string& family, const std::string& sweep, const ModelOptions& m,
            const std::string& grid_text, const std::string& out) {
    if (sweep != "n" && sweep != "rho") throw DomainError("--sweep must be n or rho");
    const auto grid = parse_grid(grid_text.empty() ? (sweep == "n" ? "10:250:25" : "0.05:0.9:18")
                                                    : grid_text);
    CurveTable t = tvd_table(sweep, grid, [&](double v) {
        ModelOptions mm = m;
        if (sweep == "n") {
            if (v != std::floor(v) || v < 1) throw DomainError("N sweep values must be integers");
            mm.n = static_cast<int>(v);
        } else {
            mm.rho = v;
        }
        return std::pair<DistributionSpec, DistributionSpec>{family_spec(family, "exact", mm),
                                                             family_spec(family, "approx", mm)};
    });
    t.name = family;
    t.method = "exact-vs-approx";
    t.params = model_params(m);
    t.params.emplace_back("family", family);
    t.params.emplace_back("sweep", sweep);
    require_some_success(t);
    emit(out, table_text(t));
    return kOk;
}

// ---------------------------------------------------------------- roc

int cmd_roc(const std::string& detector, const std::string& method, const ModelOptions& m,
            std::size_t trials, std::uint64_t seed, const std::string& grid_text,
            const std::string& out) {
    RocParams p;
    p.sigma1 = m.sigma1;
    p.sigma2 = m.sigma2;
    p.rho = m.rho;
    p.phi = m.phi;
    p.n = m.n;
    p.variant = parse_variant(m.variant);
    p.trials = trials;
    p.seed = seed;
    const auto grid = grid_text.empty() ? default_pfa_grid() : parse_grid(grid_text);
    const RocCurve curve =
        build_roc_curve(parse_detector(detector), parse_roc_method(method), p, grid);
    CurveTable t = roc_table(curve);
    t.name = std::string(to_string(curve.detector));
    require_some_success(t);
    emit(out, table_text(t));
    return kOk;
}

// ---------------------------------------------------------------- figures

int cmd_figures(const std::string& id, const std::string& out) {
    json summary = json::array();
    for (const auto& fig : expand_figure_id(id)) {
        const FigureReport r = write_figure(fig, out);
        summary.push_back({{"figure", r.figure},
                           {"files", r.files.size()},
                           {"manifest", r.manifest.string()},
                           {"failed_curves", r.failed_curves},
                           {"failed_points", r.failed_points}});
    }
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

int fail(int code, const std::string& kind, const std::string& message) {
    json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cout << j.dump() << '\n';
    std::cerr << "ncradar: " << message << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noise radar covariance estimation and detection toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string input, variant = "qtms";
    auto* est = app.add_subcommand("estimate", "Estimate sigma1, sigma2, rho, phi from an IQ file");
    est->add_option("input", input, "IQ file (CSV or binary)")->required();
    est->add_option("--variant", variant, "qtms or noise")->capture_default_str();

    ModelOptions sim_m;
    std::size_t sim_trials = 1000;
    std::uint64_t sim_seed = 1;
    std::string sim_out, sim_format = "csv";
    bool sim_iq = false;
    unsigned sim_threads = 1;
    auto* sim = app.add_subcommand("simulate", "Generate IQ data or Monte Carlo trial results");
    sim_m.add_to(sim);
    sim->add_option("--trials", sim_trials)->capture_default_str();
    sim->add_option("--seed", sim_seed)->capture_default_str();
    sim->add_option("--out", sim_out, "output file ('-' for stdout)");
    sim->add_flag("--iq", sim_iq, "write one IQ batch of N samples instead of trial results");
    sim->add_option("--format", sim_format, "IQ file format: csv or binary")->capture_default_str();
    sim->add_option("--threads", sim_threads, "worker threads (0 = all cores)")
        ->capture_default_str();

    ModelOptions pdf_m;
    std::string pdf_family = "rho", pdf_method = "exact", pdf_grid, pdf_out;
    auto* pdfc = app.add_subcommand("pdf", "Evaluate an exact or approximate density on a grid");
    pdf_m.add_to(pdfc);
    pdfc->add_option("--family", pdf_family, "sigma, rho, phi or ddn")->capture_default_str();
    pdfc->add_option("--method", pdf_method, "exact or approx")->capture_default_str();
    pdfc->add_option("--grid", pdf_grid, "lo:hi:count, log:lo:hi:count or a,b,c");
    pdfc->add_option("--out", pdf_out, "output CSV (default stdout)");

    ModelOptions roc_m;
    roc_m.n = 10;
    std::string roc_detector = "rho", roc_method = "exact", roc_grid, roc_out;
    std::size_t roc_trials = 100'000;
    std::uint64_t roc_seed = 1;
    auto* roc = app.add_subcommand("roc", "ROC curve for the rho-hat or D_DN detector");
    roc_m.add_to(roc);
    roc->add_option("--detector", roc_detector, "rho or ddn")->capture_default_str();
    roc->add_option("--method", roc_method, "exact, approx or mc")->capture_default_str();
    roc->add_option("--pfa-grid", roc_grid, "pfa grid (default: log-spaced from 1e-4)");
    roc->add_option("--trials", roc_trials, "Monte Carlo trials")->capture_default_str();
    roc->add_option("--seed", roc_seed)->capture_default_str();
    roc->add_option("--out", roc_out, "output CSV (default stdout)");

    ModelOptions tvd_m;
    std::string tvd_family = "rho", tvd_sweep = "n", tvd_grid, tvd_out;
    auto* tvd = app.add_subcommand("tvd", "Total variation distance, exact vs approximation");
    tvd_m.add_to(tvd);
    tvd->add_option("--family", tvd_family, "rho, phi or ddn")->capture_default_str();
    tvd->add_option("--sweep", tvd_sweep, "n or rho")->capture_default_str();
    tvd->add_option("--grid", tvd_grid, "sweep values");
    tvd->add_option("--out", tvd_out, "output CSV (default stdout)");

    std::string fig_id = "all", fig_out;
    auto* figs = app.add_subcommand("figures", "Write the data behind the published figures");
    figs->add_option("figure", fig_id, "fig1 ... fig11, fig3a etc., or all")->capture_default_str();
    figs->add_option("--out", fig_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*est) return cmd_estimate(input, variant);
        if (*sim) {
            if (sim_out.empty() && sim_iq) throw DomainError("--iq needs --out");
            return cmd_simulate(sim_m, sim_trials, sim_seed, sim_out, sim_iq, sim_format,
                                sim_threads);
        }
        if (*pdfc) return cmd_pdf(pdf_family, pdf_method, pdf_m, pdf_grid, pdf_out);
        if (*roc)
            return cmd_roc(roc_detector, roc_method, roc_m, roc_trials, roc_seed, roc_grid,
                           roc_out);
        if (*tvd) {
            if (tvd_family == "sigma") throw DomainError("sigma family has no approximation");
            return cmd_tvd(tvd_family, tvd_sweep, tvd_m, tvd_grid, tvd_out);
        }
        if (*figs) return cmd_figures(fig_id, fig_out);
    } catch (const DegenerateDataError& e) {
        const std::string msg = e.what();
        return fail(kDegenerate,
                    msg.rfind("zero-signal-power", 0) == 0 ? "zero-signal-power" : "degenerate-data",
                    msg);
    } catch (const FormatError& e) {
        return fail(kInput, "malformed-input", e.what());
    } catch (const DomainError& e) {
        return fail(kInput, "invalid-argument", e.what());
    } catch (const IoError& e) {
        return fail(kIo, "io-error", e.what());
    } catch (const std::exception& e) {
        return fail(kEval, "evaluation-failed", e.what());
    }
    return kInput;
}
