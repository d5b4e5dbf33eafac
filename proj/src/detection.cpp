#include "ncr/detection.hpp"

#include "ncr/distributions.hpp"
#include "ncr/errors.hpp"
#include "ncr/simulator.hpp"
#include "ncr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ncr {
namespace {

void require_pfa(double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("pfa must lie in (0, 1)");
}

void require_rho(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
}

std::string context(double rho, int n, double pfa) {
    std::ostringstream os;
    os.precision(6);
    os << " (rho=" << rho << ", N=" << n << ", pfa=" << pfa << ")";
    return os.str();
}

// Re-throws numerical failures with the operating point attached.
template <class F>
double with_context(F&& f, double rho, int n, double pfa) {
    try {
        return f();
    } catch (const SeriesDivergedError& e) {
        throw SeriesDivergedError(e.what() + context(rho, n, pfa));
    } catch (const QuadratureError& e) {
        throw QuadratureError(e.what() + context(rho, n, pfa));
    } catch (const OverflowError& e) {
        throw OverflowError(e.what() + context(rho, n, pfa));
    } catch (const RootFindingError& e) {
        throw RootFindingError(e.what() + context(rho, n, pfa));
    }
}

// Exact null threshold in normalized units x_tilde = 2x/(sigma1 sigma2).
double ddn_normalized_exact_threshold(double pfa, int n) {
    // sigma1 sigma2 = 2 makes x and x_tilde coincide
    auto sf = [n](double t) { return sf_ddn_exact(t, 2.0, 1.0, 0.0, n); };
    double lo = 0.0;
    double hi = std::sqrt(static_cast<double>(n));
    int expansions = 0;
    while (sf(hi) > pfa) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 60)
            throw RootFindingError("D_DN threshold: could not bracket the root");
    }
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (sf(mid) > pfa ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double rho_threshold_for_pfa(double pfa, int n) {
    require_pfa(pfa);
    if (n <= 2) throw DomainError("rho threshold: N must be > 2");
    return std::sqrt(-std::expm1(std::log(pfa) / (n - 1.0)));
}

double pfa_for_rho_threshold(double t, int n) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("rho threshold must lie in [0, 1]");
    if (n <= 2) throw DomainError("rho threshold: N must be > 2");
    return std::exp((n - 1.0) * std::log1p(-t * t));
}

double roc_rho_closed_form(double pfa, double rho, int n) {
    require_pfa(pfa);
    require_rho(rho);
    if (n <= 2) throw DomainError("roc_rho_closed_form: N must be > 2");
    const double one_minus = 1.0 - rho * rho;
    const double a = rho * std::sqrt(2.0 * n) / one_minus;
    const double b = std::sqrt(-2.0 * n * std::expm1(std::log(pfa) / (n - 1.0))) / one_minus;
    return marcum_q1(a, b);
}

double roc_rho_closed_form_legacy(double pfa, double rho, int n) {
    require_pfa(pfa);
    require_rho(rho);
    if (n < 1) throw DomainError("roc_rho_closed_form_legacy: N must be positive");
    const double one_minus = 1.0 - rho * rho;
    return marcum_q1(rho * std::sqrt(2.0 * n) / one_minus,
                     std::sqrt(-2.0 * std::log(pfa)) / one_minus);
}

double roc_rho_exact(double pfa, double rho, int n) {
    const double t = rho_threshold_for_pfa(pfa, n);
    require_rho(rho);
    return with_context([&] { return sf_rho_hat_exact(t, rho, n); }, rho, n, pfa);
}

double ddn_threshold_for_pfa(double pfa, double sigma1, double sigma2, int n,
                             ThresholdMode mode) {
    require_pfa(pfa);
    if (!(sigma1 > 0.0 && sigma2 > 0.0)) throw DomainError("sigma1, sigma2 must be positive");
    if (n < 1) throw DomainError("D_DN threshold: N must be positive");
    const double half = 0.5 * sigma1 * sigma2;
    if (mode == ThresholdMode::RayleighApprox) return half * std::sqrt(-n * std::log(pfa));
    return half * with_context([&] { return ddn_normalized_exact_threshold(pfa, n); }, 0.0, n,
                               pfa);
}

double ddn_pfa_for_threshold_rayleigh(double t, double sigma1, double sigma2, int n) {
    if (!(t >= 0.0)) throw DomainError("D_DN threshold must be >= 0");
    const double s = sigma1 * sigma2;
    return std::exp(-4.0 * t * t / (n * s * s));
}

double roc_ddn_closed_form(double pfa, double rho, int n) {
    require_pfa(pfa);
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
    if (n < 1) throw DomainError("roc_ddn_closed_form: N must be positive");
    return marcum_q1(rho * std::sqrt(2.0 * n), std::sqrt(-2.0 * std::log(pfa)));
}

double roc_ddn_exact(double pfa, double sigma1, double sigma2, double rho, int n) {
    require_rho(rho);
    const double t = ddn_threshold_for_pfa(pfa, sigma1, sigma2, n, ThresholdMode::Exact);
    return with_context([&] { return sf_ddn_exact(t, sigma1, sigma2, rho, n); }, rho, n, pfa);
}

// ---------------------------------------------------------------- curves

std::string_view to_string(Detector d) { return d == Detector::RhoHat ? "rho-hat" : "ddn"; }

std::string_view to_string(RocMethod m) {
    switch (m) {
    case RocMethod::Exact: return "exact";
    case RocMethod::ClosedForm: return "closed-form";
    case RocMethod::MonteCarlo: return "monte-carlo";
    }
    return "?";
}

Detector parse_detector(std::string_view text) {
    if (text == "rho" || text == "rho-hat" || text == "glr") return Detector::RhoHat;
    if (text == "ddn") return Detector::Ddn;
    throw DomainError("unknown detector '" + std::string(text) + "' (expected rho or ddn)");
}

RocMethod parse_roc_method(std::string_view text) {
    if (text == "exact") return RocMethod::Exact;
    if (text == "approx" || text == "closed-form") return RocMethod::ClosedForm;
    if (text == "mc" || text == "monte-carlo") return RocMethod::MonteCarlo;
    throw DomainError("unknown method '" + std::string(text) + "' (expected exact, approx or mc)");
}

std::size_t RocCurve::failed_points() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const RocPoint& p) { return !p.ok(); }));
}

std::vector<double> default_pfa_grid() {
    std::vector<double> grid;
    const double lo = std::log10(1e-4);
    const double hi = std::log10(0.5);
    for (int i = 0; i < 50; ++i) grid.push_back(std::pow(10.0, lo + (hi - lo) * i / 49.0));
    for (int k = 11; k <= 19; ++k) grid.push_back(0.05 * k);
    grid.push_back(0.99);
    return grid;
}

RocCurve build_roc_curve(Detector detector, RocMethod method, const RocParams& params,
                         const std::vector<double>& pfa_grid) {
    if (pfa_grid.empty()) throw DomainError("empty pfa grid");
    for (std::size_t i = 0; i < pfa_grid.size(); ++i) {
        require_pfa(pfa_grid[i]);
        if (i > 0 && !(pfa_grid[i] > pfa_grid[i - 1]))
            throw DomainError("pfa grid must be strictly increasing");
    }
    require_rho(params.rho);
    if (!(params.sigma1 > 0.0 && params.sigma2 > 0.0))
        throw DomainError("sigma1, sigma2 must be positive");
    if (detector == Detector::RhoHat && params.n <= 2)
        throw DomainError("rho-hat detector needs N > 2");
    if (params.n < 1) throw DomainError("N must be positive");

    RocCurve curve{detector, method, params, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> statistic;
    if (method == RocMethod::MonteCarlo) {
        SimConfig cfg;
        cfg.params = CovarianceParams::make(params.sigma1, params.sigma2, params.rho, params.phi,
                                            params.variant);
        cfg.n_per_trial = static_cast<std::size_t>(params.n);
        cfg.trials = params.trials;
        cfg.seed = params.seed;
        TrialResults r = run_trials(cfg);
        if (detector == Detector::Ddn) {
            statistic = std::move(r.ddn);
        } else {
            statistic.reserve(r.size());
            for (const auto& e : r.estimates) statistic.push_back(e.rho_hat);
        }
    }

    for (double pfa : pfa_grid) {
        RocPoint pt{pfa, nan, nan, "ok"};
        try {
            if (detector == Detector::RhoHat) {
                pt.threshold = rho_threshold_for_pfa(pfa, params.n);
            } else {
                const auto mode = method == RocMethod::ClosedForm ? ThresholdMode::RayleighApprox
                                                                  : ThresholdMode::Exact;
                pt.threshold =
                    ddn_threshold_for_pfa(pfa, params.sigma1, params.sigma2, params.n, mode);
            }
            switch (method) {
            case RocMethod::Exact:
                pt.pd = detector == Detector::RhoHat
                            ? roc_rho_exact(pfa, params.rho, params.n)
                            : roc_ddn_exact(pfa, params.sigma1, params.sigma2, params.rho,
                                            params.n);
                break;
            case RocMethod::ClosedForm:
                pt.pd = detector == Detector::RhoHat
                            ? roc_rho_closed_form(pfa, params.rho, params.n)
                            : roc_ddn_closed_form(pfa, params.rho, params.n);
                break;
            case RocMethod::MonteCarlo: {
                const double t = pt.threshold;
                const auto hits = std::count_if(statistic.begin(), statistic.end(),
                                                [t](double v) { return v > t; });
                pt.pd = static_cast<double>(hits) / static_cast<double>(statistic.size());
                break;
            }
            }
            if (!std::isfinite(pt.pd)) throw QuadratureError("non-finite detection probability");
        } catch (const DomainError&) {
            throw;
        } catch (const std::exception& e) {
            pt.pd = nan;
            pt.status = std::string("failed:") + e.what();
        }
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

} // namespace ncr
