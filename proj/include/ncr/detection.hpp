#pragma once

// Thresholds, detection probabilities and ROC curves for the rho_hat (GLR)
// detector and the D_DN matched-filter detector.

#include "ncr/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ncr {

// ---- rho_hat detector ----
// T = sqrt(1 - pfa^(1/(N-1))).  pfa in (0, 1), N > 2.
double rho_threshold_for_pfa(double pfa, int n);
// pfa = (1 - T^2)^(N-1).
double pfa_for_rho_threshold(double t, int n);

// Q1(rho sqrt(2N)/(1-rho^2), sqrt(2N(1 - pfa^(1/(N-1))))/(1-rho^2)).
// Derived from the Rice approximation; meant for N >~ 100.
double roc_rho_closed_form(double pfa, double rho, int n);
// Older form with -2 ln pfa in place of 2N(1 - pfa^(1/(N-1))).
double roc_rho_closed_form_legacy(double pfa, double rho, int n);
// Integral of the exact rho_hat density above the threshold.
double roc_rho_exact(double pfa, double rho, int n);

// ---- D_DN detector ----
enum class ThresholdMode { RayleighApprox, Exact };

// RayleighApprox: T = (sigma1 sigma2 / 2) sqrt(-N ln pfa).
// Exact: root of sf_ddn_exact(T | rho = 0) = pfa, by bisection to 1e-10 in
// normalized units.  Throws RootFindingError if no bracket is found.
double ddn_threshold_for_pfa(double pfa, double sigma1, double sigma2, int n,
                             ThresholdMode mode = ThresholdMode::Exact);
// pfa = exp(-4 T^2 / (N sigma1^2 sigma2^2)).
double ddn_pfa_for_threshold_rayleigh(double t, double sigma1, double sigma2, int n);

// Q1(rho sqrt(2N), sqrt(-2 ln pfa)).
double roc_ddn_closed_form(double pfa, double rho, int n);
// Exact survival function of D_DN at the exact null threshold.
double roc_ddn_exact(double pfa, double sigma1, double sigma2, double rho, int n);

// ---- curves ----
enum class Detector { RhoHat, Ddn };
enum class RocMethod { Exact, ClosedForm, MonteCarlo };

std::string_view to_string(Detector d);
std::string_view to_string(RocMethod m);
Detector parse_detector(std::string_view text);
// exact | approx (closed-form) | mc (monte-carlo)
RocMethod parse_roc_method(std::string_view text);

struct RocParams {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
    int n = 10;
    // Only used by the Monte Carlo method.
    double phi = 0.0;
    RadarVariant variant = RadarVariant::QTMS;
    std::size_t trials = 100'000;
    std::uint64_t seed = 1;
};

struct RocPoint {
    double pfa = 0.0;
    double pd = 0.0;         // NaN when the point failed
    double threshold = 0.0;  // NaN when the point failed
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct RocCurve {
    Detector detector = Detector::RhoHat;
    RocMethod method = RocMethod::Exact;
    RocParams params;
    std::vector<RocPoint> points;

    std::size_t failed_points() const;
};

// 50 log-spaced points in [1e-4, 0.5], then 0.55, 0.60, ..., 0.95, 0.99.
std::vector<double> default_pfa_grid();

// Evaluates every grid point independently; a point that throws is kept with
// status "failed:<reason>".  Throws DomainError only for an invalid grid.
RocCurve build_roc_curve(Detector detector, RocMethod method, const RocParams& params,
                         const std::vector<double>& pfa_grid);

} // namespace ncr
