#pragma once

// Sampling distributions of the estimators and of the D_DN detector:
// exact densities, their Rice / von Mises approximations, and the total
// variation distance used to grade the approximations.

#include "ncr/quadrature.hpp"

#include <string_view>
#include <variant>
#include <vector>

namespace ncr {

struct RiceParams {
    double alpha = 0.0;  // >= 0
    double beta = 1.0;   // > 0
};

struct VonMisesParams {
    double mu = 0.0;     // (-pi, pi]
    double kappa = 1.0;  // > 0
};

struct RayleighParams {
    double scale = 1.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// ---- amplitude estimators (Nakagami with m = N, Omega = sigma^2) ----
double pdf_sigma_hat(double x, double sigma, int n);

// ---- correlation coefficient ----
// Exact density on [0, 1]; requires n > 2 and 0 <= rho < 1.
double pdf_rho_hat_exact(double x, double rho, int n);
// Exact CDF / survival function by quadrature of the density.
double cdf_rho_hat_exact(double x, double rho, int n);
double sf_rho_hat_exact(double x, double rho, int n);
// Closed-form null (rho = 0) CDF 1 - (1 - x^2)^(N-1) and its inverse.
double cdf_rho_hat_null(double x, int n);
double inverse_cdf_rho_hat_null(double p, int n);
// alpha = rho, beta = (1 - rho^2)/sqrt(2N).  Intended for N >~ 100.
RiceParams rice_approx_for_rho(double rho, int n);

// ---- Rice / Rayleigh ----
double pdf_rice(double x, const RiceParams& p);
// 1 - Q1(alpha/beta, x/beta).
double cdf_rice(double x, const RiceParams& p);
double pdf_rayleigh(double x, const RayleighParams& p);

// ---- phase ----
double pdf_phi_hat_exact(double theta, double rho, double phi, int n);

struct CircularMoment {
    double along = 0.0;       // component in the phi direction
    double orthogonal = 0.0;  // vanishes by symmetry
};
CircularMoment phi_hat_circular_moment(double rho, double phi, int n);
// |E exp(j phi_hat)| by quadrature of the exact density.
double mean_resultant_length(double rho, double phi, int n);
// kappa ~ R (2 - R^2) / (1 - R^2).
double kappa_from_resultant_length(double r);
// The resultant-length pipeline: exact density -> R -> kappa.
double fitted_kappa(double rho, int n);
// mu = phi; kappa = 2 sqrt(N rho^2) if N rho^2 <= 1, else 2 N rho^2.
// Throws DegenerateDataError when rho == 0 (the density is uniform).
VonMisesParams von_mises_approx_for_phi(double rho, double phi, int n);
double pdf_von_mises(double theta, const VonMisesParams& p);

// ---- D_DN detector ----
// x_tilde = 2 x / (sigma1 sigma2) normalizes the detector output.
double pdf_ddn_exact(double x, double sigma1, double sigma2, double rho, int n);
// Survival function from the Bessel-product series; cdf = 1 - sf.
double sf_ddn_exact(double x, double sigma1, double sigma2, double rho, int n);
double cdf_ddn_exact(double x, double sigma1, double sigma2, double rho, int n);
// alpha = (N/2) rho sigma1 sigma2, beta = sqrt(N/8) sigma1 sigma2.
RiceParams rice_approx_for_ddn(double sigma1, double sigma2, double rho, int n);

// ---- tagged distributions and TVD ----
struct SigmaExact {
    double sigma = 1.0;
    int n = 1;
};
struct RhoExact {
    double rho = 0.0;
    int n = 3;
};
struct PhiExact {
    double rho = 0.0;
    double phi = 0.0;
    int n = 1;
};
struct DdnExact {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
    int n = 1;
};

using DistributionSpec = std::variant<SigmaExact, RhoExact, PhiExact, DdnExact, RiceParams,
                                      VonMisesParams, RayleighParams>;

std::string_view family_name(const DistributionSpec& d);
bool is_circular(const DistributionSpec& d);
void validate(const DistributionSpec& d);
double pdf(const DistributionSpec& d, double x);
// Interval holding all but a negligible (< 1e-40) part of the mass; for
// circular families the period centred on the mean direction.
Interval effective_support(const DistributionSpec& d);
// Panel edges that resolve the bulk of the density inside `domain`.
std::vector<double> partition_points(const DistributionSpec& d, Interval domain);

double integrate_pdf(const DistributionSpec& d, Interval domain,
                     const QuadratureSpec& spec = {});
inline double normalization(const DistributionSpec& d, const QuadratureSpec& spec = {}) {
    return integrate_pdf(d, effective_support(d), spec);
}

// (1/2) integral |f - g| over `domain`.
double total_variation_distance(const DistributionSpec& f, const DistributionSpec& g,
                                Interval domain, const QuadratureSpec& spec = {});
// Domain chosen from the two effective supports (one period, centred on
// f's mean direction, for circular pairs).
double total_variation_distance(const DistributionSpec& f, const DistributionSpec& g,
                                const QuadratureSpec& spec = {});

} // namespace ncr
