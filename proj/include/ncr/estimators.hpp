#pragma once

// Closed-form estimators of the four covariance parameters, the two
// objective functions they optimize, and the detector statistics.

#include "ncr/model.hpp"

namespace ncr {

struct Estimates {
    double sigma1_hat = 0.0;
    double sigma2_hat = 0.0;
    double rho_hat = 0.0;
    double phi_hat = 0.0;
    bool rho_clamped = false;     // raw ratio exceeded 1 and was clamped
    bool phi_degenerate = false;  // rc_bar = rs_bar = 0; phi_hat set to 0
};

// sigma_i = sqrt(P_i/2), rho = sqrt((Rc^2 + Rs^2)/(P1 P2)),
// phi = atan2(Rs, Rc).  Both the Frobenius-norm fit and maximum likelihood
// yield these.  Throws DegenerateDataError when P1 or P2 is zero.
Estimates estimate(const SampleStats& stats);

// Unnormalized rho_hat, i.e. without the clamp to 1.
double raw_rho_hat(const SampleStats& stats);

// Gaussian log-likelihood of N samples summarized by stats:
// -(N/2)(ln|Sigma| + 4 ln(2 pi) + tr(Sigma^-1 S_hat)).
// Throws SingularCovarianceError if Sigma(params) is not positive definite.
double log_likelihood(const CovarianceParams& params, const SampleStats& stats);

// Squared Frobenius distance ||Sigma(params) - S_hat||_F^2.
double mfn_objective(const CovarianceParams& params, const SampleStats& stats);
// The same quantity from its expansion in the auxiliary sums.
double mfn_objective_expanded(const CovarianceParams& params, const SampleStats& stats);

// -ln|Sigma| - tr(Sigma^-1 S_hat), maximized by the ML estimates.
double ml_objective(const CovarianceParams& params, const SampleStats& stats);
double ml_objective_expanded(const CovarianceParams& params, const SampleStats& stats);

// Parameters assembled from estimates (phi normalized).
CovarianceParams to_params(const Estimates& est, RadarVariant variant);

// Generalized likelihood ratio statistic -2N ln(1 - rho_hat^2).  The null
// hypothesis fit uses rho = 0.  Throws InfiniteStatisticError if
// rho_hat == 1.
double glr_statistic(const SampleStats& stats);
// 2N ln(P1 P2 / (P1 P2 - Rc^2 - Rs^2)).
double glr_statistic_from_sums(const SampleStats& stats);
// GLR threshold equivalent to thresholding rho_hat at t.
double glr_threshold_for_rho_threshold(double t, std::size_t n);

// Matched-filter magnitude (N/4) sqrt(Rc^2 + Rs^2).
double ddn_statistic(const SampleStats& stats);

} // namespace ncr
