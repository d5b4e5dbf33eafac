#include "ncr/estimators.hpp"

#include "ncr/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace ncr {
namespace {

void require_positive_power(const SampleStats& stats) {
    if (stats.n == 0) throw DomainError("sample stats: n must be positive");
    if (!(stats.p1_bar > 0.0) || !(stats.p2_bar > 0.0))
        throw DegenerateDataError("zero-signal-power: rho and phi are undefined");
}

double projected_cross(const CovarianceParams& p, const SampleStats& st) {
    return st.rc_bar * std::cos(p.phi) + st.rs_bar * std::sin(p.phi);
}

void require_matching_variant(const CovarianceParams& p, const SampleStats& st) {
    if (p.variant != st.variant)
        throw DomainError("parameters and sample stats use different radar variants");
}

} // namespace

double raw_rho_hat(const SampleStats& stats) {
    require_positive_power(stats);
    return std::sqrt((stats.rc_bar * stats.rc_bar + stats.rs_bar * stats.rs_bar) /
                     (stats.p1_bar * stats.p2_bar));
}

Estimates estimate(const SampleStats& stats) {
    if (stats.n == 0) throw DomainError("sample stats: n must be positive");
    Estimates e;
    e.sigma1_hat = std::sqrt(std::max(stats.p1_bar, 0.0) / 2.0);
    e.sigma2_hat = std::sqrt(std::max(stats.p2_bar, 0.0) / 2.0);
    const double rho = raw_rho_hat(stats);
    if (rho > 1.0) {
        e.rho_hat = 1.0;
        e.rho_clamped = true;
    } else {
        e.rho_hat = rho;
    }
    if (stats.rc_bar == 0.0 && stats.rs_bar == 0.0) {
        e.phi_hat = 0.0;
        e.phi_degenerate = true;
    } else {
        e.phi_hat = normalize_phase(std::atan2(stats.rs_bar, stats.rc_bar));
    }
    return e;
}

CovarianceParams to_params(const Estimates& est, RadarVariant variant) {
    return CovarianceParams::make(est.sigma1_hat, est.sigma2_hat, est.rho_hat,
                                  est.phi_hat, variant);
}

double ml_objective(const CovarianceParams& params, const SampleStats& stats) {
    require_matching_variant(params, stats);
    const CovMatrix4 sigma = build_covariance(params);
    if (params.rho >= 1.0 || params.sigma1 <= 0.0 || params.sigma2 <= 0.0)
        throw SingularCovarianceError("covariance is singular (rho = 1 or zero amplitude)");
    const Eigen::LLT<CovMatrix4> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw SingularCovarianceError("covariance is not positive definite");
    const Eigen::Matrix4d l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const double trace = llt.solve(stats.s_hat).trace();
    return -log_det - trace;
}

double ml_objective_expanded(const CovarianceParams& p, const SampleStats& st) {
    require_matching_variant(p, st);
    p.validate();
    if (p.rho >= 1.0 || p.sigma1 <= 0.0 || p.sigma2 <= 0.0)
        throw SingularCovarianceError("covariance is singular (rho = 1 or zero amplitude)");
    const double s1 = p.sigma1, s2 = p.sigma2, r = p.rho;
    const double one_minus = 1.0 - r * r;
    return -2.0 * std::log(s1 * s1 * s2 * s2 * one_minus) -
           (st.p1_bar / (s1 * s1) + st.p2_bar / (s2 * s2) -
            2.0 * r * projected_cross(p, st) / (s1 * s2)) /
               one_minus;
}

double log_likelihood(const CovarianceParams& params, const SampleStats& stats) {
    const double n = static_cast<double>(stats.n);
    return 0.5 * n * (ml_objective(params, stats) - 4.0 * std::log(2.0 * std::numbers::pi));
}

double mfn_objective(const CovarianceParams& params, const SampleStats& stats) {
    require_matching_variant(params, stats);
    return (build_covariance(params) - stats.s_hat).squaredNorm();
}

double mfn_objective_expanded(const CovarianceParams& p, const SampleStats& st) {
    require_matching_variant(p, st);
    p.validate();
    const double a = p.sigma1 * p.sigma1;
    const double b = p.sigma2 * p.sigma2;
    return 2.0 * (a * a + 2.0 * p.rho * p.rho * a * b + b * b) -
           2.0 * (st.p1_bar * a + st.p2_bar * b) -
           4.0 * p.rho * p.sigma1 * p.sigma2 * projected_cross(p, st) +
           st.s_hat.squaredNorm();
}

double glr_statistic(const SampleStats& stats) {
    const Estimates e = estimate(stats);
    if (e.rho_hat >= 1.0)
        throw InfiniteStatisticError("rho_hat = 1: GLR statistic is infinite");
    return -2.0 * static_cast<double>(stats.n) * std::log1p(-e.rho_hat * e.rho_hat);
}

double glr_statistic_from_sums(const SampleStats& st) {
    require_positive_power(st);
    const double pp = st.p1_bar * st.p2_bar;
    const double excess = pp - st.rc_bar * st.rc_bar - st.rs_bar * st.rs_bar;
    if (!(excess > 0.0)) throw InfiniteStatisticError("rho_hat >= 1: GLR statistic is infinite");
    return 2.0 * static_cast<double>(st.n) * std::log(pp / excess);
}

double glr_threshold_for_rho_threshold(double t, std::size_t n) {
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("rho threshold must lie in [0, 1)");
    return -2.0 * static_cast<double>(n) * std::log1p(-t * t);
}

double ddn_statistic(const SampleStats& st) {
    if (st.n == 0) throw DomainError("sample stats: n must be positive");
    return 0.25 * static_cast<double>(st.n) * std::hypot(st.rc_bar, st.rs_bar);
}

} // namespace ncr
