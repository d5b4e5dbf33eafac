#pragma once

// Monte Carlo ground truth: zero-mean Gaussian IQ batches drawn from the
// structured covariance, and repeated-trial experiments over them.

#include "ncr/estimators.hpp"
#include "ncr/model.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace ncr {

struct SimConfig {
    CovarianceParams params;
    std::size_t n_per_trial = 100;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
};

struct TrialResults {
    std::vector<Estimates> estimates;
    std::vector<double> ddn;
    std::vector<double> glr;  // +inf when rho_hat == 1
    std::vector<double> rc_bar;
    std::vector<double> rs_bar;

    std::size_t size() const { return estimates.size(); }
};

// Symmetric factor L with L L^T = Sigma.  Cholesky when Sigma is positive
// definite, otherwise V diag(sqrt(max(lambda, 0))).
Eigen::Matrix4d coloring_matrix(const CovarianceParams& params);

IQBatch sample_batch(const CovarianceParams& params, std::size_t n, std::mt19937_64& rng);

// Engine for trial `index`; depends only on (seed, index).
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t index);

// Trials are split across `threads` workers (0 = hardware concurrency);
// results are identical for any thread count.
TrialResults run_trials(const SimConfig& config, unsigned threads = 1);

class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> values);

    // Fraction of samples <= x.
    double operator()(double x) const;
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

    // sup_x |ECDF(x) - F(x)| for a continuous CDF F.
    double sup_deviation(const std::function<double(double)>& cdf) const;

private:
    std::vector<double> sorted_;
};

// Half the L1 distance between a histogram density (`bins` equal-width bins
// over [min, max] of the sample) and `pdf`, plus half the mass of `pdf`
// outside that range (`mass_outside`, supplied by the caller since only it
// knows the support).
double histogram_tvd(const std::vector<double>& values,
                     const std::function<double(double)>& pdf, double mass_outside,
                     int bins = 100);

} // namespace ncr
