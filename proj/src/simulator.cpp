#include "ncr/simulator.hpp"

#include "ncr/errors.hpp"
#include "ncr/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace ncr {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Plain Box-Muller on the engine's raw output: unlike std::normal_distribution
// the sequence is fixed by this file, not by the standard library.
class NormalSource {
public:
    explicit NormalSource(std::mt19937_64& rng) : rng_(rng) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // 53-bit uniform in (0, 1]
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64& rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

IQBatch draw_batch(const Eigen::Matrix4d& l, std::size_t n, std::mt19937_64& rng) {
    NormalSource normal(rng);
    IQBatch batch(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector4d z;
        for (int j = 0; j < 4; ++j) z[j] = normal();
        const Eigen::Vector4d x = l * z;
        batch.i1[i] = x[0];
        batch.q1[i] = x[1];
        batch.i2[i] = x[2];
        batch.q2[i] = x[3];
    }
    return batch;
}

void run_range(const SimConfig& config, const Eigen::Matrix4d& l, std::size_t begin,
               std::size_t end, TrialResults& out) {
    const RadarVariant variant = config.params.variant;
    for (std::size_t k = begin; k < end; ++k) {
        auto rng = trial_engine(config.seed, k);
        const IQBatch batch = draw_batch(l, config.n_per_trial, rng);
        const SampleStats stats = sample_stats(batch, variant);
        const Estimates est = estimate(stats);
        out.estimates[k] = est;
        out.ddn[k] = ddn_statistic(stats);
        out.glr[k] = est.rho_hat >= 1.0 ? std::numeric_limits<double>::infinity()
                                        : glr_statistic(stats);
        out.rc_bar[k] = stats.rc_bar;
        out.rs_bar[k] = stats.rs_bar;
    }
}

} // namespace

Eigen::Matrix4d coloring_matrix(const CovarianceParams& params) {
    const CovMatrix4 sigma = build_covariance(params);
    const bool singular = params.rho >= 1.0 || params.sigma1 == 0.0 || params.sigma2 == 0.0;
    if (!singular) {
        Eigen::LLT<Eigen::Matrix4d> llt(sigma);
        if (llt.info() == Eigen::Success) {
            Eigen::Matrix4d l = llt.matrixL();
            if (l.allFinite() && (l.diagonal().array() > 0.0).all()) return l;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sigma);
    if (eig.info() != Eigen::Success)
        throw SingularCovarianceError("eigendecomposition of the covariance failed");
    const Eigen::Vector4d root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

IQBatch sample_batch(const CovarianceParams& params, std::size_t n, std::mt19937_64& rng) {
    return draw_batch(coloring_matrix(params), n, rng);
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(~index));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

TrialResults run_trials(const SimConfig& config, unsigned threads) {
    config.params.validate();
    if (config.n_per_trial == 0) throw DomainError("n_per_trial must be positive");
    if (config.trials == 0) throw DomainError("trials must be positive");
    const Eigen::Matrix4d l = coloring_matrix(config.params);

    TrialResults out;
    out.estimates.resize(config.trials);
    out.ddn.resize(config.trials);
    out.glr.resize(config.trials);
    out.rc_bar.resize(config.trials);
    out.rs_bar.resize(config.trials);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.trials));
    if (threads <= 1) {
        run_range(config, l, 0, config.trials, out);
        return out;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (config.trials + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(config.trials, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                run_range(config, l, begin, end, out);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw DomainError("empirical CDF of an empty sample");
    for (double v : sorted_)
        if (std::isnan(v)) throw DomainError("empirical CDF: NaN in sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::sup_deviation(const std::function<double(double)>& cdf) const {
    const double n = static_cast<double>(sorted_.size());
    double sup = 0.0;
    std::size_t i = 0;
    while (i < sorted_.size()) {
        std::size_t j = i;
        while (j < sorted_.size() && sorted_[j] == sorted_[i]) ++j;
        const double f = cdf(sorted_[i]);
        // ECDF jumps from i/n to j/n at this value.
        sup = std::max({sup, std::abs(f - i / n), std::abs(f - j / n)});
        i = j;
    }
    return sup;
}

double histogram_tvd(const std::vector<double>& values,
                     const std::function<double(double)>& pdf, double mass_outside, int bins) {
    if (values.empty()) throw DomainError("histogram_tvd: empty sample");
    if (bins < 1) throw DomainError("histogram_tvd: bins must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) throw DomainError("histogram_tvd: sample has zero spread");
    const double width = (hi - lo) / bins;
    std::vector<double> counts(bins, 0.0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / width);
        counts[std::clamp(b, 0, bins - 1)] += 1.0;
    }
    QuadratureSpec spec;
    spec.abs_tol = 1e-9;
    spec.rel_tol = 1e-7;
    double l1 = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double h = counts[b] / (values.size() * width);
        const double a = lo + b * width;
        l1 += integrate([&](double x) { return std::abs(h - pdf(x)); }, a, a + width, spec);
    }
    return std::clamp(0.5 * (l1 + mass_outside), 0.0, 1.0);
}

} // namespace ncr
