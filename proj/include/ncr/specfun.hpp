#pragma once

// Special functions used by the exact estimator distributions and the
// closed-form ROC curves.  Orders are nonnegative integers throughout; the
// log-domain and exponentially scaled variants exist because the exact
// densities combine factors such as Gamma(N), K_{N-1}(x) and x^N that leave
// double range long before the final product does.

#include <vector>

namespace ncr {

inline constexpr double kSeriesRelTol = 1e-14;
inline constexpr long kSeriesMaxTerms = 1'000'000;

// ln Gamma(x) for x > 0.
double ln_gamma(double x);

// 2F1(a, b; c; z) by its power series, 0 <= z < 1.  c must not be a
// nonpositive integer.  Throws SeriesDivergedError when the stopping rule is
// not met within kSeriesMaxTerms terms and OverflowError when the value
// leaves double range (use log_gauss_2f1_series then).
double gauss_2f1_series(double a, double b, double c, double z);

// ln 2F1(a, b; c; z) for the all-positive-term case a, b, c > 0,
// 0 <= z < 1.  Terms are accumulated with a running scale so the sum never
// overflows.
double log_gauss_2f1_series(double a, double b, double c, double z);

// Modified Bessel function of the first kind, integer order.
double bessel_i(int order, double x);
// exp(-x) I_order(x).
double bessel_i_scaled(int order, double x);
double log_bessel_i(int order, double x);
// ln I_m(x) for m = 0..max_order (ratios from backward recurrence).
std::vector<double> log_bessel_i_sequence(int max_order, double x);

// Modified Bessel function of the second kind, integer order, x > 0.
double bessel_k(int order, double x);
// exp(x) K_order(x).
double bessel_k_scaled(int order, double x);
double log_bessel_k(int order, double x);
// ln K_n(x) for n = first..last (forward recurrence from K0, K1).
std::vector<double> log_bessel_k_sequence(int first, int last, double x);

// Marcum Q-function of order 1: the upper tail P(R > b) of a Rice(a, 1)
// variate.
double marcum_q1(double a, double b);

// ln of the Poisson probability mass exp(-lambda) lambda^k / k!.
double log_poisson_pmf(long k, double lambda);

} // namespace ncr
