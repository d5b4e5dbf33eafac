#include "ncr/specfun.hpp"

#include "ncr/errors.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ncr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.57721566490153286061;
const double kLogMax = std::log(DBL_MAX);

// Rescaling step for running sums that would otherwise overflow.
constexpr double kBig = 1e250;
constexpr double kBigInv = 1e-250;
const double kLogBig = std::log(kBig);

double checked_exp(double log_value, const char* what) {
    if (log_value > kLogMax)
        throw OverflowError(std::string(what) + " overflows double precision");
    return std::exp(log_value);
}

void require_order(int order, const char* what) {
    if (order < 0) throw DomainError(std::string(what) + ": order must be >= 0");
}

// Power series of I_n(x) in the log domain; every term is positive.
double log_bessel_i_series(int n, double x) {
    const double q = 0.25 * x * x;
    double log_scale = n * std::log(0.5 * x) - ln_gamma(n + 1.0);
    double sum = 1.0;
    double term = 1.0;
    for (long k = 0; k < kSeriesMaxTerms; ++k) {
        const double ratio = q / ((k + 1.0) * (n + k + 1.0));
        term *= ratio;
        sum += term;
        if (sum > kBig) {
            sum *= kBigInv;
            term *= kBigInv;
            log_scale += kLogBig;
        }
        if (ratio < 1.0 && term * (ratio / (1.0 - ratio) + 1.0) < 1e-17 * sum)
            return log_scale + std::log(sum);
    }
    throw SeriesDivergedError("Bessel I series did not converge");
}

// Hankel expansion of exp(-x) sqrt(2 pi x) I_n(x) for x large against n^2.
double bessel_i_asymptotic_factor(int n, double x) {
    const double mu = 4.0 * n * n;
    double sum = 1.0;
    double term = 1.0;
    double prev = kInf;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) >= prev) break;  // asymptotic series turned
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// ln n! - [(n + 1/2) ln n - n + ln sqrt(2 pi)].
double stirling_error(double n) {
    if (n <= 15.0)
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
               0.5 * std::log(2.0 * std::numbers::pi);
    const double nn = n * n;
    constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                     s4 = 1.0 / 1188;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x ln(x / m) + m - x without cancellation for x near m.
double deviance_term(double x, double m) {
    if (std::abs(x - m) >= 0.1 * (x + m)) return x * std::log(x / m) + m - x;
    const double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    for (int j = 1; j < 1000; ++j) {
        ej *= v * v;
        const double next = s + ej / (2 * j + 1);
        if (next == s) return s;
        s = next;
    }
    return s;
}

bool use_asymptotic_i(int n, double x) {
    return x >= 50.0 && static_cast<double>(n) * n <= 0.5 * x;
}

// K0 and K1 times exp(x).
void bessel_k01_scaled(double x, double& k0e, double& k1e) {
    if (x <= 2.0) {
        const double q = 0.25 * x * x;
        const double log_half = std::log(0.5 * x);
        // I0, I1 and the harmonic-number series of the small-x expansions.
        double i0 = 1.0, i1 = 0.5 * x;
        double s0 = 0.0;
        double s1 = -2.0 * kEulerGamma + 1.0;  // psi(1) + psi(2)
        double t0 = 1.0, t1 = 1.0;             // q^k/(k!)^2, q^k/(k!(k+1)!)
        double harmonic = 0.0;
        for (int k = 1; k < 60; ++k) {
            harmonic += 1.0 / k;
            t0 *= q / (static_cast<double>(k) * k);
            t1 *= q / (static_cast<double>(k) * (k + 1.0));
            i0 += t0;
            i1 += 0.5 * x * t1;
            s0 += harmonic * t0;
            s1 += (2.0 * (harmonic - kEulerGamma) + 1.0 / (k + 1.0)) * t1;
            if (t0 < 1e-18 * i0 && t1 < 1e-18) break;
        }
        const double k0 = -(log_half + kEulerGamma) * i0 + s0;
        const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
        const double e = std::exp(x);
        k0e = k0 * e;
        k1e = k1 * e;
        return;
    }
    // Steed's method on the second continued fraction (Temme's CF2 with
    // order 0), in exponentially scaled form.
    constexpr double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i < 100000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) break;
    }
    if (i >= 100000) throw SeriesDivergedError("Bessel K continued fraction did not converge");
    h *= a1;
    k0e = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    k1e = k0e * (x + 0.5 - h) / x;
}

void require_k_arg(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("Bessel K: argument must be positive and finite");
}

} // namespace

double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("ln_gamma: argument must be positive and finite");
    return std::lgamma(x);
}

double log_gauss_2f1_series(double a, double b, double c, double z) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw DomainError("log_gauss_2f1_series: requires a, b, c > 0");
    if (!(z >= 0.0 && z < 1.0))
        throw DomainError("log_gauss_2f1_series: requires 0 <= z < 1");
    if (z == 0.0) return 0.0;
    double log_scale = 0.0;
    double sum = 1.0;
    double term = 1.0;
    for (long k = 0; k < kSeriesMaxTerms; ++k) {
        const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        term *= ratio;
        sum += term;
        if (sum > kBig) {
            sum *= kBigInv;
            term *= kBigInv;
            log_scale += kLogBig;
        }
        const double r = std::max(ratio, z);
        if (r < 1.0 && term < kSeriesRelTol * sum &&
            term * r / (1.0 - r) < kSeriesRelTol * sum)
            return log_scale + std::log(sum);
    }
    throw SeriesDivergedError("2F1 series diverged: no convergence within " +
                              std::to_string(kSeriesMaxTerms) +
                              " terms at z = " + std::to_string(z));
}

double gauss_2f1_series(double a, double b, double c, double z) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw DomainError("gauss_2f1_series: parameters must be finite");
    if (c <= 0.0 && c == std::floor(c))
        throw DomainError("gauss_2f1_series: c must not be a nonpositive integer");
    if (!(z >= 0.0 && z < 1.0))
        throw DomainError("gauss_2f1_series: requires 0 <= z < 1");
    if (z == 0.0) return 1.0;
    if (a > 0.0 && b > 0.0 && c > 0.0)
        return checked_exp(log_gauss_2f1_series(a, b, c, z), "2F1");

    double sum = 1.0;
    double term = 1.0;
    for (long k = 0; k < kSeriesMaxTerms; ++k) {
        const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        term *= ratio;
        sum += term;
        if (term == 0.0) return sum;  // terminating series
        if (!std::isfinite(sum)) throw OverflowError("2F1 overflows double precision");
        const double r = std::max(std::abs(ratio), z);
        if (r < 1.0 && std::abs(term) < kSeriesRelTol * std::abs(sum) &&
            std::abs(term) * r / (1.0 - r) < kSeriesRelTol * std::abs(sum))
            return sum;
    }
    throw SeriesDivergedError("2F1 series diverged at z = " + std::to_string(z));
}

// ln(exp(-x) I_order(x)), kept apart from ln I so large x does not cancel.
double log_bessel_i_scaled(int order, double x) {
    require_order(order, "Bessel I");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("Bessel I: argument must be nonnegative and finite");
    if (x == 0.0) return order == 0 ? 0.0 : -kInf;
    if (use_asymptotic_i(order, x))
        return -0.5 * std::log(2.0 * std::numbers::pi * x) +
               std::log(bessel_i_asymptotic_factor(order, x));
    return log_bessel_i_series(order, x) - x;
}

double log_bessel_i(int order, double x) {
    return log_bessel_i_scaled(order, x) + x;
}

double bessel_i_scaled(int order, double x) {
    return std::exp(log_bessel_i_scaled(order, x));
}

double bessel_i(int order, double x) {
    return checked_exp(log_bessel_i(order, x), "Bessel I");
}

std::vector<double> log_bessel_i_sequence(int max_order, double x) {
    require_order(max_order, "Bessel I sequence");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("Bessel I: argument must be nonnegative and finite");
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
    if (x == 0.0) {
        out[0] = 0.0;
        for (int m = 1; m <= max_order; ++m) out[m] = -kInf;
        return out;
    }
    out[0] = log_bessel_i(0, x);
    if (max_order == 0) return out;

    // r_M = I_M / I_{M-1} from its continued fraction (modified Lentz), then
    // r_m = 1 / (2m/x + r_{m+1}) downwards.
    const double tiny = 1e-300;
    const int top = max_order;
    double f = 2.0 * top / x;
    double cc = f;
    double dd = 0.0;
    long j = 1;
    for (; j < kSeriesMaxTerms; ++j) {
        const double bj = 2.0 * (top + j) / x;
        dd = bj + dd;
        if (dd == 0.0) dd = tiny;
        dd = 1.0 / dd;
        cc = bj + 1.0 / cc;
        if (cc == 0.0) cc = tiny;
        const double delta = cc * dd;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    if (j >= kSeriesMaxTerms)
        throw SeriesDivergedError("Bessel I ratio continued fraction did not converge");
    std::vector<double> ratio(static_cast<std::size_t>(max_order) + 1);
    ratio[top] = 1.0 / f;
    for (int m = top - 1; m >= 1; --m) ratio[m] = 1.0 / (2.0 * m / x + ratio[m + 1]);
    for (int m = 1; m <= max_order; ++m) out[m] = out[m - 1] + std::log(ratio[m]);
    return out;
}

std::vector<double> log_bessel_k_sequence(int first, int last, double x) {
    require_order(first, "Bessel K");
    if (last < first) throw DomainError("Bessel K sequence: last < first");
    require_k_arg(x);
    double k0e = 0.0, k1e = 0.0;
    bessel_k01_scaled(x, k0e, k1e);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(last - first) + 1);
    double log_k = std::log(k0e) - x;
    if (first == 0) out.push_back(log_k);
    double ratio = k1e / k0e;  // K_1 / K_0
    for (int n = 1; n <= last; ++n) {
        log_k += std::log(ratio);
        if (n >= first) out.push_back(log_k);
        ratio = 1.0 / ratio + 2.0 * n / x;  // K_{n+1} / K_n
    }
    return out;
}

double log_bessel_k(int order, double x) {
    return log_bessel_k_sequence(order, order, x).front();
}

double bessel_k_scaled(int order, double x) {
    return checked_exp(log_bessel_k(order, x) + x, "scaled Bessel K");
}

double bessel_k(int order, double x) {
    return checked_exp(log_bessel_k(order, x), "Bessel K");
}

double log_poisson_pmf(long k, double lambda) {
    if (k < 0) return -kInf;
    if (lambda == 0.0) return k == 0 ? 0.0 : -kInf;
    if (k == 0) return -lambda;
    // Saddle-point form; k ln(lambda) - lambda - ln k! cancels badly for large k.
    const double n = static_cast<double>(k);
    return -stirling_error(n) - deviance_term(n, lambda) -
           0.5 * std::log(2.0 * std::numbers::pi * n);
}

double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("marcum_q1: arguments must be finite and nonnegative");
    if (b == 0.0) return 1.0;
    const double la = 0.5 * a * a;
    const double lb = 0.5 * b * b;
    if (a == 0.0) return std::exp(-lb);

    // Q1(a, b) = sum_k Pois(k; a^2/2) P[Pois(b^2/2) <= k].  Weights outside
    // the +-(15 sqrt + 40) window of the first Poisson law are below 1e-40.
    const double spread = 15.0 * std::sqrt(la) + 40.0;
    const long k_lo = std::max(0L, static_cast<long>(std::floor(la - spread)));
    const long k_hi = static_cast<long>(std::ceil(la + spread));
    const double spread_b = 15.0 * std::sqrt(lb) + 40.0;

    if (b <= a) {
        // Q1 is near 1 here: sum the complement with the upper tail
        // P[Pois(lb) > k], accumulated downward from beyond its bulk.
        const long m_top = std::max(k_hi, static_cast<long>(std::ceil(lb + spread_b)));
        double tail = 0.0;
        for (long m = m_top; m > k_hi; --m) tail += std::exp(log_poisson_pmf(m, lb));
        double p = 0.0;
        for (long k = k_hi; k >= k_lo; --k) {
            p += std::exp(log_poisson_pmf(k, la)) * tail;
            tail += std::exp(log_poisson_pmf(k, lb));
        }
        return std::clamp(1.0 - p, 0.0, 1.0);
    }

    // P[Pois(lb) <= k] is accumulated from k = 0; terms far below the mode
    // of Pois(lb) are skipped (each < 1e-40).
    const long m_skip = std::max(0L, static_cast<long>(std::floor(lb - spread_b)));
    double cdf_b = 0.0;
    double q = 0.0;
    for (long k = m_skip; k <= k_hi; ++k) {
        cdf_b += std::exp(log_poisson_pmf(k, lb));
        if (k < k_lo) continue;
        q += std::exp(log_poisson_pmf(k, la)) * std::min(cdf_b, 1.0);
    }
    return std::clamp(q, 0.0, 1.0);
}

} // namespace ncr
