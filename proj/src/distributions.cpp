#include "ncr/distributions.hpp"

#include "ncr/errors.hpp"
#include "ncr/model.hpp"
#include "ncr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ncr {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSeriesPatience = 3;

void require_n(int n, int min_n, const char* what) {
    if (n < min_n)
        throw DomainError(std::string(what) + ": N must be >= " + std::to_string(min_n));
}

void require_rho_below_one(double rho, const char* what) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw DomainError(std::string(what) + ": rho must lie in [0, 1)");
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be positive and finite");
}

// Angle mapped into (center - pi, center + pi].
double wrap_around(double theta, double center) {
    return center + normalize_phase(theta - center);
}

double ln_rho_null_density(double x, int n) {
    return std::log(2.0 * (n - 1)) + std::log(x) + (n - 2) * std::log1p(-x * x);
}

} // namespace

// ---------------------------------------------------------------- sigma_hat

double pdf_sigma_hat(double x, double sigma, int n) {
    require_positive(sigma, "sigma");
    require_n(n, 1, "pdf_sigma_hat");
    if (!(x >= 0.0)) throw DomainError("pdf_sigma_hat: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double dn = n;
    const double u = x / sigma;
    const double log_f = std::log(2.0) + dn * std::log(dn) - ln_gamma(dn) - std::log(sigma) +
                         (2.0 * dn - 1.0) * std::log(u) - dn * u * u;
    return std::exp(log_f);
}

// ---------------------------------------------------------------- rho_hat

double pdf_rho_hat_exact(double x, double rho, int n) {
    require_n(n, 3, "pdf_rho_hat_exact");
    require_rho_below_one(rho, "pdf_rho_hat_exact");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pdf_rho_hat_exact: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    if (rho == 0.0) return std::exp(ln_rho_null_density(x, n));
    const double dn = n;
    const double log_f = ln_rho_null_density(x, n) + dn * std::log1p(-rho * rho) +
                         log_gauss_2f1_series(dn, dn, 1.0, rho * rho * x * x);
    return std::exp(log_f);
}

double cdf_rho_hat_exact(double x, double rho, int n) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cdf_rho_hat_exact: x must lie in [0, 1]");
    if (rho == 0.0) return cdf_rho_hat_null(x, n);
    const DistributionSpec d = RhoExact{rho, n};
    return std::clamp(integrate_pdf(d, {0.0, x}), 0.0, 1.0);
}

double sf_rho_hat_exact(double x, double rho, int n) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("sf_rho_hat_exact: x must lie in [0, 1]");
    const DistributionSpec d = RhoExact{rho, n};
    return std::clamp(integrate_pdf(d, {x, 1.0}), 0.0, 1.0);
}

double cdf_rho_hat_null(double x, int n) {
    require_n(n, 3, "cdf_rho_hat_null");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cdf_rho_hat_null: x must lie in [0, 1]");
    return -std::expm1((n - 1.0) * std::log1p(-x * x));
}

double inverse_cdf_rho_hat_null(double p, int n) {
    require_n(n, 3, "inverse_cdf_rho_hat_null");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("inverse_cdf_rho_hat_null: p must lie in [0, 1]");
    // (1 - x^2)^(N-1) = 1 - p
    return std::sqrt(-std::expm1(std::log1p(-p) / (n - 1.0)));
}

RiceParams rice_approx_for_rho(double rho, int n) {
    require_rho_below_one(rho, "rice_approx_for_rho");
    require_n(n, 1, "rice_approx_for_rho");
    return {rho, (1.0 - rho * rho) / std::sqrt(2.0 * n)};
}

// ---------------------------------------------------------------- Rice

double pdf_rice(double x, const RiceParams& p) {
    require_positive(p.beta, "Rice beta");
    if (!(p.alpha >= 0.0)) throw DomainError("Rice alpha must be >= 0");
    if (x <= 0.0) return 0.0;
    const double b2 = p.beta * p.beta;
    const double z = x * p.alpha / b2;
    const double d = x - p.alpha;
    // exp(-(x^2 + a^2)/2b^2) I0(z) = exp(-(x - a)^2/2b^2) exp(-z) I0(z)
    return x / b2 * std::exp(-d * d / (2.0 * b2)) * bessel_i_scaled(0, z);
}

double cdf_rice(double x, const RiceParams& p) {
    require_positive(p.beta, "Rice beta");
    if (x <= 0.0) return 0.0;
    return 1.0 - marcum_q1(p.alpha / p.beta, x / p.beta);
}

double pdf_rayleigh(double x, const RayleighParams& p) {
    require_positive(p.scale, "Rayleigh scale");
    if (x <= 0.0) return 0.0;
    const double s2 = p.scale * p.scale;
    return x / s2 * std::exp(-x * x / (2.0 * s2));
}

// ---------------------------------------------------------------- phi_hat

double pdf_phi_hat_exact(double theta, double rho, double phi, int n) {
    require_n(n, 1, "pdf_phi_hat_exact");
    require_rho_below_one(rho, "pdf_phi_hat_exact");
    if (!std::isfinite(theta) || !std::isfinite(phi))
        throw DomainError("pdf_phi_hat_exact: angles must be finite");
    if (rho == 0.0) return 1.0 / kTwoPi;
    const double dn = n;
    const double xi = rho * std::cos(theta - phi);
    const double log_shrink = dn * std::log1p(-rho * rho);
    const double second =
        std::exp(log_shrink + log_gauss_2f1_series(dn, 1.0, 0.5, xi * xi)) / kTwoPi;
    const double first = xi / (2.0 * std::sqrt(kPi)) *
                         std::exp(ln_gamma(dn + 0.5) - ln_gamma(dn) + log_shrink -
                                  (dn + 0.5) * std::log1p(-xi * xi));
    // The two terms cancel for cos(theta - phi) < 0; the true density there
    // can be far below their rounding error.
    return std::max(first + second, 0.0);
}

namespace {

std::vector<double> circular_edges(double center, double width) {
    std::vector<double> edges;
    for (int i = 0; i <= 16; ++i) edges.push_back(center - kPi + kTwoPi * i / 16.0);
    for (int j = -8; j <= 8; ++j) {
        const double t = center + j * width;
        if (t > center - kPi && t < center + kPi) edges.push_back(t);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double phase_width(double rho, int n) {
    const double s = n * rho * rho;
    const double kappa = s <= 1.0 ? 2.0 * std::sqrt(s) : 2.0 * s;
    return kappa > 0.0 ? std::min(kPi / 8.0, 1.0 / std::sqrt(kappa)) : kPi / 8.0;
}

} // namespace

CircularMoment phi_hat_circular_moment(double rho, double phi, int n) {
    require_n(n, 1, "phi_hat_circular_moment");
    require_rho_below_one(rho, "phi_hat_circular_moment");
    if (rho == 0.0) return {};
    const auto edges = circular_edges(phi, phase_width(rho, n));
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-10;
    CircularMoment m;
    m.along = integrate_detailed(
                  [&](double t) { return pdf_phi_hat_exact(t, rho, phi, n) * std::cos(t - phi); },
                  edges, spec)
                  .value;
    m.orthogonal = integrate_detailed(
                       [&](double t) {
                           return pdf_phi_hat_exact(t, rho, phi, n) * std::sin(t - phi);
                       },
                       edges, spec)
                       .value;
    return m;
}

double mean_resultant_length(double rho, double phi, int n) {
    const CircularMoment m = phi_hat_circular_moment(rho, phi, n);
    return std::clamp(std::hypot(m.along, m.orthogonal), 0.0, 1.0);
}

double kappa_from_resultant_length(double r) {
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError("kappa_from_resultant_length: R must lie in [0, 1)");
    return r * (2.0 - r * r) / (1.0 - r * r);
}

double fitted_kappa(double rho, int n) {
    return kappa_from_resultant_length(mean_resultant_length(rho, 0.0, n));
}

VonMisesParams von_mises_approx_for_phi(double rho, double phi, int n) {
    require_n(n, 1, "von_mises_approx_for_phi");
    require_rho_below_one(rho, "von_mises_approx_for_phi");
    if (rho == 0.0)
        throw DegenerateDataError("rho = 0: phi_hat is uniform, no von Mises concentration");
    const double s = n * rho * rho;
    const double kappa = s <= 1.0 ? 2.0 * std::sqrt(s) : 2.0 * s;
    return {normalize_phase(phi), kappa};
}

double pdf_von_mises(double theta, const VonMisesParams& p) {
    require_positive(p.kappa, "von Mises kappa");
    // exp(kappa (cos - 1)) / (2 pi exp(-kappa) I0(kappa))
    return std::exp(p.kappa * (std::cos(theta - p.mu) - 1.0)) /
           (kTwoPi * bessel_i_scaled(0, p.kappa));
}

// ---------------------------------------------------------------- D_DN

namespace {

void require_ddn_args(double sigma1, double sigma2, double rho, int n, const char* what) {
    require_positive(sigma1, "sigma1");
    require_positive(sigma2, "sigma2");
    require_rho_below_one(rho, what);
    require_n(n, 1, what);
}

} // namespace

double pdf_ddn_exact(double x, double sigma1, double sigma2, double rho, int n) {
    require_ddn_args(sigma1, sigma2, rho, n, "pdf_ddn_exact");
    if (!(x >= 0.0)) throw DomainError("pdf_ddn_exact: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double xt = 2.0 * x / (sigma1 * sigma2);
    const double one_minus = 1.0 - rho * rho;
    const double y = 2.0 * xt / one_minus;
    const double log_f = std::log(8.0) + n * std::log(xt) - std::log(sigma1 * sigma2) -
                         std::log(one_minus) - ln_gamma(n) + log_bessel_k(n - 1, y) +
                         log_bessel_i(0, rho * y);
    return std::exp(log_f);
}

double sf_ddn_exact(double x, double sigma1, double sigma2, double rho, int n) {
    require_ddn_args(sigma1, sigma2, rho, n, "sf_ddn_exact");
    if (!(x >= 0.0)) throw DomainError("sf_ddn_exact: x must be >= 0");
    if (x == 0.0) return 1.0;
    const double xt = 2.0 * x / (sigma1 * sigma2);
    const double one_minus = 1.0 - rho * rho;
    const double y = 2.0 * xt / one_minus;
    const double log_prefactor = std::log(2.0) + n * std::log(xt) - ln_gamma(n);
    if (rho == 0.0)  // I_m(0) = 0 for m >= 1
        return std::clamp(std::exp(log_prefactor + log_bessel_k(n, y)), 0.0, 1.0);

    const double z = rho * y;
    const double log_rho = std::log(rho);
    constexpr int kMaxTerms = 100'000;
    int top = static_cast<int>(std::min<double>(kMaxTerms, 64.0 + 2.0 * z));
    for (;;) {
        const auto log_i = log_bessel_i_sequence(top, z);
        const auto log_k = log_bessel_k_sequence(n, n + top, y);
        std::vector<double> log_terms(static_cast<std::size_t>(top) + 1);
        double lmax = -std::numeric_limits<double>::infinity();
        for (int m = 0; m <= top; ++m) {
            log_terms[m] = m * log_rho + log_k[m] + log_i[m];
            lmax = std::max(lmax, log_terms[m]);
        }
        double sum = 0.0;
        int small_run = 0;
        bool converged = false;
        for (int m = 0; m <= top; ++m) {
            const double t = std::exp(log_terms[m] - lmax);
            sum += t;
            // Early exit once three consecutive terms are negligible and the
            // tail is decaying.
            if (t < 1e-14 * sum && m > 0 && log_terms[m] < log_terms[m - 1]) {
                if (++small_run >= kSeriesPatience) {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if (converged)
            return std::clamp(std::exp(log_prefactor + lmax + std::log(sum)), 0.0, 1.0);
        if (top >= kMaxTerms)
            throw SeriesDivergedError("D_DN CDF series did not converge within " +
                                      std::to_string(kMaxTerms) + " terms");
        top = std::min(kMaxTerms, 2 * top);
    }
}

double cdf_ddn_exact(double x, double sigma1, double sigma2, double rho, int n) {
    return 1.0 - sf_ddn_exact(x, sigma1, sigma2, rho, n);
}

RiceParams rice_approx_for_ddn(double sigma1, double sigma2, double rho, int n) {
    require_positive(sigma1, "sigma1");
    require_positive(sigma2, "sigma2");
    require_n(n, 1, "rice_approx_for_ddn");
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rice_approx_for_ddn: rho must lie in [0, 1]");
    const double s = sigma1 * sigma2;
    return {0.5 * n * rho * s, std::sqrt(n / 8.0) * s};
}

// ---------------------------------------------------------------- tagged

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Centre and width of the bulk of the density (x units).
struct Bulk {
    double center;
    double width;
};

Bulk bulk_of(const DistributionSpec& d) {
    return std::visit(
        Overloaded{
            [](const SigmaExact& s) { return Bulk{s.sigma, s.sigma / (2.0 * std::sqrt(s.n))}; },
            [](const RhoExact& s) {
                const auto r = rice_approx_for_rho(s.rho, s.n);
                return Bulk{s.rho, std::max(r.beta, 1e-3)};
            },
            [](const PhiExact& s) { return Bulk{s.phi, phase_width(s.rho, s.n)}; },
            [](const DdnExact& s) {
                const double half = 0.5 * s.sigma1 * s.sigma2;
                return Bulk{s.n * s.rho * half,
                            std::sqrt(s.n / 2.0) * half / std::sqrt(1.0 - s.rho * s.rho)};
            },
            [](const RiceParams& s) { return Bulk{s.alpha, s.beta}; },
            [](const VonMisesParams& s) {
                return Bulk{s.mu, std::min(kPi / 8.0, 1.0 / std::sqrt(s.kappa))};
            },
            [](const RayleighParams& s) { return Bulk{s.scale, s.scale}; },
        },
        d);
}

} // namespace

std::string_view family_name(const DistributionSpec& d) {
    return std::visit(Overloaded{
                          [](const SigmaExact&) { return std::string_view("sigma-exact"); },
                          [](const RhoExact&) { return std::string_view("rho-exact"); },
                          [](const PhiExact&) { return std::string_view("phi-exact"); },
                          [](const DdnExact&) { return std::string_view("ddn-exact"); },
                          [](const RiceParams&) { return std::string_view("rice"); },
                          [](const VonMisesParams&) { return std::string_view("von-mises"); },
                          [](const RayleighParams&) { return std::string_view("rayleigh"); },
                      },
                      d);
}

bool is_circular(const DistributionSpec& d) {
    return std::holds_alternative<PhiExact>(d) || std::holds_alternative<VonMisesParams>(d);
}

void validate(const DistributionSpec& d) {
    std::visit(Overloaded{
                   [](const SigmaExact& s) {
                       require_positive(s.sigma, "sigma");
                       require_n(s.n, 1, "sigma-exact");
                   },
                   [](const RhoExact& s) {
                       require_n(s.n, 3, "rho-exact");
                       require_rho_below_one(s.rho, "rho-exact");
                   },
                   [](const PhiExact& s) {
                       require_n(s.n, 1, "phi-exact");
                       require_rho_below_one(s.rho, "phi-exact");
                   },
                   [](const DdnExact& s) {
                       require_ddn_args(s.sigma1, s.sigma2, s.rho, s.n, "ddn-exact");
                   },
                   [](const RiceParams& s) {
                       require_positive(s.beta, "Rice beta");
                       if (!(s.alpha >= 0.0)) throw DomainError("Rice alpha must be >= 0");
                   },
                   [](const VonMisesParams& s) { require_positive(s.kappa, "von Mises kappa"); },
                   [](const RayleighParams& s) { require_positive(s.scale, "Rayleigh scale"); },
               },
               d);
}

double pdf(const DistributionSpec& d, double x) {
    return std::visit(
        Overloaded{
            [x](const SigmaExact& s) { return x <= 0.0 ? 0.0 : pdf_sigma_hat(x, s.sigma, s.n); },
            [x](const RhoExact& s) {
                return (x <= 0.0 || x >= 1.0) ? 0.0 : pdf_rho_hat_exact(x, s.rho, s.n);
            },
            [x](const PhiExact& s) { return pdf_phi_hat_exact(x, s.rho, s.phi, s.n); },
            [x](const DdnExact& s) {
                return x <= 0.0 ? 0.0 : pdf_ddn_exact(x, s.sigma1, s.sigma2, s.rho, s.n);
            },
            [x](const RiceParams& s) { return pdf_rice(x, s); },
            [x](const VonMisesParams& s) { return pdf_von_mises(x, s); },
            [x](const RayleighParams& s) { return pdf_rayleigh(x, s); },
        },
        d);
}

Interval effective_support(const DistributionSpec& d) {
    validate(d);
    return std::visit(
        Overloaded{
            [](const SigmaExact& s) {
                const double w = 10.0 * s.sigma / std::sqrt(static_cast<double>(s.n));
                return Interval{std::max(0.0, s.sigma - w), s.sigma + w};
            },
            [](const RhoExact&) { return Interval{0.0, 1.0}; },
            [](const PhiExact& s) { return Interval{s.phi - kPi, s.phi + kPi}; },
            [](const DdnExact& s) {
                const double half = 0.5 * s.sigma1 * s.sigma2;
                const double one_minus = 1.0 - s.rho * s.rho;
                const double spread = std::sqrt(s.n / 2.0);
                const double center = s.n * s.rho;
                return Interval{std::max(0.0, center - 30.0 * spread) * half,
                                (center + (30.0 * spread + 30.0) / one_minus) * half};
            },
            [](const RiceParams& s) {
                return Interval{std::max(0.0, s.alpha - 30.0 * s.beta), s.alpha + 30.0 * s.beta};
            },
            [](const VonMisesParams& s) { return Interval{s.mu - kPi, s.mu + kPi}; },
            [](const RayleighParams& s) { return Interval{0.0, 30.0 * s.scale}; },
        },
        d);
}

std::vector<double> partition_points(const DistributionSpec& d, Interval domain) {
    const Interval sup = effective_support(d);
    const Bulk bulk = bulk_of(d);
    std::vector<double> pts{domain.lo, domain.hi};
    auto add = [&](double t) {
        if (t > domain.lo && t < domain.hi) pts.push_back(t);
    };
    if (is_circular(d)) {
        // Edges for the period that contains the domain.
        const double center = wrap_around(bulk.center, 0.5 * (domain.lo + domain.hi));
        for (double t : circular_edges(center, bulk.width)) add(t);
        for (double t : circular_edges(center - kTwoPi, bulk.width)) add(t);
        for (double t : circular_edges(center + kTwoPi, bulk.width)) add(t);
    } else {
        for (int i = 0; i <= 32; ++i) add(sup.lo + (sup.hi - sup.lo) * i / 32.0);
        for (int j = -12; j <= 12; ++j) add(bulk.center + 0.5 * j * bulk.width);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double integrate_pdf(const DistributionSpec& d, Interval domain, const QuadratureSpec& spec) {
    validate(d);
    if (domain.hi <= domain.lo) return 0.0;
    const auto pts = partition_points(d, domain);
    return integrate_detailed([&](double x) { return pdf(d, x); }, pts, spec).value;
}

double total_variation_distance(const DistributionSpec& f, const DistributionSpec& g,
                                Interval domain, const QuadratureSpec& spec) {
    validate(f);
    validate(g);
    if (domain.hi <= domain.lo) throw DomainError("TVD: empty domain");
    auto pts = partition_points(f, domain);
    const auto more = partition_points(g, domain);
    pts.insert(pts.end(), more.begin(), more.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double half_l1 =
        0.5 * integrate_detailed([&](double x) { return std::abs(pdf(f, x) - pdf(g, x)); }, pts,
                                 spec)
                  .value;
    return std::clamp(half_l1, 0.0, 1.0);
}

double total_variation_distance(const DistributionSpec& f, const DistributionSpec& g,
                                const QuadratureSpec& spec) {
    if (is_circular(f) != is_circular(g))
        throw DomainError("TVD: cannot compare a circular and a linear distribution");
    const Interval a = effective_support(f);
    if (is_circular(f)) return total_variation_distance(f, g, a, spec);
    const Interval b = effective_support(g);
    return total_variation_distance(f, g, {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}, spec);
}

} // namespace ncr
