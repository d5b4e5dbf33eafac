#include "ncr/quadrature.hpp"

#include "ncr/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace ncr {
namespace {

constexpr int kGaussPoints = 10;

struct GaussRule {
    std::array<double, kGaussPoints> nodes{};
    std::array<double, kGaussPoints> weights{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
GaussRule make_gauss_rule() {
    GaussRule rule;
    constexpr int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss_rule() {
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

struct Panel {
    double a, b;
    double estimate;
    double error;
    // Simpson keeps f at a, a+h/4, a+h/2, a+3h/4, b so children reuse them.
    std::array<double, 5> f;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

class Integrator {
public:
    Integrator(const Integrand& f, const QuadratureSpec& spec) : f_(f), spec_(spec) {}

    double eval(double x) {
        ++evaluations_;
        const double v = f_(x);
        if (!std::isfinite(v))
            throw QuadratureError("integrand is not finite at x = " + std::to_string(x));
        return v;
    }

    Panel simpson_panel(double a, double b, double fa, double fm, double fb) {
        const double h = b - a;
        Panel p{a, b, 0.0, 0.0, {fa, eval(a + 0.25 * h), fm, eval(a + 0.75 * h), fb}};
        finish_simpson(p);
        return p;
    }

    void finish_simpson(Panel& p) {
        const double h = p.b - p.a;
        const double coarse = h / 6.0 * (p.f[0] + 4.0 * p.f[2] + p.f[4]);
        const double fine = h / 12.0 * (p.f[0] + 4.0 * p.f[1] + 2.0 * p.f[2] +
                                        4.0 * p.f[3] + p.f[4]);
        p.estimate = fine + (fine - coarse) / 15.0;
        p.error = std::abs(fine - coarse) / 15.0;
    }

    double gauss(double a, double b) {
        const auto& rule = gauss_rule();
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double s = 0.0;
        for (int i = 0; i < kGaussPoints; ++i)
            s += rule.weights[i] * eval(mid + half * rule.nodes[i]);
        return s * half;
    }

    Panel gauss_panel(double a, double b) {
        const double m = 0.5 * (a + b);
        const double whole = gauss(a, b);
        const double halves = gauss(a, m) + gauss(m, b);
        return Panel{a, b, halves, std::abs(halves - whole), {}};
    }

    Panel make_panel(double a, double b) {
        if (spec_.method == QuadratureMethod::GaussLegendre) return gauss_panel(a, b);
        return simpson_panel(a, b, eval(a), eval(0.5 * (a + b)), eval(b));
    }

    std::array<Panel, 2> split(const Panel& p) {
        const double m = 0.5 * (p.a + p.b);
        if (spec_.method == QuadratureMethod::GaussLegendre)
            return {gauss_panel(p.a, m), gauss_panel(m, p.b)};
        return {simpson_panel(p.a, m, p.f[0], p.f[1], p.f[2]),
                simpson_panel(m, p.b, p.f[2], p.f[3], p.f[4])};
    }

    QuadratureResult run(std::span<const double> edges) {
        std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
        std::vector<Panel> done;  // panels too narrow to split further
        double total = 0.0;
        double total_error = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            if (edges[i + 1] == edges[i]) continue;
            Panel p = make_panel(edges[i], edges[i + 1]);
            total += p.estimate;
            total_error += p.error;
            queue.push(p);
        }
        long panels = static_cast<long>(queue.size());
        while (!queue.empty()) {
            const double target = std::max(spec_.abs_tol, spec_.rel_tol * std::abs(total));
            if (total_error <= target) break;
            if (panels >= spec_.max_subdivisions)
                throw QuadratureError("subdivision limit of " +
                                      std::to_string(spec_.max_subdivisions) +
                                      " panels exceeded (error estimate " +
                                      std::to_string(total_error) + ")");
            Panel worst = queue.top();
            queue.pop();
            const double m = 0.5 * (worst.a + worst.b);
            if (!(m > worst.a && m < worst.b) ||
                (worst.b - worst.a) <= 1e-14 * std::max(std::abs(worst.a), std::abs(worst.b))) {
                // Cannot refine below roundoff: accept the panel as is.
                total_error -= worst.error;
                worst.error = 0.0;
                done.push_back(worst);
                continue;
            }
            const auto children = split(worst);
            total += children[0].estimate + children[1].estimate - worst.estimate;
            total_error += children[0].error + children[1].error - worst.error;
            queue.push(children[0]);
            queue.push(children[1]);
            ++panels;
        }
        // Re-sum from the final partition to shed accumulated update roundoff.
        QuadratureResult result;
        double value = 0.0, error = 0.0;
        for (const auto& p : done) value += p.estimate;
        while (!queue.empty()) {
            value += queue.top().estimate;
            error += queue.top().error;
            queue.pop();
        }
        result.value = value;
        result.error = error;
        result.intervals = panels;
        result.evaluations = evaluations_;
        return result;
    }

private:
    const Integrand& f_;
    QuadratureSpec spec_;
    long evaluations_ = 0;
};

} // namespace

std::string_view to_string(QuadratureMethod m) {
    return m == QuadratureMethod::AdaptiveSimpson ? "adaptive-simpson" : "gauss-legendre";
}

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw DomainError("max_subdivisions must be >= 1");
}

QuadratureResult integrate_detailed(const Integrand& f, std::span<const double> breakpoints,
                                    const QuadratureSpec& spec) {
    spec.validate();
    if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i]))
            throw DomainError("integrate: breakpoints must be finite");
        if (i > 0 && breakpoints[i] < breakpoints[i - 1])
            throw DomainError("integrate: breakpoints must be sorted");
    }
    Integrator integrator(f, spec);
    return integrator.run(breakpoints);
}

QuadratureResult integrate_detailed(const Integrand& f, double lo, double hi,
                                    const QuadratureSpec& spec) {
    if (hi < lo) {
        auto r = integrate_detailed(f, hi, lo, spec);
        r.value = -r.value;
        return r;
    }
    const std::array<double, 2> edges{lo, hi};
    return integrate_detailed(f, std::span<const double>(edges), spec);
}

} // namespace ncr
