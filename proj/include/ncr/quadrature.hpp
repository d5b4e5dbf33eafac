#pragma once

#include <functional>
#include <span>
#include <string_view>

namespace ncr {

enum class QuadratureMethod { AdaptiveSimpson, GaussLegendre };

std::string_view to_string(QuadratureMethod m);

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::AdaptiveSimpson;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    long max_subdivisions = 1'000'000;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;     // estimated absolute error
    long intervals = 0;     // panels in the final partition
    long evaluations = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive quadrature: the panel with the largest error estimate is
// bisected until the summed estimate drops below
// max(abs_tol, rel_tol * |value|).  Throws QuadratureError when the panel
// cap is reached first or the integrand is not finite.
QuadratureResult integrate_detailed(const Integrand& f, double lo, double hi,
                                    const QuadratureSpec& spec = {});

// Same, starting from the partition given by `breakpoints` (sorted; must
// include both ends).  Use it to place known peaks or kinks on panel edges.
QuadratureResult integrate_detailed(const Integrand& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureSpec& spec = {});

inline double integrate(const Integrand& f, double lo, double hi,
                        const QuadratureSpec& spec = {}) {
    return integrate_detailed(f, lo, hi, spec).value;
}

} // namespace ncr
