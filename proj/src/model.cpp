#include "ncr/model.hpp"

#include "ncr/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace ncr {

std::string_view to_string(RadarVariant v) {
    return v == RadarVariant::QTMS ? "qtms" : "noise";
}

RadarVariant parse_variant(std::string_view text) {
    if (text == "qtms" || text == "QTMS") return RadarVariant::QTMS;
    if (text == "noise" || text == "standard" || text == "standard-noise")
        return RadarVariant::StandardNoise;
    throw DomainError("unknown radar variant '" + std::string(text) +
                      "' (expected qtms or noise)");
}

double normalize_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (!std::isfinite(phi)) throw DomainError("phase must be finite");
    double r = std::remainder(phi, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

void CovarianceParams::validate() const {
    if (!(sigma1 >= 0.0) || !std::isfinite(sigma1))
        throw DomainError("sigma1 must be a finite nonnegative number");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw DomainError("sigma2 must be a finite nonnegative number");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw DomainError("rho must lie in [0, 1]");
    if (!std::isfinite(phi)) throw DomainError("phi must be finite");
}

CovarianceParams CovarianceParams::make(double sigma1, double sigma2,
                                        double rho, double phi,
                                        RadarVariant variant) {
    CovarianceParams p{sigma1, sigma2, rho, phi, variant};
    p.validate();
    p.phi = normalize_phase(phi);
    return p;
}

Eigen::Matrix2d coupling_matrix(double phi, RadarVariant variant) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    Eigen::Matrix2d m;
    if (variant == RadarVariant::QTMS)
        m << c, s, s, -c;
    else
        m << c, s, -s, c;
    return m;
}

CovMatrix4 build_covariance(const CovarianceParams& params) {
    params.validate();
    const double s1 = params.sigma1;
    const double s2 = params.sigma2;
    CovMatrix4 sigma = CovMatrix4::Zero();
    sigma.topLeftCorner<2, 2>() = (s1 * s1) * Eigen::Matrix2d::Identity();
    sigma.bottomRightCorner<2, 2>() = (s2 * s2) * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d block =
        (params.rho * s1 * s2) * coupling_matrix(params.phi, params.variant);
    sigma.topRightCorner<2, 2>() = block;
    sigma.bottomLeftCorner<2, 2>() = block.transpose();
    return sigma;
}

namespace {

// Neumaier-compensated accumulator; keeps the sample covariance insensitive
// to the order of the batch.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace

CovMatrix4 sample_covariance(const IQBatch& batch) {
    if (!batch.consistent())
        throw DomainError("IQ batch series have different lengths");
    const std::size_t n = batch.size();
    if (n == 0) throw DomainError("IQ batch is empty");

    std::array<CompensatedSum, 10> acc{};
    for (std::size_t k = 0; k < n; ++k) {
        const std::array<double, 4> x{batch.i1[k], batch.q1[k], batch.i2[k],
                                      batch.q2[k]};
        int idx = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = r; c < 4; ++c) acc[idx++].add(x[r] * x[c]);
    }
    CovMatrix4 s;
    int idx = 0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int r = 0; r < 4; ++r)
        for (int c = r; c < 4; ++c) {
            s(r, c) = acc[idx++].value() * inv_n;
            s(c, r) = s(r, c);
        }
    return s;
}

SampleStats auxiliary_stats(const CovMatrix4& s_hat, std::size_t n,
                            RadarVariant variant) {
    if (n == 0) throw DomainError("sample count must be positive");
    if (!s_hat.allFinite()) throw DomainError("sample covariance is not finite");
    const double scale = 1.0 + s_hat.cwiseAbs().maxCoeff();
    if ((s_hat - s_hat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError("sample covariance is not symmetric");

    SampleStats st;
    st.s_hat = s_hat;
    st.n = n;
    st.variant = variant;
    st.p1_bar = s_hat(0, 0) + s_hat(1, 1);
    st.p2_bar = s_hat(2, 2) + s_hat(3, 3);
    // Entries: (0,2)=<I1 I2>, (1,3)=<Q1 Q2>, (0,3)=<I1 Q2>, (1,2)=<Q1 I2>.
    if (variant == RadarVariant::QTMS) {
        st.rc_bar = s_hat(0, 2) - s_hat(1, 3);
        st.rs_bar = s_hat(0, 3) + s_hat(1, 2);
    } else {
        st.rc_bar = s_hat(0, 2) + s_hat(1, 3);
        st.rs_bar = s_hat(0, 3) - s_hat(1, 2);
    }
    return st;
}

} // namespace ncr
