#pragma once

// Structured covariance model for noise-type radars.
//
// Every 4-vector and 4x4 matrix in this library uses the fixed component
// order x = [I1, Q1, I2, Q2]: received in-phase/quadrature first, then the
// reference channel.  The block structure of the covariance depends on it.

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ncr {

// QTMS radars couple the channels through the reflection matrix R'(phi);
// standard noise radars through the rotation matrix R(phi).
enum class RadarVariant { QTMS, StandardNoise };

std::string_view to_string(RadarVariant v);
// Accepts "qtms" and "noise" (also "standard", "standard-noise").
RadarVariant parse_variant(std::string_view text);

using CovMatrix4 = Eigen::Matrix4d;

// Wraps an angle into (-pi, pi].
double normalize_phase(double phi);

struct CovarianceParams {
    double sigma1 = 1.0;  // received amplitude (V)
    double sigma2 = 1.0;  // reference amplitude (V)
    double rho = 0.0;     // correlation coefficient, [0, 1]
    double phi = 0.0;     // relative phase (rad), (-pi, pi]
    RadarVariant variant = RadarVariant::QTMS;

    // Validating factory; normalizes phi.  Throws DomainError.
    static CovarianceParams make(double sigma1, double sigma2, double rho,
                                 double phi, RadarVariant variant);

    void validate() const;
};

// N joint samples of the four voltage series.
struct IQBatch {
    std::vector<double> i1, q1, i2, q2;

    IQBatch() = default;
    explicit IQBatch(std::size_t n) : i1(n), q1(n), i2(n), q2(n) {}

    std::size_t size() const { return i1.size(); }
    bool consistent() const {
        return q1.size() == i1.size() && i2.size() == i1.size() &&
               q2.size() == i1.size();
    }
    void push_back(double a, double b, double c, double d) {
        i1.push_back(a);
        q1.push_back(b);
        i2.push_back(c);
        q2.push_back(d);
    }
};

// Sample covariance plus the auxiliary sums every estimator consumes.
struct SampleStats {
    CovMatrix4 s_hat = CovMatrix4::Zero();
    std::size_t n = 0;
    double p1_bar = 0.0;
    double p2_bar = 0.0;
    double rc_bar = 0.0;
    double rs_bar = 0.0;
    RadarVariant variant = RadarVariant::QTMS;
};

// 2x2 coupling block: reflection R'(phi) for QTMS, rotation R(phi) otherwise.
Eigen::Matrix2d coupling_matrix(double phi, RadarVariant variant);

CovMatrix4 build_covariance(const CovarianceParams& params);

// (1/N) sum x x^T.  No mean is subtracted: the model is zero-mean.
CovMatrix4 sample_covariance(const IQBatch& batch);

SampleStats auxiliary_stats(const CovMatrix4& s_hat, std::size_t n,
                            RadarVariant variant);

inline SampleStats sample_stats(const IQBatch& batch, RadarVariant variant) {
    return auxiliary_stats(sample_covariance(batch), batch.size(), variant);
}

} // namespace ncr
