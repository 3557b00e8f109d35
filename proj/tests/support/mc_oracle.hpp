#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "gammacalc/rng.hpp"

// Small-noise Monte Carlo oracle: samples V_eps = v + eps G + eps^2 b with
// G ~ N(0, Gamma), pushes the samples through the map's *evaluation only*, and
// reports the sample variance and mean shift of the output. Deliberately
// independent of the propagation engine it is used to check.
namespace testsupport {

struct SmallNoiseResult {
    double variance = 0.0;      // sample variance of F(V_eps), divided by eps^2
    double variance_se = 0.0;   // standard error of that (eps^2-scaled)
    double mean_shift = 0.0;    // sample mean of F(V_eps) - F(v), divided by eps^2
    double mean_shift_se = 0.0;
};

inline SmallNoiseResult small_noise_oracle(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& v, const Eigen::MatrixXd& variance,
                                           const Eigen::VectorXd& bias, double eps, std::size_t n_samples,
                                           std::uint64_t seed) {
    const Eigen::Index d = v.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(variance);
    const Eigen::MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    const double f0 = f(v);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    Eigen::VectorXd z(d);
    for (std::size_t j = 0; j < n_samples; ++j) {
        auto rng = gammacalc::make_fast_rng(seed, j);
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng);
        const Eigen::VectorXd veps = v + eps * (root * z) + eps * eps * bias;
        const double y = f(veps) - f0;
        s1 += y;
        s2 += y * y;
        s3 += y * y * y;
        s4 += y * y * y * y;
    }
    const double n = static_cast<double>(n_samples);
    const double m1 = s1 / n;
    const double m2 = s2 / n - m1 * m1;                     // central second moment
    const double m4 = s4 / n - 4 * m1 * s3 / n + 6 * m1 * m1 * s2 / n - 3 * m1 * m1 * m1 * m1;

    SmallNoiseResult out;
    const double e2 = eps * eps;
    out.variance = m2 * n / (n - 1) / e2;
    out.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n) / e2;
    out.mean_shift = m1 / e2;
    out.mean_shift_se = std::sqrt(m2 / n) / e2;
    return out;
}

} // namespace testsupport
