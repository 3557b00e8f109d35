#include <sstream>

#include "gammacalc/errored_vector.hpp"

namespace gammacalc {

double max_asymmetry(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

bool is_psd(const Eigen::MatrixXd& m, double floor_rel) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    return lmin >= -floor_rel * std::max(lmax, 1.0);
}

Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& m, const ToleranceConfig& tol, const std::string& what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    const double scale = std::max(ev.maxCoeff(), 1.0);
    const double floor = -tol.psd_floor_rel * scale;
    bool clamped = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < floor) {
            std::ostringstream msg;
            msg << what << " is not positive semidefinite: eigenvalue " << ev[i] << " below floor " << floor;
            throw NotPositiveSemidefinite(msg.str());
        }
        if (ev[i] < 0.0) {
            ev[i] = 0.0;
            clamped = true;
        }
    }
    if (!clamped) return m;
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

void ErroredVector::validate(const ToleranceConfig& tol) {
    const int d = dim();
    if (bias.size() == 0) bias = Eigen::VectorXd::Zero(d);
    if (variance.rows() != d || variance.cols() != d || static_cast<int>(bias.size()) != d)
        throw DimensionMismatch("errored vector: value/variance/bias dimensions disagree");
    const double asym = max_asymmetry(variance);
    if (asym > tol.symmetry) {
        std::ostringstream msg;
        msg << "variance asymmetry " << asym << " exceeds tolerance " << tol.symmetry;
        throw NotPositiveSemidefinite(msg.str());
    }
    variance = (variance + variance.transpose()) / 2.0;
    variance = clamp_psd(variance, tol, "variance");
}

ErroredVector make_errored(Eigen::VectorXd value, Eigen::MatrixXd variance, Eigen::VectorXd bias, const ToleranceConfig& tol) {
    ErroredVector ev{std::move(value), std::move(variance), std::move(bias)};
    ev.validate(tol);
    return ev;
}

} // namespace gammacalc
