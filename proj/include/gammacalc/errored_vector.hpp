#pragma once
#include <string>

#include <Eigen/Dense>

#include "gammacalc/errors.hpp"
#include "gammacalc/tolerances.hpp"

namespace gammacalc {

// A quantity in R^d together with the infinitesimal variance matrix and the
// infinitesimal bias of its error. Both carry units of epsilon^2: they are the
// coefficients of the squared infinitesimal error unit, which never appears
// explicitly in the API.
struct ErroredVector {
    Eigen::VectorXd value;
    Eigen::MatrixXd variance; // d x d, symmetric PSD
    Eigen::VectorXd bias;     // length d

    int dim() const { return static_cast<int>(value.size()); }

    // Checks dimensions, symmetry and positive semidefiniteness. Eigenvalues
    // slightly below zero (within the configured floor) are clamped; anything
    // lower is rejected with a diagnostic.
    void validate(const ToleranceConfig& tol = default_tolerances());
};

ErroredVector make_errored(Eigen::VectorXd value, Eigen::MatrixXd variance, Eigen::VectorXd bias = Eigen::VectorXd(),
                           const ToleranceConfig& tol = default_tolerances());

// Symmetry / PSD helpers shared across modules.
double max_asymmetry(const Eigen::MatrixXd& m);
// Clamps tiny negative eigenvalues to 0; throws NotPositiveSemidefinite (with
// the offending eigenvalue in the message) when the matrix is genuinely
// indefinite relative to the floor.
Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& m, const ToleranceConfig& tol = default_tolerances(),
                          const std::string& what = "matrix");
bool is_psd(const Eigen::MatrixXd& m, double floor_rel = 1e-10);
// Symmetric square root of a PSD matrix.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

} // namespace gammacalc
