#pragma once
#include <functional>

#include "gammacalc/differentiable_map.hpp"
#include "gammacalc/errored_vector.hpp"

namespace gammacalc {

// Second-order differential operator L = sum_ij c_ij(x) d2/dx_i dx_j + drift . grad,
// where c = (1/2) sigma is the second-order coefficient field. The quadratic
// error of F recovers as L[F^2] - 2 F L[F] = grad F . sigma . grad F^T.
struct GeneratorDescriptor {
    int dim = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> second_order; // c(x), symmetric PSD
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;

    Eigen::MatrixXd second_order_at(const Eigen::VectorXd& x, const ToleranceConfig& tol = default_tolerances()) const;
    Eigen::VectorXd drift_at(const Eigen::VectorXd& x) const;
};

GeneratorDescriptor make_generator(int dim, std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> second_order,
                                   std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift = nullptr);
GeneratorDescriptor constant_generator(const Eigen::MatrixXd& c, const Eigen::VectorXd& drift = Eigen::VectorXd());

// L applied to a scalar map: tr(c(x) Hess phi(x)) + drift(x) . grad phi(x).
double apply_generator(const GeneratorDescriptor& L, const DifferentiableMap& phi, const Eigen::VectorXd& x);

// Transport by an injective map: theta_u L : phi -> L(phi o u) o u^{-1}.
// Coefficients at y = u(x):  c'(y) = J c J^T,  drift'_a(y) = tr(c Hess u_a) + drift . grad u_a.
// u^{-1} comes from the map's own inverse when present and Newton otherwise; a
// singular Jacobian at a queried point raises SingularJacobian naming it.
GeneratorDescriptor transport_generator(const GeneratorDescriptor& L, const DifferentiableMap& u);

} // namespace gammacalc
