#pragma once
#include <span>

#include "gammacalc/differentiable_map.hpp"
#include "gammacalc/errored_vector.hpp"

namespace gammacalc {

// First- and second-order propagation through F:
//   value'    = F(value)
//   variance' = J * variance * J^T
//   bias'_k   = grad F_k . bias + 1/2 tr(Hess F_k * variance)
// The bias rule needs F's Hessian; when variance and bias vanish it degrades
// gracefully to pure value transport.
ErroredVector gauss_propagate(const DifferentiableMap& F, const ErroredVector& x,
                              const ToleranceConfig& tol = default_tolerances());

// The textbook-but-incoherent rule sigma'_k = sum_i |J_ki(at)| sigma_i. Kept
// as a counterexample: a rotation followed by its inverse strictly inflates
// it. `at` defaults to the origin.
Eigen::VectorXd naive_propagate(const DifferentiableMap& F, const Eigen::VectorXd& sigmas,
                                const Eigen::VectorXd& at = Eigen::VectorXd());

// grad F . variance . grad G^T for scalar maps F, G.
double gamma_bilinear(const DifferentiableMap& F, const DifferentiableMap& G, const ErroredVector& x);

// (sum_i sqrt(gamma_i))^2: certified upper bound on the quadratic error of
// F(f_1, ..., f_d) for any F that is 1-Lipschitz in the l1 sense.
double contraction_bound(std::span<const double> gammas);

} // namespace gammacalc
