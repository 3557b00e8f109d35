#pragma once
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gammacalc/errors.hpp"
#include "gammacalc/expr/ast.hpp"

namespace gammacalc {

// A C1 (optionally C2) map R^d_in -> R^d_out with evaluation, Jacobian and
// Hessian callables. Hessian slices are indexed by output component.
struct DifferentiableMap {
    int d_in = 0;
    int d_out = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian; // d_out x d_in
    std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> hessian; // d_out slices of d_in x d_in
    std::optional<double> lipschitz_constant;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse; // optional analytic inverse
    bool hessian_exact = true; // false when the Hessian comes from finite differences

    bool has_hessian() const { return static_cast<bool>(hessian); }
    void check_input(const Eigen::VectorXd& x) const {
        if (static_cast<int>(x.size()) != d_in)
            throw DimensionMismatch("map expects input of dimension " + std::to_string(d_in) + ", got " +
                                    std::to_string(x.size()));
    }
};

DifferentiableMap identity_map(int dim);
DifferentiableMap constant_map(int d_in, const Eigen::VectorXd& value);
// x -> A x + b, with exact inverse when A is square invertible.
DifferentiableMap linear_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& b = Eigen::VectorXd());
// Componentwise scalar maps assembled into one map (diagonal structure).
DifferentiableMap compose(const DifferentiableMap& outer, const DifferentiableMap& inner);

// Builds a map from parsed expressions (one per output). Hessians are exact
// forward-mode; expressions containing abs/min/max keep a pointwise Hessian
// that fails at the kinks and mark the map as not exactly C2.
DifferentiableMap map_from_expressions(std::span<const expr::ExprAst> outputs);
DifferentiableMap map_from_expression(const expr::ExprAst& single);

// Central finite-difference fallbacks (flagged via hessian_exact = false).
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            int d_out, double h = 1e-6);
std::vector<Eigen::MatrixXd> fd_hessian(const DifferentiableMap& map, const Eigen::VectorXd& x, double h = 1e-5);
void attach_fd_hessian(DifferentiableMap& map, double h = 1e-5);

// Solves map(x) = y by Newton iteration starting from `guess` (defaults to y).
// Throws SingularJacobian naming the point when the Jacobian degenerates, and
// NumericalFailure when the iteration does not converge.
Eigen::VectorXd newton_inverse(const DifferentiableMap& map, const Eigen::VectorXd& y,
                               std::optional<Eigen::VectorXd> guess = std::nullopt, double tol = 1e-13,
                               int max_iter = 200);

// The inverse as a map, with Jacobian from the inverse-function theorem.
DifferentiableMap inverse_map(const DifferentiableMap& map);

} // namespace gammacalc
