#include <cmath>

#include "gammacalc/propagate.hpp"

namespace gammacalc {

ErroredVector gauss_propagate(const DifferentiableMap& F, const ErroredVector& x, const ToleranceConfig& tol) {
    if (F.d_in != x.dim()) throw DimensionMismatch("gauss_propagate: map input dimension != errored vector dimension");
    ErroredVector in = x;
    in.validate(tol);

    ErroredVector out;
    out.value = F.eval(in.value);
    const Eigen::MatrixXd J = F.jacobian(in.value);
    out.variance = J * in.variance * J.transpose();
    out.bias = J * in.bias;
    const bool needs_second_order = in.variance.cwiseAbs().maxCoeff() > 0.0;
    if (needs_second_order) {
        if (!F.has_hessian()) throw UnsupportedFunctional("gauss_propagate: map has no Hessian for the bias rule");
        const auto H = F.hessian(in.value);
        for (int k = 0; k < F.d_out; ++k)
            out.bias[k] += 0.5 * (H[static_cast<std::size_t>(k)].cwiseProduct(in.variance)).sum();
    }
    out.validate(tol);
    return out;
}

Eigen::VectorXd naive_propagate(const DifferentiableMap& F, const Eigen::VectorXd& sigmas, const Eigen::VectorXd& at) {
    if (F.d_in != static_cast<int>(sigmas.size()))
        throw DimensionMismatch("naive_propagate: sigma vector dimension != map input dimension");
    for (Eigen::Index i = 0; i < sigmas.size(); ++i)
        if (sigmas[i] < 0.0) throw InputError("naive_propagate: negative sigma");
    const Eigen::VectorXd point = at.size() ? at : Eigen::VectorXd::Zero(F.d_in);
    const Eigen::MatrixXd J = F.jacobian(point);
    return J.cwiseAbs() * sigmas;
}

double gamma_bilinear(const DifferentiableMap& F, const DifferentiableMap& G, const ErroredVector& x) {
    if (F.d_out != 1 || G.d_out != 1) throw DimensionMismatch("gamma_bilinear expects scalar maps");
    if (F.d_in != x.dim() || G.d_in != x.dim()) throw DimensionMismatch("gamma_bilinear: dimension mismatch");
    const Eigen::RowVectorXd gf = F.jacobian(x.value).row(0);
    const Eigen::RowVectorXd gg = G.jacobian(x.value).row(0);
    return gf * x.variance * gg.transpose();
}

double contraction_bound(std::span<const double> gammas) {
    double sum = 0.0;
    for (double g : gammas) {
        if (g < 0.0) throw InputError("contraction_bound: negative gamma");
        sum += std::sqrt(g);
    }
    return sum * sum;
}

} // namespace gammacalc
