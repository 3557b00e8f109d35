#include <sstream>

#include "gammacalc/generator.hpp"

namespace gammacalc {

Eigen::MatrixXd GeneratorDescriptor::second_order_at(const Eigen::VectorXd& x, const ToleranceConfig& tol) const {
    Eigen::MatrixXd c = second_order(x);
    if (c.rows() != dim || c.cols() != dim) throw DimensionMismatch("generator coefficient field has wrong shape");
    if (max_asymmetry(c) > tol.symmetry) throw NotPositiveSemidefinite("generator coefficients not symmetric");
    return clamp_psd(c, tol, "generator second-order coefficients");
}

Eigen::VectorXd GeneratorDescriptor::drift_at(const Eigen::VectorXd& x) const {
    if (!drift) return Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd b = drift(x);
    if (static_cast<int>(b.size()) != dim) throw DimensionMismatch("generator drift field has wrong shape");
    return b;
}

GeneratorDescriptor make_generator(int dim, std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> second_order,
                                   std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift) {
    GeneratorDescriptor g;
    g.dim = dim;
    g.second_order = std::move(second_order);
    g.drift = std::move(drift);
    return g;
}

GeneratorDescriptor constant_generator(const Eigen::MatrixXd& c, const Eigen::VectorXd& drift) {
    const int dim = static_cast<int>(c.rows());
    Eigen::VectorXd b = drift.size() ? drift : Eigen::VectorXd::Zero(dim);
    return make_generator(
        dim, [c](const Eigen::VectorXd&) { return c; }, [b](const Eigen::VectorXd&) { return b; });
}

double apply_generator(const GeneratorDescriptor& L, const DifferentiableMap& phi, const Eigen::VectorXd& x) {
    if (phi.d_out != 1) throw DimensionMismatch("apply_generator expects a scalar map");
    if (phi.d_in != L.dim) throw DimensionMismatch("apply_generator: dimension mismatch");
    const Eigen::MatrixXd c = L.second_order_at(x);
    const Eigen::MatrixXd H = phi.hessian(x)[0];
    const Eigen::VectorXd g = phi.jacobian(x).row(0).transpose();
    return c.cwiseProduct(H).sum() + L.drift_at(x).dot(g);
}

GeneratorDescriptor transport_generator(const GeneratorDescriptor& L, const DifferentiableMap& u) {
    if (u.d_in != L.dim || u.d_out != L.dim) throw DimensionMismatch("transport_generator: map must be square over the generator's space");
    if (!u.has_hessian()) throw UnsupportedFunctional("transport_generator needs the map's Hessian for the drift");

    const auto pullback = [u](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return u.inverse ? u.inverse(y) : newton_inverse(u, y);
    };
    const auto check_jacobian = [](const Eigen::MatrixXd& J, const Eigen::VectorXd& x) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) {
            std::ostringstream msg;
            msg << "transport_generator: singular Jacobian at point (";
            for (Eigen::Index i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
            msg << ")";
            throw SingularJacobian(msg.str());
        }
    };

    GeneratorDescriptor out;
    out.dim = L.dim;
    out.second_order = [L, u, pullback, check_jacobian](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
        const Eigen::VectorXd x = pullback(y);
        const Eigen::MatrixXd J = u.jacobian(x);
        check_jacobian(J, x);
        return J * L.second_order_at(x) * J.transpose();
    };
    out.drift = [L, u, pullback, check_jacobian](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        const Eigen::VectorXd x = pullback(y);
        const Eigen::MatrixXd J = u.jacobian(x);
        check_jacobian(J, x);
        const Eigen::MatrixXd c = L.second_order_at(x);
        const Eigen::VectorXd b = L.drift_at(x);
        const auto H = u.hessian(x);
        Eigen::VectorXd bp(L.dim);
        for (int a = 0; a < L.dim; ++a)
            bp[a] = c.cwiseProduct(H[static_cast<std::size_t>(a)]).sum() + b.dot(J.row(a));
        return bp;
    };
    return out;
}

} // namespace gammacalc
