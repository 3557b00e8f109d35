#include <sstream>

#include "gammacalc/differentiable_map.hpp"

namespace gammacalc {

DifferentiableMap identity_map(int dim) {
    DifferentiableMap m;
    m.d_in = m.d_out = dim;
    m.eval = [](const Eigen::VectorXd& x) { return x; };
    m.jacobian = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(dim, dim); };
    m.hessian = [dim](const Eigen::VectorXd&) {
        return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(dim), Eigen::MatrixXd::Zero(dim, dim));
    };
    m.lipschitz_constant = 1.0;
    m.inverse = [](const Eigen::VectorXd& y) { return y; };
    return m;
}

DifferentiableMap constant_map(int d_in, const Eigen::VectorXd& value) {
    DifferentiableMap m;
    m.d_in = d_in;
    m.d_out = static_cast<int>(value.size());
    m.eval = [value](const Eigen::VectorXd&) { return value; };
    m.jacobian = [d_in, d_out = m.d_out](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(d_out, d_in); };
    m.hessian = [d_in, d_out = m.d_out](const Eigen::VectorXd&) {
        return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(d_out), Eigen::MatrixXd::Zero(d_in, d_in));
    };
    m.lipschitz_constant = 0.0;
    return m;
}

DifferentiableMap linear_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    DifferentiableMap m;
    m.d_in = static_cast<int>(A.cols());
    m.d_out = static_cast<int>(A.rows());
    Eigen::VectorXd shift = b.size() ? b : Eigen::VectorXd::Zero(m.d_out);
    if (static_cast<int>(shift.size()) != m.d_out) throw DimensionMismatch("linear_map: shift dimension mismatch");
    m.eval = [A, shift](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x + shift; };
    m.jacobian = [A](const Eigen::VectorXd&) { return A; };
    m.hessian = [d_in = m.d_in, d_out = m.d_out](const Eigen::VectorXd&) {
        return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(d_out), Eigen::MatrixXd::Zero(d_in, d_in));
    };
    m.lipschitz_constant = A.operatorNorm();
    if (A.rows() == A.cols()) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (lu.isInvertible()) {
            Eigen::MatrixXd Ainv = lu.inverse();
            m.inverse = [Ainv, shift](const Eigen::VectorXd& y) -> Eigen::VectorXd { return Ainv * (y - shift); };
        }
    }
    return m;
}

DifferentiableMap compose(const DifferentiableMap& outer, const DifferentiableMap& inner) {
    if (outer.d_in != inner.d_out) throw DimensionMismatch("compose: inner output dimension != outer input dimension");
    DifferentiableMap m;
    m.d_in = inner.d_in;
    m.d_out = outer.d_out;
    m.eval = [outer, inner](const Eigen::VectorXd& x) { return outer.eval(inner.eval(x)); };
    m.jacobian = [outer, inner](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        const Eigen::VectorXd u = inner.eval(x);
        return outer.jacobian(u) * inner.jacobian(x);
    };
    if (outer.has_hessian() && inner.has_hessian()) {
        m.hessian = [outer, inner](const Eigen::VectorXd& x) {
            const Eigen::VectorXd u = inner.eval(x);
            const Eigen::MatrixXd Ji = inner.jacobian(x);
            const Eigen::MatrixXd Jo = outer.jacobian(u);
            const auto Hi = inner.hessian(x);
            const auto Ho = outer.hessian(u);
            std::vector<Eigen::MatrixXd> H(static_cast<std::size_t>(outer.d_out));
            for (int k = 0; k < outer.d_out; ++k) {
                Eigen::MatrixXd Hk = Ji.transpose() * Ho[static_cast<std::size_t>(k)] * Ji;
                for (int a = 0; a < outer.d_in; ++a) Hk += Jo(k, a) * Hi[static_cast<std::size_t>(a)];
                H[static_cast<std::size_t>(k)] = Hk;
            }
            return H;
        };
    }
    m.hessian_exact = outer.hessian_exact && inner.hessian_exact;
    if (outer.lipschitz_constant && inner.lipschitz_constant)
        m.lipschitz_constant = *outer.lipschitz_constant * *inner.lipschitz_constant;
    if (outer.inverse && inner.inverse) {
        m.inverse = [oi = outer.inverse, ii = inner.inverse](const Eigen::VectorXd& y) { return ii(oi(y)); };
    }
    return m;
}

DifferentiableMap map_from_expressions(std::span<const expr::ExprAst> outputs) {
    if (outputs.empty()) throw InputError("map_from_expressions: no outputs");
    const int d_in = outputs[0].n_inputs();
    for (const auto& ast : outputs)
        if (ast.n_inputs() != d_in) throw DimensionMismatch("expressions disagree on the number of inputs");
    std::vector<expr::ExprAst> asts(outputs.begin(), outputs.end());
    DifferentiableMap m;
    m.d_in = d_in;
    m.d_out = static_cast<int>(asts.size());
    m.eval = [asts](const Eigen::VectorXd& x) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(asts.size()));
        for (std::size_t k = 0; k < asts.size(); ++k) v[static_cast<Eigen::Index>(k)] = expr::evaluate(asts[k], x);
        return v;
    };
    m.jacobian = [asts, d_in](const Eigen::VectorXd& x) {
        Eigen::MatrixXd J(static_cast<Eigen::Index>(asts.size()), d_in);
        for (std::size_t k = 0; k < asts.size(); ++k) J.row(static_cast<Eigen::Index>(k)) = expr::gradient(asts[k], x).transpose();
        return J;
    };
    m.hessian = [asts](const Eigen::VectorXd& x) {
        std::vector<Eigen::MatrixXd> H;
        H.reserve(asts.size());
        for (const auto& ast : asts) H.push_back(expr::differentiate(ast, x).hessian);
        return H;
    };
    for (const auto& ast : asts)
        if (!ast.c1) m.hessian_exact = false; // kinks: Hessian only away from them
    return m;
}

DifferentiableMap map_from_expression(const expr::ExprAst& single) { return map_from_expressions({&single, 1}); }

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            int d_out, double h) {
    Eigen::MatrixXd J(d_out, x.size());
    Eigen::VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        J.col(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return J;
}

std::vector<Eigen::MatrixXd> fd_hessian(const DifferentiableMap& map, const Eigen::VectorXd& x, double h) {
    map.check_input(x);
    const int d = map.d_in;
    std::vector<Eigen::MatrixXd> H(static_cast<std::size_t>(map.d_out), Eigen::MatrixXd::Zero(d, d));
    Eigen::VectorXd xp = x, xm = x;
    for (int i = 0; i < d; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const Eigen::MatrixXd Jp = map.jacobian(xp);
        const Eigen::MatrixXd Jm = map.jacobian(xm);
        const Eigen::MatrixXd col = (Jp - Jm) / (2.0 * h); // d_out x d_in, derivative of J wrt x_i
        for (int k = 0; k < map.d_out; ++k)
            H[static_cast<std::size_t>(k)].col(i) = col.row(k).transpose();
        xp[i] = x[i];
        xm[i] = x[i];
    }
    for (auto& Hk : H) Hk = ((Hk + Hk.transpose()) / 2.0).eval();
    return H;
}

void attach_fd_hessian(DifferentiableMap& map, double h) {
    DifferentiableMap base = map;
    base.hessian = nullptr;
    map.hessian = [base, h](const Eigen::VectorXd& x) { return fd_hessian(base, x, h); };
    map.hessian_exact = false;
}

Eigen::VectorXd newton_inverse(const DifferentiableMap& map, const Eigen::VectorXd& y, std::optional<Eigen::VectorXd> guess,
                               double tol, int max_iter) {
    if (map.d_in != map.d_out) throw DimensionMismatch("newton_inverse requires a square map");
    Eigen::VectorXd x = guess.value_or(y);
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd r = map.eval(x) - y;
        if (r.lpNorm<Eigen::Infinity>() < tol) return x;
        const Eigen::MatrixXd J = map.jacobian(x);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) {
            std::ostringstream msg;
            msg << "singular Jacobian at point (";
            for (Eigen::Index i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
            msg << ")";
            throw SingularJacobian(msg.str());
        }
        Eigen::VectorXd step = lu.solve(r);
        // damped step for robustness far from the solution
        double lambda = 1.0;
        for (int half = 0; half < 30; ++half) {
            const Eigen::VectorXd xn = x - lambda * step;
            if ((map.eval(xn) - y).norm() < r.norm() || lambda < 1e-6) {
                x = xn;
                break;
            }
            lambda *= 0.5;
        }
    }
    if ((map.eval(x) - y).lpNorm<Eigen::Infinity>() < 1e-8) return x;
    throw NumericalFailure("newton_inverse did not converge");
}

DifferentiableMap inverse_map(const DifferentiableMap& map) {
    if (map.d_in != map.d_out) throw DimensionMismatch("inverse_map requires a square map");
    DifferentiableMap inv;
    inv.d_in = inv.d_out = map.d_in;
    auto solve = map.inverse ? map.inverse
                             : std::function<Eigen::VectorXd(const Eigen::VectorXd&)>(
                                   [map](const Eigen::VectorXd& y) { return newton_inverse(map, y); });
    inv.eval = solve;
    inv.jacobian = [map, solve](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
        const Eigen::VectorXd x = solve(y);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(map.jacobian(x));
        if (!lu.isInvertible()) throw SingularJacobian("inverse_map: singular Jacobian of the forward map");
        return lu.inverse();
    };
    if (map.has_hessian()) {
        // Hess of v = u^{-1}: Hv_k = -sum_m (Jv)_{km} Jv^T Hu_m Jv
        inv.hessian = [map, solve](const Eigen::VectorXd& y) {
            const Eigen::VectorXd x = solve(y);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(map.jacobian(x));
            if (!lu.isInvertible()) throw SingularJacobian("inverse_map: singular Jacobian of the forward map");
            const Eigen::MatrixXd Jv = lu.inverse();
            const auto Hu = map.hessian(x);
            const int d = static_cast<int>(y.size());
            std::vector<Eigen::MatrixXd> H(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(d, d));
            for (int k = 0; k < d; ++k) {
                Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
                for (int mI = 0; mI < d; ++mI) acc += Jv(k, mI) * Hu[static_cast<std::size_t>(mI)];
                H[static_cast<std::size_t>(k)] = -(Jv.transpose() * acc * Jv);
            }
            return H;
        };
    }
    inv.hessian_exact = map.hessian_exact;
    inv.inverse = map.eval;
    return inv;
}

} // namespace gammacalc
