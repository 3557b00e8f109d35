#include <cmath>
#include <sstream>

#include "gammacalc/expr/ast.hpp"

namespace gammacalc::expr {

namespace {

[[noreturn]] void domain_error(const Node& n, const std::string& why) {
    std::ostringstream msg;
    msg << "domain error in '" << (n.var_name.empty() ? "operator" : n.var_name) << "' node at byte " << n.offset << ": " << why;
    throw DomainError(msg.str());
}

bool integer_exponent(double k) { return std::isfinite(k) && k == std::floor(k) && std::abs(k) < 1e9; }

double eval_node(const Node& n, const Eigen::VectorXd& x);

double eval_call(const Node& n, const Eigen::VectorXd& x) {
    const double u = eval_node(*n.children[0], x);
    switch (n.op) {
        case Op::Sin: return std::sin(u);
        case Op::Cos: return std::cos(u);
        case Op::Exp: return std::exp(u);
        case Op::Atan: return std::atan(u);
        case Op::Abs: return std::abs(u);
        case Op::Log:
            if (u <= 0.0) domain_error(n, "log of a nonpositive argument");
            return std::log(u);
        case Op::Sqrt:
            if (u < 0.0) domain_error(n, "sqrt of a negative argument");
            return std::sqrt(u);
        case Op::Min: return std::min(u, eval_node(*n.children[1], x));
        case Op::Max: return std::max(u, eval_node(*n.children[1], x));
        case Op::PowCall: {
            const double w = eval_node(*n.children[1], x);
            if (u < 0.0 && !integer_exponent(w)) domain_error(n, "negative base with non-integer exponent");
            if (u == 0.0 && w < 0.0) domain_error(n, "zero base with negative exponent");
            return std::pow(u, w);
        }
        default: break;
    }
    domain_error(n, "unhandled function");
}

double eval_node(const Node& n, const Eigen::VectorXd& x) {
    switch (n.kind) {
        case NodeKind::Constant: return n.constant;
        case NodeKind::Variable: return x[n.var_index];
        case NodeKind::Unary: return -eval_node(*n.children[0], x);
        case NodeKind::Binary: {
            const double a = eval_node(*n.children[0], x);
            const double b = eval_node(*n.children[1], x);
            switch (n.op) {
                case Op::Add: return a + b;
                case Op::Sub: return a - b;
                case Op::Mul: return a * b;
                case Op::Div: return a / b;
                case Op::Pow:
                    if (a < 0.0 && !integer_exponent(b)) domain_error(n, "negative base with non-integer exponent");
                    if (a == 0.0 && b < 0.0) domain_error(n, "zero base with negative exponent");
                    return std::pow(a, b);
                default: break;
            }
            break;
        }
        case NodeKind::Call: return eval_call(n, x);
    }
    domain_error(n, "unhandled node");
}

// Forward-mode carrier. Order 1 tracks the gradient, order 2 also the Hessian.
template <int Order>
struct Dual {
    double v = 0.0;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;

    static Dual constant(double c, int dim) {
        Dual d;
        d.v = c;
        d.g = Eigen::VectorXd::Zero(dim);
        if constexpr (Order == 2) d.h = Eigen::MatrixXd::Zero(dim, dim);
        return d;
    }
    static Dual variable(double value, int index, int dim) {
        Dual d = constant(value, dim);
        d.v = value;
        d.g[index] = 1.0;
        return d;
    }
};

template <int Order>
Dual<Order> add(const Dual<Order>& a, const Dual<Order>& b) {
    Dual<Order> r;
    r.v = a.v + b.v;
    r.g = a.g + b.g;
    if constexpr (Order == 2) r.h = a.h + b.h;
    return r;
}

template <int Order>
Dual<Order> sub(const Dual<Order>& a, const Dual<Order>& b) {
    Dual<Order> r;
    r.v = a.v - b.v;
    r.g = a.g - b.g;
    if constexpr (Order == 2) r.h = a.h - b.h;
    return r;
}

template <int Order>
Dual<Order> neg(const Dual<Order>& a) {
    Dual<Order> r;
    r.v = -a.v;
    r.g = -a.g;
    if constexpr (Order == 2) r.h = -a.h;
    return r;
}

template <int Order>
Dual<Order> mul(const Dual<Order>& a, const Dual<Order>& b) {
    Dual<Order> r;
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    if constexpr (Order == 2) r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}

template <int Order>
Dual<Order> div(const Dual<Order>& a, const Dual<Order>& b) {
    Dual<Order> r;
    r.v = a.v / b.v;
    r.g = (a.g - r.v * b.g) / b.v;
    if constexpr (Order == 2) r.h = (a.h - r.v * b.h - r.g * b.g.transpose() - b.g * r.g.transpose()) / b.v;
    return r;
}

// f(u) for scalar f with derivatives f1 = f'(u.v), f2 = f''(u.v).
template <int Order>
Dual<Order> chain(const Dual<Order>& u, double f0, double f1, double f2) {
    Dual<Order> r;
    r.v = f0;
    r.g = f1 * u.g;
    if constexpr (Order == 2) r.h = f1 * u.h + f2 * u.g * u.g.transpose();
    return r;
}

template <int Order>
Dual<Order> eval_dual(const Node& n, const Eigen::VectorXd& x);

template <int Order>
Dual<Order> pow_general(const Node& n, const Dual<Order>& u, const Dual<Order>& w) {
    if (u.v <= 0.0) domain_error(n, "variable exponent requires a positive base");
    const Dual<Order> lnu = chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
    const Dual<Order> t = mul(w, lnu);
    const double e = std::exp(t.v);
    return chain(t, e, e, e);
}

template <int Order>
Dual<Order> pow_dual(const Node& n, const Dual<Order>& u, const Node& exponent, const Eigen::VectorXd& x) {
    if (exponent.kind == NodeKind::Constant) {
        const double k = exponent.constant;
        if (integer_exponent(k)) {
            if (u.v == 0.0 && k < 2.0 && k != 0.0 && k != 1.0) domain_error(n, "zero base with exponent below 2");
            return chain(u, std::pow(u.v, k), k * std::pow(u.v, k - 1.0), k * (k - 1.0) * std::pow(u.v, k - 2.0));
        }
        if (u.v <= 0.0) domain_error(n, "non-integer exponent requires a positive base");
        return chain(u, std::pow(u.v, k), k * std::pow(u.v, k - 1.0), k * (k - 1.0) * std::pow(u.v, k - 2.0));
    }
    return pow_general(n, u, eval_dual<Order>(exponent, x));
}

template <int Order>
Dual<Order> eval_dual(const Node& n, const Eigen::VectorXd& x) {
    const int dim = static_cast<int>(x.size());
    switch (n.kind) {
        case NodeKind::Constant: return Dual<Order>::constant(n.constant, dim);
        case NodeKind::Variable: return Dual<Order>::variable(x[n.var_index], n.var_index, dim);
        case NodeKind::Unary: return neg(eval_dual<Order>(*n.children[0], x));
        case NodeKind::Binary: {
            const Dual<Order> a = eval_dual<Order>(*n.children[0], x);
            switch (n.op) {
                case Op::Add: return add(a, eval_dual<Order>(*n.children[1], x));
                case Op::Sub: return sub(a, eval_dual<Order>(*n.children[1], x));
                case Op::Mul: return mul(a, eval_dual<Order>(*n.children[1], x));
                case Op::Div: {
                    const Dual<Order> b = eval_dual<Order>(*n.children[1], x);
                    if (b.v == 0.0) domain_error(n, "division by zero");
                    return div(a, b);
                }
                case Op::Pow: return pow_dual(n, a, *n.children[1], x);
                default: break;
            }
            break;
        }
        case NodeKind::Call: {
            const Dual<Order> u = eval_dual<Order>(*n.children[0], x);
            switch (n.op) {
                case Op::Sin: return chain(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v));
                case Op::Cos: return chain(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v));
                case Op::Exp: {
                    const double e = std::exp(u.v);
                    return chain(u, e, e, e);
                }
                case Op::Atan: {
                    const double d = 1.0 + u.v * u.v;
                    return chain(u, std::atan(u.v), 1.0 / d, -2.0 * u.v / (d * d));
                }
                case Op::Log:
                    if (u.v <= 0.0) domain_error(n, "log of a nonpositive argument");
                    return chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
                case Op::Sqrt: {
                    if (u.v <= 0.0) domain_error(n, "sqrt requires a positive argument for derivatives");
                    const double s = std::sqrt(u.v);
                    return chain(u, s, 0.5 / s, -0.25 / (s * u.v));
                }
                case Op::Abs:
                    if (u.v == 0.0) domain_error(n, "abs is not differentiable at 0");
                    return u.v > 0.0 ? u : neg(u);
                case Op::Min:
                case Op::Max: {
                    const Dual<Order> w = eval_dual<Order>(*n.children[1], x);
                    if (u.v == w.v) domain_error(n, "min/max tie is not differentiable");
                    const bool first = (n.op == Op::Min) == (u.v < w.v);
                    return first ? u : w;
                }
                case Op::PowCall: return pow_dual(n, u, *n.children[1], x);
                default: break;
            }
            break;
        }
    }
    domain_error(n, "unhandled node");
}

void check_point(const ExprAst& ast, const Eigen::VectorXd& point) {
    if (static_cast<int>(point.size()) != ast.n_inputs())
        throw DimensionMismatch("expression over " + std::to_string(ast.n_inputs()) + " inputs evaluated at a point of dimension " +
                                std::to_string(point.size()));
}

} // namespace

double evaluate(const ExprAst& ast, const Eigen::VectorXd& point) {
    check_point(ast, point);
    return eval_node(*ast.root, point);
}

Eigen::VectorXd gradient(const ExprAst& ast, const Eigen::VectorXd& point) {
    check_point(ast, point);
    return eval_dual<1>(*ast.root, point).g;
}

DualTriple differentiate(const ExprAst& ast, const Eigen::VectorXd& point) {
    check_point(ast, point);
    const Dual<2> d = eval_dual<2>(*ast.root, point);
    return DualTriple{d.v, d.g, d.h};
}

} // namespace gammacalc::expr
