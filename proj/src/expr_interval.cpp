#include <numbers>
#include <vector>

#include "gammacalc/expr/interval.hpp"

namespace gammacalc::expr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0; // 0 * inf := 0
    return a * b;
}

} // namespace

Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

Interval operator*(Interval a, Interval b) {
    const double p1 = guarded_mul(a.lo, b.lo);
    const double p2 = guarded_mul(a.lo, b.hi);
    const double p3 = guarded_mul(a.hi, b.lo);
    const double p4 = guarded_mul(a.hi, b.hi);
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

Interval operator/(Interval a, Interval b) {
    if (b.contains(0.0)) return Interval::whole();
    return a * Interval{1.0 / b.hi, 1.0 / b.lo};
}

Interval interval_cos(Interval u) {
    if (!(std::isfinite(u.lo) && std::isfinite(u.hi)) || u.width() >= 2.0 * std::numbers::pi) return {-1.0, 1.0};
    double lo = std::min(std::cos(u.lo), std::cos(u.hi));
    double hi = std::max(std::cos(u.lo), std::cos(u.hi));
    // hit of a maximum (2k*pi) or minimum ((2k+1)*pi) inside the interval
    const double two_pi = 2.0 * std::numbers::pi;
    if (std::floor(u.hi / two_pi) * two_pi >= u.lo) hi = 1.0;
    if ((std::floor((u.hi - std::numbers::pi) / two_pi)) * two_pi + std::numbers::pi >= u.lo) lo = -1.0;
    return {lo, hi};
}

Interval interval_sin(Interval u) { return interval_cos(u - Interval{std::numbers::pi / 2.0}); }

Interval interval_exp(Interval u) { return {std::exp(u.lo), std::exp(u.hi)}; }

Interval interval_log(Interval u) {
    if (u.hi <= 0.0) return Interval::whole(); // expression leaves its domain on the box
    const double lo = u.lo > 0.0 ? std::log(u.lo) : -kInf;
    return {lo, std::log(u.hi)};
}

Interval interval_sqrt(Interval u) {
    if (u.hi < 0.0) return Interval::whole();
    return {u.lo > 0.0 ? std::sqrt(u.lo) : 0.0, std::sqrt(u.hi)};
}

Interval interval_abs(Interval u) {
    if (u.lo >= 0.0) return u;
    if (u.hi <= 0.0) return -u;
    return {0.0, u.mag()};
}

Interval interval_atan(Interval u) { return {std::atan(u.lo), std::atan(u.hi)}; }

Interval interval_min(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }
Interval interval_max(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Interval interval_sq(Interval u) {
    const Interval a = interval_abs(u);
    return {a.lo * a.lo, a.hi * a.hi};
}

Interval interval_pow_int(Interval u, long long k) {
    if (k == 0) return {1.0, 1.0};
    if (k < 0) return Interval{1.0, 1.0} / interval_pow_int(u, -k);
    if (k % 2 == 0) {
        const Interval a = interval_abs(u);
        return {std::pow(a.lo, static_cast<double>(k)), std::pow(a.hi, static_cast<double>(k))};
    }
    return {std::pow(u.lo, static_cast<double>(k)), std::pow(u.hi, static_cast<double>(k))};
}

namespace {

struct IntervalDual {
    Interval v;
    std::vector<Interval> g;
};

IntervalDual constant_dual(Interval v, std::size_t dim) { return {v, std::vector<Interval>(dim, Interval{0.0})}; }

IntervalDual chain_dual(const IntervalDual& u, Interval value, Interval deriv) {
    IntervalDual r;
    r.v = value;
    r.g.reserve(u.g.size());
    for (const auto& gi : u.g) r.g.push_back(deriv * gi);
    return r;
}

bool integer_exponent(double k) { return std::isfinite(k) && k == std::floor(k) && std::abs(k) < 1e9; }

IntervalDual eval(const Node& n, std::span<const Interval> box);

IntervalDual pow_dual(const IntervalDual& u, const Node& exponent, std::span<const Interval> box) {
    if (exponent.kind == NodeKind::Constant && integer_exponent(exponent.constant)) {
        const long long k = static_cast<long long>(exponent.constant);
        const Interval value = interval_pow_int(u.v, k);
        const Interval deriv = Interval{static_cast<double>(k)} * interval_pow_int(u.v, k - 1);
        return chain_dual(u, value, deriv);
    }
    // general case via exp(w * log(u)); unbounded when the base can reach 0
    const IntervalDual w = eval(exponent, box);
    const Interval lnu = interval_log(u.v);
    IntervalDual t;
    t.v = w.v * lnu;
    const Interval dlnu = Interval{1.0} / u.v;
    t.g.reserve(u.g.size());
    for (std::size_t i = 0; i < u.g.size(); ++i) t.g.push_back(w.g[i] * lnu + w.v * dlnu * u.g[i]);
    const Interval e = interval_exp(t.v);
    return chain_dual(t, e, e);
}

IntervalDual eval(const Node& n, std::span<const Interval> box) {
    switch (n.kind) {
        case NodeKind::Constant: return constant_dual(Interval{n.constant}, box.size());
        case NodeKind::Variable: {
            IntervalDual d = constant_dual(box[static_cast<std::size_t>(n.var_index)], box.size());
            d.g[static_cast<std::size_t>(n.var_index)] = Interval{1.0};
            return d;
        }
        case NodeKind::Unary: {
            IntervalDual u = eval(*n.children[0], box);
            u.v = -u.v;
            for (auto& gi : u.g) gi = -gi;
            return u;
        }
        case NodeKind::Binary: {
            const IntervalDual a = eval(*n.children[0], box);
            if (n.op == Op::Pow) return pow_dual(a, *n.children[1], box);
            const IntervalDual b = eval(*n.children[1], box);
            IntervalDual r;
            r.g.resize(box.size());
            switch (n.op) {
                case Op::Add:
                    r.v = a.v + b.v;
                    for (std::size_t i = 0; i < box.size(); ++i) r.g[i] = a.g[i] + b.g[i];
                    return r;
                case Op::Sub:
                    r.v = a.v - b.v;
                    for (std::size_t i = 0; i < box.size(); ++i) r.g[i] = a.g[i] - b.g[i];
                    return r;
                case Op::Mul:
                    r.v = a.v * b.v;
                    for (std::size_t i = 0; i < box.size(); ++i) r.g[i] = a.g[i] * b.v + b.g[i] * a.v;
                    return r;
                case Op::Div: {
                    r.v = a.v / b.v;
                    const Interval inv = Interval{1.0} / b.v;
                    const Interval inv2 = interval_sq(inv);
                    for (std::size_t i = 0; i < box.size(); ++i) r.g[i] = a.g[i] * inv - a.v * b.g[i] * inv2;
                    return r;
                }
                default: break;
            }
            break;
        }
        case NodeKind::Call: {
            const IntervalDual u = eval(*n.children[0], box);
            switch (n.op) {
                case Op::Sin: return chain_dual(u, interval_sin(u.v), interval_cos(u.v));
                case Op::Cos: return chain_dual(u, interval_cos(u.v), -interval_sin(u.v));
                case Op::Exp: {
                    const Interval e = interval_exp(u.v);
                    return chain_dual(u, e, e);
                }
                case Op::Log: return chain_dual(u, interval_log(u.v), Interval{1.0} / u.v);
                case Op::Sqrt: {
                    const Interval s = interval_sqrt(u.v);
                    const Interval deriv = u.v.lo > 0.0 ? Interval{0.5} / s : Interval::whole();
                    return chain_dual(u, s, deriv);
                }
                case Op::Atan: {
                    const Interval d = Interval{1.0} + interval_sq(u.v);
                    return chain_dual(u, interval_atan(u.v), Interval{1.0} / d);
                }
                case Op::Abs: {
                    Interval sign{-1.0, 1.0};
                    if (u.v.lo > 0.0) sign = Interval{1.0};
                    else if (u.v.hi < 0.0) sign = Interval{-1.0};
                    return chain_dual(u, interval_abs(u.v), sign);
                }
                case Op::Min:
                case Op::Max: {
                    const IntervalDual w = eval(*n.children[1], box);
                    const bool is_min = n.op == Op::Min;
                    // branch resolved over the whole box when value intervals are disjoint
                    if (is_min ? u.v.hi < w.v.lo : u.v.lo > w.v.hi) return u;
                    if (is_min ? w.v.hi < u.v.lo : w.v.lo > u.v.hi) return w;
                    IntervalDual r;
                    r.v = is_min ? interval_min(u.v, w.v) : interval_max(u.v, w.v);
                    r.g.resize(box.size());
                    for (std::size_t i = 0; i < box.size(); ++i) {
                        r.g[i] = {std::min(u.g[i].lo, w.g[i].lo), std::max(u.g[i].hi, w.g[i].hi)};
                    }
                    return r;
                }
                case Op::PowCall: return pow_dual(u, *n.children[1], box);
                default: break;
            }
            break;
        }
    }
    return constant_dual(Interval::whole(), box.size());
}

} // namespace

Interval interval_value(const ExprAst& ast, std::span<const Interval> box) {
    if (static_cast<int>(box.size()) != ast.n_inputs())
        throw DimensionMismatch("box dimension does not match expression inputs");
    return eval(*ast.root, box).v;
}

double lipschitz_estimate(const ExprAst& ast, std::span<const Interval> box) {
    if (static_cast<int>(box.size()) != ast.n_inputs())
        throw DimensionMismatch("box dimension does not match expression inputs");
    for (const auto& b : box) {
        if (!(std::isfinite(b.lo) && std::isfinite(b.hi)) || b.lo > b.hi)
            throw InputError("lipschitz_estimate requires a bounded box");
    }
    const IntervalDual d = eval(*ast.root, box);
    double sum_sq = 0.0;
    for (const auto& gi : d.g) {
        const double m = gi.mag();
        if (!std::isfinite(m)) return kInf;
        sum_sq += m * m;
    }
    return std::sqrt(sum_sq);
}

} // namespace gammacalc::expr
