#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "gammacalc/expr/ast.hpp"

namespace gammacalc::expr {

// Closed interval with infinite endpoints allowed. The convention 0 * inf = 0
// keeps products sound when one factor is exactly zero.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double point) : lo(point), hi(point) {}
    Interval(double l, double h) : lo(l), hi(h) {}

    static Interval whole() {
        const double inf = std::numeric_limits<double>::infinity();
        return {-inf, inf};
    }
    bool contains(double x) const { return lo <= x && x <= hi; }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); } // sup |x|
    double width() const { return hi - lo; }
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator-(Interval a);
Interval operator*(Interval a, Interval b);
Interval operator/(Interval a, Interval b);

Interval interval_sin(Interval u);
Interval interval_cos(Interval u);
Interval interval_exp(Interval u);
Interval interval_log(Interval u);
Interval interval_sqrt(Interval u);
Interval interval_abs(Interval u);
Interval interval_atan(Interval u);
Interval interval_min(Interval a, Interval b);
Interval interval_max(Interval a, Interval b);
Interval interval_pow_int(Interval u, long long k);
Interval interval_sq(Interval u); // tight square (handles 0-straddling)

// Upper bound on sup over the box of the Euclidean norm of the gradient.
// Infinite when a derivative is unbounded inside the box (log near 0, ...);
// never throws for domain issues.
double lipschitz_estimate(const ExprAst& ast, std::span<const Interval> box);

// Interval enclosure of the expression's value over the box.
Interval interval_value(const ExprAst& ast, std::span<const Interval> box);

} // namespace gammacalc::expr
