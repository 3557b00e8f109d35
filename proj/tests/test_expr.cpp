#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gammacalc/expr/ast.hpp"
#include "gammacalc/expr/interval.hpp"
#include "support/stats.hpp"

using namespace gammacalc;
using namespace gammacalc::expr;

namespace {

std::vector<std::string> names(std::initializer_list<const char*> list) {
    return std::vector<std::string>(list.begin(), list.end());
}

Eigen::VectorXd point(std::initializer_list<double> vals) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

} // namespace

TEST_CASE("product of two variables parses to the expected tree") {
    const auto ast = parse("v1*v2", names({"v1", "v2"}));
    REQUIRE(ast.root->kind == NodeKind::Binary);
    CHECK(ast.root->op == Op::Mul);
    CHECK(ast.root->children[0]->kind == NodeKind::Variable);
    CHECK(ast.root->children[1]->var_index == 1);
    CHECK(ast.c1);
}

TEST_CASE("pow binds tighter than mul and is right-associative") {
    const auto ast = parse("sin(x)+x*y^2", names({"x", "y"}));
    // top node is +, right child is *, whose right child is ^
    REQUIRE(ast.root->op == Op::Add);
    const auto& mul = *ast.root->children[1];
    REQUIRE(mul.op == Op::Mul);
    CHECK(mul.children[1]->op == Op::Pow);

    const auto tower = parse("2^3^2", names({}));
    CHECK(evaluate(tower, Eigen::VectorXd()) == doctest::Approx(512.0));

    const auto negpow = parse("-2^2", names({}));
    CHECK(evaluate(negpow, Eigen::VectorXd()) == doctest::Approx(-4.0)); // unary minus below pow
}

TEST_CASE("unknown identifier reported with its offset") {
    try {
        parse("v3", names({"v1", "v2"}));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::UnknownIdentifier);
        CHECK(e.offset == 0);
    }
}

TEST_CASE("lexical error carries the byte offset") {
    try {
        parse("x + $y", names({"x", "y"}));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::Lexical);
        CHECK(e.offset == 4);
    }
}

TEST_CASE("arity mismatch is its own error kind") {
    try {
        parse("min(x)", names({"x"}));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::ArityMismatch);
    }
}

TEST_CASE("print/parse round-trip yields an equal tree") {
    const char* corpus[] = {
        "v1*v2",      "sin(x)+x*y^2",       "exp(x*y)",          "-x^2+3/(y-5)",
        "min(x,y)+max(x,-y)", "abs(sin(sqrt(1+abs(x))))", "atan(x)/(1+y^2)", "pow(x,2)+log(2+x*x)",
        "1.5e-3*x-2.25", "x^-2",
    };
    for (const char* text : corpus) {
        CAPTURE(text);
        const auto ns = names({"v1", "v2", "x", "y"});
        const auto ast = parse(text, ns);
        const auto round = parse(to_string(ast), ns);
        CHECK(equal(ast, round));
    }
}

TEST_CASE("differentiate: bilinear form x*y") {
    const auto ast = parse("x*y", names({"x", "y"}));
    const auto d = differentiate(ast, point({2.0, 3.0}));
    CHECK(d.value == doctest::Approx(6.0));
    CHECK(d.gradient[0] == doctest::Approx(3.0));
    CHECK(d.gradient[1] == doctest::Approx(2.0));
    CHECK(d.hessian(0, 0) == doctest::Approx(0.0));
    CHECK(d.hessian(0, 1) == doctest::Approx(1.0));
    CHECK(d.hessian(1, 0) == doctest::Approx(1.0));
    CHECK(d.hessian(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("differentiate: sin at 0") {
    const auto ast = parse("sin(x)", names({"x"}));
    const auto d = differentiate(ast, point({0.0}));
    CHECK(d.value == doctest::Approx(0.0));
    CHECK(d.gradient[0] == doctest::Approx(1.0));
    CHECK(d.hessian(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("exp(x*y) derivatives match central finite differences") {
    const auto ast = parse("exp(x*y)", names({"x", "y"}));
    const Eigen::VectorXd x = point({1.0, 1.0});
    const auto d = differentiate(ast, x);
    const auto f = [&](const Eigen::VectorXd& p) { return evaluate(ast, p); };
    const Eigen::VectorXd g = testsupport::fd_gradient(f, x);
    const Eigen::MatrixXd h = testsupport::fd_hessian(f, x, 1e-4);
    CHECK((d.gradient - g).norm() / g.norm() < 1e-6);
    CHECK((d.hessian - h).norm() / h.norm() < 1e-6);
}

TEST_CASE("derivative corpus matches finite differences on random points") {
    struct Fixture {
        const char* text;
        int dim;
        double lo, hi;
    };
    const Fixture corpus[] = {
        {"x*y", 2, -2.0, 2.0},
        {"sin(x)+x*y^2", 2, -2.0, 2.0},
        {"exp(x*y)", 2, -1.5, 1.5},
        {"atan(x)/(1+y^2)", 2, -3.0, 3.0},
        {"log(3+x)+sqrt(4+y)", 2, -1.0, 1.0},
        {"x^3-2*x*y+y^2", 2, -2.0, 2.0},
        {"cos(x*y)+pow(1+x*x,2)", 2, -1.5, 1.5},
        {"1/(2+sin(x))", 1, -3.0, 3.0},
    };
    std::mt19937_64 rng(2024);
    const auto ns = names({"x", "y"});
    for (const auto& fx : corpus) {
        CAPTURE(fx.text);
        const auto ast = parse(fx.text, std::span(ns.data(), static_cast<std::size_t>(fx.dim)));
        std::uniform_real_distribution<double> unif(fx.lo, fx.hi);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd x(fx.dim);
            for (int i = 0; i < fx.dim; ++i) x[i] = unif(rng);
            const auto d = differentiate(ast, x);
            const auto f = [&](const Eigen::VectorXd& p) { return evaluate(ast, p); };
            const Eigen::VectorXd g = testsupport::fd_gradient(f, x, 1e-5);
            // second differences need a larger step to stay below 1e-6 relative
            const Eigen::MatrixXd h = testsupport::fd_hessian(f, x, 1e-4);
            CHECK((d.gradient - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
            CHECK((d.hessian - h).norm() <= 1e-6 * std::max(1.0, h.norm()));
            CHECK((d.hessian - d.hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("abs at 0 raises a domain error naming the node") {
    const auto ast = parse("abs(x)", names({"x"}));
    CHECK(evaluate(ast, point({0.0})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(differentiate(ast, point({0.0})), DomainError);
    const auto d = differentiate(ast, point({-2.0}));
    CHECK(d.gradient[0] == doctest::Approx(-1.0));
}

TEST_CASE("min/max ties are rejected for derivatives, fine for evaluation") {
    const auto ast = parse("min(x,y)", names({"x", "y"}));
    CHECK(evaluate(ast, point({1.0, 1.0})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(differentiate(ast, point({1.0, 1.0})), DomainError);
    CHECK(differentiate(ast, point({1.0, 2.0})).gradient[0] == doctest::Approx(1.0));
}

TEST_CASE("lipschitz bound: linear, sine, quadratic") {
    const auto ns = names({"x"});
    const Interval any{-5.0, 7.0};
    CHECK(lipschitz_estimate(parse("2*x", ns), {&any, 1}) == doctest::Approx(2.0));

    const Interval wide{-10.0, 10.0};
    const double sin_bound = lipschitz_estimate(parse("sin(x)", ns), {&wide, 1});
    CHECK(sin_bound >= 1.0);
    CHECK(sin_bound <= 1.0 + 1e-9);

    const Interval zero_three{0.0, 3.0};
    const double sq_bound = lipschitz_estimate(parse("x^2", ns), {&zero_three, 1});
    CHECK(sq_bound >= 6.0);
    CHECK(sq_bound <= 6.0 + 1e-9);
}

TEST_CASE("lipschitz bound: unbounded derivative reported as infinity, not thrown") {
    const auto ns = names({"x"});
    const Interval near_zero{0.0, 1.0};
    CHECK(std::isinf(lipschitz_estimate(parse("log(x)", ns), {&near_zero, 1})));
    const Interval crossing{-1.0, 1.0};
    CHECK(std::isinf(lipschitz_estimate(parse("1/x", ns), {&crossing, 1})));
}

TEST_CASE("lipschitz bound dominates sampled gradient norms") {
    const auto ns = names({"x", "y"});
    const char* corpus[] = {"sin(x)*cos(y)", "x^2-y^3", "exp(x/2)+atan(y)", "abs(x)+max(x,y)", "sqrt(4+x*x+y*y)"};
    std::mt19937_64 rng(77);
    for (const char* text : corpus) {
        CAPTURE(text);
        const auto ast = parse(text, ns);
        const Interval box[] = {{-2.0, 2.0}, {-1.0, 3.0}};
        const double bound = lipschitz_estimate(ast, box);
        std::uniform_real_distribution<double> ux(box[0].lo, box[0].hi), uy(box[1].lo, box[1].hi);
        for (int trial = 0; trial < 500; ++trial) {
            const Eigen::VectorXd x = point({ux(rng), uy(rng)});
            Eigen::VectorXd g;
            try {
                g = gradient(ast, x);
            } catch (const DomainError&) {
                continue; // kink: gradient undefined there, bound still valid
            }
            CHECK(g.norm() <= bound + 1e-9);
        }
    }
}

TEST_CASE("parser totality: random byte strings parse or raise a positioned error") {
    std::mt19937_64 rng(123456);
    std::uniform_int_distribution<int> len_dist(0, 40);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    std::uniform_int_distribution<int> charset(0, 2);
    const std::string tokens = "xy+-*/^(),.0123456789 sincoqrtabexplogmn_";
    const auto ns = names({"x", "y"});
    for (int trial = 0; trial < 20000; ++trial) {
        std::string text;
        const int len = len_dist(rng);
        const bool tokeny = charset(rng) > 0;
        for (int i = 0; i < len; ++i) {
            text.push_back(tokeny ? tokens[static_cast<std::size_t>(byte_dist(rng)) % tokens.size()]
                                  : static_cast<char>(byte_dist(rng)));
        }
        try {
            const auto ast = parse(text, ns);
            const auto round = parse(to_string(ast), ns);
            CHECK(equal(ast, round));
        } catch (const ParseError& e) {
            CHECK(e.offset <= text.size());
        }
    }
}

TEST_CASE("interval enclosure contains sampled values") {
    const auto ns = names({"x"});
    const auto ast = parse("sin(x)*x+cos(x)", ns);
    const Interval box{-2.0, 5.0};
    const Interval enclosure = interval_value(ast, {&box, 1});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(box.lo, box.hi);
    for (int trial = 0; trial < 300; ++trial) {
        const double v = evaluate(ast, point({unif(rng)}));
        CHECK(v >= enclosure.lo - 1e-12);
        CHECK(v <= enclosure.hi + 1e-12);
    }
}
