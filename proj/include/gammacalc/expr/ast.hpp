#pragma once
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gammacalc/errors.hpp"

namespace gammacalc::expr {

enum class NodeKind { Constant, Variable, Unary, Binary, Call };

enum class Op {
    Add, Sub, Mul, Div, Pow, // binary
    Neg,                     // unary
    Sin, Cos, Exp, Log, Sqrt, Abs, Atan, Min, Max, PowCall,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind = NodeKind::Constant;
    Op op = Op::Add;
    double constant = 0.0;
    int var_index = -1;
    std::string var_name;
    std::vector<NodePtr> children;
    std::size_t offset = 0; // byte offset in the source text
};

struct ExprAst {
    NodePtr root;
    std::vector<std::string> input_names;
    bool c1 = true; // false when the tree contains abs/min/max

    int n_inputs() const { return static_cast<int>(input_names.size()); }
};

enum class ParseErrorKind { Lexical, Syntax, UnknownIdentifier, ArityMismatch };

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t offset, const std::string& msg)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), kind(kind), offset(offset) {}
    ParseErrorKind kind;
    std::size_t offset;
};

// Forward-mode carrier: value, gradient and (symmetric) Hessian at a point.
struct DualTriple {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

ExprAst parse(std::string_view text, std::span<const std::string> input_names);
std::string to_string(const ExprAst& ast);
bool equal(const ExprAst& a, const ExprAst& b);

double evaluate(const ExprAst& ast, const Eigen::VectorXd& point);
// Value + exact gradient at `point` (abs/min/max allowed away from their kinks).
Eigen::VectorXd gradient(const ExprAst& ast, const Eigen::VectorXd& point);
// Value + exact gradient + exact Hessian; requires every node C2 at the point.
DualTriple differentiate(const ExprAst& ast, const Eigen::VectorXd& point);

} // namespace gammacalc::expr
