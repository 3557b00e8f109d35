#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "gammacalc/expr/ast.hpp"

namespace gammacalc::expr {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    double number = 0.0;
    std::string text;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= src_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        const char c = src_[pos_];
        switch (c) {
            case '+': tok_.kind = Tok::Plus; ++pos_; return;
            case '-': tok_.kind = Tok::Minus; ++pos_; return;
            case '*': tok_.kind = Tok::Star; ++pos_; return;
            case '/': tok_.kind = Tok::Slash; ++pos_; return;
            case '^': tok_.kind = Tok::Caret; ++pos_; return;
            case '(': tok_.kind = Tok::LParen; ++pos_; return;
            case ')': tok_.kind = Tok::RParen; ++pos_; return;
            case ',': tok_.kind = Tok::Comma; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
            tok_.kind = Tok::Ident;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        throw ParseError(ParseErrorKind::Lexical, pos_, std::string("unexpected character '") + c + "'");
    }

    void lex_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // 'e' belongs to a following identifier, not this literal
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        tok_.number = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || !std::isfinite(tok_.number))
            throw ParseError(ParseErrorKind::Lexical, start, "malformed number '" + text + "'");
        tok_.kind = Tok::Number;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_;
};

struct FunctionInfo {
    Op op;
    int arity;
    bool c1; // smooth in the C1-cap-Lip functional-calculus sense
};

const FunctionInfo* lookup_function(const std::string& name) {
    static const std::pair<const char*, FunctionInfo> table[] = {
        {"sin", {Op::Sin, 1, true}},   {"cos", {Op::Cos, 1, true}},
        {"exp", {Op::Exp, 1, true}},   {"log", {Op::Log, 1, true}},
        {"sqrt", {Op::Sqrt, 1, true}}, {"abs", {Op::Abs, 1, false}},
        {"atan", {Op::Atan, 1, true}}, {"min", {Op::Min, 2, false}},
        {"max", {Op::Max, 2, false}},  {"pow", {Op::PowCall, 2, true}},
    };
    for (const auto& [key, info] : table)
        if (name == key) return &info;
    return nullptr;
}

class Parser {
public:
    Parser(std::string_view src, std::span<const std::string> names) : lexer_(src), names_(names) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        const Token& t = lexer_.peek();
        if (t.kind != Tok::End)
            throw ParseError(ParseErrorKind::Syntax, t.offset, "unexpected trailing input");
        return e;
    }

    bool saw_non_c1() const { return saw_non_c1_; }

private:
    static constexpr int kMaxDepth = 256;

    NodePtr parse_expr() {
        DepthGuard guard(*this);
        NodePtr lhs = parse_term();
        for (;;) {
            const Token& t = lexer_.peek();
            if (t.kind == Tok::Plus || t.kind == Tok::Minus) {
                Token op = lexer_.take();
                NodePtr rhs = parse_term();
                lhs = binary(op.kind == Tok::Plus ? Op::Add : Op::Sub, lhs, rhs, op.offset);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        DepthGuard guard(*this);
        NodePtr lhs = parse_unary();
        for (;;) {
            const Token& t = lexer_.peek();
            if (t.kind == Tok::Star || t.kind == Tok::Slash) {
                Token op = lexer_.take();
                NodePtr rhs = parse_unary();
                lhs = binary(op.kind == Tok::Star ? Op::Mul : Op::Div, lhs, rhs, op.offset);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        DepthGuard guard(*this);
        const Token& t = lexer_.peek();
        if (t.kind == Tok::Minus) {
            Token op = lexer_.take();
            NodePtr child = parse_unary();
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Unary;
            n->op = Op::Neg;
            n->children = {child};
            n->offset = op.offset;
            return n;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        DepthGuard guard(*this);
        NodePtr base = parse_primary();
        const Token& t = lexer_.peek();
        if (t.kind == Tok::Caret) {
            Token op = lexer_.take();
            NodePtr exponent = parse_unary(); // right-associative, binds tighter than unary minus on the left
            return binary(Op::Pow, base, exponent, op.offset);
        }
        return base;
    }

    NodePtr parse_primary() {
        DepthGuard guard(*this);
        Token t = lexer_.take();
        switch (t.kind) {
            case Tok::Number: {
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Constant;
                n->constant = t.number;
                n->offset = t.offset;
                return n;
            }
            case Tok::LParen: {
                NodePtr e = parse_expr();
                expect(Tok::RParen, ")");
                return e;
            }
            case Tok::Ident: {
                if (lexer_.peek().kind == Tok::LParen) return parse_call(t);
                for (std::size_t i = 0; i < names_.size(); ++i) {
                    if (names_[i] == t.text) {
                        auto n = std::make_shared<Node>();
                        n->kind = NodeKind::Variable;
                        n->var_index = static_cast<int>(i);
                        n->var_name = t.text;
                        n->offset = t.offset;
                        return n;
                    }
                }
                throw ParseError(ParseErrorKind::UnknownIdentifier, t.offset, "unknown identifier '" + t.text + "'");
            }
            default:
                throw ParseError(ParseErrorKind::Syntax, t.offset, "expected a value");
        }
    }

    NodePtr parse_call(const Token& name) {
        const FunctionInfo* info = lookup_function(name.text);
        if (!info)
            throw ParseError(ParseErrorKind::UnknownIdentifier, name.offset, "unknown function '" + name.text + "'");
        lexer_.take(); // '('
        std::vector<NodePtr> args;
        if (lexer_.peek().kind != Tok::RParen) {
            args.push_back(parse_expr());
            while (lexer_.peek().kind == Tok::Comma) {
                lexer_.take();
                args.push_back(parse_expr());
            }
        }
        expect(Tok::RParen, ")");
        if (static_cast<int>(args.size()) != info->arity) {
            std::ostringstream msg;
            msg << "'" << name.text << "' expects " << info->arity << " argument(s), got " << args.size();
            throw ParseError(ParseErrorKind::ArityMismatch, name.offset, msg.str());
        }
        if (!info->c1) saw_non_c1_ = true;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Call;
        n->op = info->op;
        n->var_name = name.text;
        n->children = std::move(args);
        n->offset = name.offset;
        return n;
    }

    NodePtr binary(Op op, NodePtr lhs, NodePtr rhs, std::size_t offset) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Binary;
        n->op = op;
        n->children = {std::move(lhs), std::move(rhs)};
        n->offset = offset;
        return n;
    }

    void expect(Tok kind, const char* what) {
        const Token& t = lexer_.peek();
        if (t.kind != kind)
            throw ParseError(ParseErrorKind::Syntax, t.offset, std::string("expected '") + what + "'");
        lexer_.take();
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > kMaxDepth)
                throw ParseError(ParseErrorKind::Syntax, parser.lexer_.peek().offset, "expression nested too deeply");
        }
        ~DepthGuard() { --parser.depth_; }
        Parser& parser;
    };

    Lexer lexer_;
    std::span<const std::string> names_;
    int depth_ = 0;
    bool saw_non_c1_ = false;
};

int precedence(const Node& n) {
    if (n.kind == NodeKind::Binary) {
        switch (n.op) {
            case Op::Add:
            case Op::Sub: return 1;
            case Op::Mul:
            case Op::Div: return 2;
            case Op::Pow: return 4;
            default: break;
        }
    }
    if (n.kind == NodeKind::Unary) return 3;
    return 5;
}

void print_node(std::ostringstream& out, const Node& n) {
    const auto child = [&](const Node& c, bool needs_paren) {
        if (needs_paren) out << '(';
        print_node(out, c);
        if (needs_paren) out << ')';
    };
    switch (n.kind) {
        case NodeKind::Constant: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.constant;
            std::string s = tmp.str();
            if (n.constant < 0) {
                out << '(' << s << ')';
            } else {
                out << s;
            }
            return;
        }
        case NodeKind::Variable:
            out << n.var_name;
            return;
        case NodeKind::Unary:
            out << '-';
            child(*n.children[0], precedence(*n.children[0]) < precedence(n));
            return;
        case NodeKind::Binary: {
            const char* sym = n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : n.op == Op::Div ? "/" : "^";
            const int p = precedence(n);
            child(*n.children[0], precedence(*n.children[0]) < p || (n.op == Op::Pow && precedence(*n.children[0]) <= p));
            out << sym;
            // left-associative: parenthesize right child at equal precedence (pow is right-assoc)
            child(*n.children[1], precedence(*n.children[1]) < p || (n.op != Op::Pow && precedence(*n.children[1]) == p));
            return;
        }
        case NodeKind::Call: {
            out << n.var_name << '(';
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out << ',';
                print_node(out, *n.children[i]);
            }
            out << ')';
            return;
        }
    }
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Constant: return a.constant == b.constant;
        case NodeKind::Variable: return a.var_index == b.var_index;
        default: break;
    }
    if (a.op != b.op || a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!equal_nodes(*a.children[i], *b.children[i])) return false;
    return true;
}

} // namespace

ExprAst parse(std::string_view text, std::span<const std::string> input_names) {
    if (text.empty()) throw ParseError(ParseErrorKind::Syntax, 0, "empty expression");
    Parser parser(text, input_names);
    ExprAst ast;
    ast.root = parser.parse_all();
    ast.input_names.assign(input_names.begin(), input_names.end());
    ast.c1 = !parser.saw_non_c1();
    return ast;
}

std::string to_string(const ExprAst& ast) {
    std::ostringstream out;
    print_node(out, *ast.root);
    return out.str();
}

bool equal(const ExprAst& a, const ExprAst& b) {
    return a.input_names == b.input_names && equal_nodes(*a.root, *b.root);
}

} // namespace gammacalc::expr
