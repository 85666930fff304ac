#pragma once

// Tiny expression grammar for cdf segment formulas. Supports the variables
// x and t, the functions phi/exp/ln/abs, and arithmetic with standard
// precedence (pow > unary minus > mul/div > add/sub, left-associative).
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' atom)*
//   atom   := number | 'x' | 't' | func '(' expr ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "specfun.hpp"

namespace stochord {

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class UnaryFn { Phi, Exp, Ln, Neg, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct Constant { double value; };
struct VarX {};
struct ParamT {};
struct Unary { UnaryFn fn; ExprPtr arg; };
struct Binary { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };

struct ExprNode {
    std::variant<Constant, VarX, ParamT, Unary, Binary> node;
};

class Expr {
  public:
    Expr() = default;
    explicit Expr(ExprPtr root) : root_(std::move(root)) { compile(); }

    static Expr constant(double v) { return Expr(make(Constant{v})); }
    static Expr var_x() { return Expr(make(VarX{})); }
    static Expr param_t() { return Expr(make(ParamT{})); }

    bool empty() const { return !root_; }

    // Evaluation runs a flat postfix program instead of recursing through
    // the tree; cdf inversion bisects through here thousands of times.
    double eval(double x, double t) const {
        if (!root_) throw EvalError("eval of empty expression");
        if (!prog_ || depth_ > max_stack) {
            double v = eval_node(*root_, x, t);
            if (!std::isfinite(v)) throw EvalError("non-finite result");
            return v;
        }
        double stack[max_stack];
        int sp = 0;
        for (const Instr& in : *prog_) {
            switch (in.op) {
                case Op::PushConst: stack[sp++] = in.value; break;
                case Op::PushX: stack[sp++] = x; break;
                case Op::PushT: stack[sp++] = t; break;
                case Op::Phi: stack[sp - 1] = std_normal_cdf(stack[sp - 1]); break;
                case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
                case Op::Ln:
                    if (stack[sp - 1] <= 0.0) throw EvalError("ln of nonpositive argument");
                    stack[sp - 1] = std::log(stack[sp - 1]);
                    break;
                case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
                case Op::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
                case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
                case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
                case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
                case Op::Div:
                    --sp;
                    if (stack[sp] == 0.0) throw EvalError("division by zero");
                    stack[sp - 1] /= stack[sp];
                    break;
                case Op::Pow: {
                    --sp;
                    double r = std::pow(stack[sp - 1], stack[sp]);
                    if (!std::isfinite(r)) throw EvalError("pow out of domain");
                    stack[sp - 1] = r;
                    break;
                }
            }
        }
        double v = stack[0];
        if (!std::isfinite(v)) throw EvalError("non-finite result");
        return v;
    }

    std::string print() const { return root_ ? print_node(*root_) : std::string(); }

    const ExprPtr& root() const { return root_; }

  private:
    enum class Op { PushConst, PushX, PushT, Phi, Exp, Ln, Neg, Abs, Add, Sub, Mul, Div, Pow };
    struct Instr {
        Op op;
        double value = 0.0;
    };
    static constexpr int max_stack = 64;

    ExprPtr root_;
    std::shared_ptr<const std::vector<Instr>> prog_;
    int depth_ = 0;

    void compile() {
        if (!root_) return;
        auto prog = std::make_shared<std::vector<Instr>>();
        int depth = 0, cur = 0;
        compile_node(*root_, *prog, cur, depth);
        prog_ = std::move(prog);
        depth_ = depth;
    }

    static void compile_node(const ExprNode& n, std::vector<Instr>& out, int& cur, int& depth) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    out.push_back({Op::PushConst, v.value});
                    depth = std::max(depth, ++cur);
                } else if constexpr (std::is_same_v<T, VarX>) {
                    out.push_back({Op::PushX});
                    depth = std::max(depth, ++cur);
                } else if constexpr (std::is_same_v<T, ParamT>) {
                    out.push_back({Op::PushT});
                    depth = std::max(depth, ++cur);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    compile_node(*v.arg, out, cur, depth);
                    switch (v.fn) {
                        case UnaryFn::Phi: out.push_back({Op::Phi}); break;
                        case UnaryFn::Exp: out.push_back({Op::Exp}); break;
                        case UnaryFn::Ln: out.push_back({Op::Ln}); break;
                        case UnaryFn::Neg: out.push_back({Op::Neg}); break;
                        case UnaryFn::Abs: out.push_back({Op::Abs}); break;
                    }
                } else {
                    compile_node(*v.lhs, out, cur, depth);
                    compile_node(*v.rhs, out, cur, depth);
                    switch (v.op) {
                        case BinaryOp::Add: out.push_back({Op::Add}); break;
                        case BinaryOp::Sub: out.push_back({Op::Sub}); break;
                        case BinaryOp::Mul: out.push_back({Op::Mul}); break;
                        case BinaryOp::Div: out.push_back({Op::Div}); break;
                        case BinaryOp::Pow: out.push_back({Op::Pow}); break;
                    }
                    --cur;
                }
            },
            n.node);
    }

    template <class T>
    static ExprPtr make(T&& t) {
        return std::make_shared<ExprNode>(ExprNode{std::forward<T>(t)});
    }

    static double eval_node(const ExprNode& n, double x, double t) {
        return std::visit(
            [&](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    return v.value;
                } else if constexpr (std::is_same_v<T, VarX>) {
                    return x;
                } else if constexpr (std::is_same_v<T, ParamT>) {
                    return t;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    double a = eval_node(*v.arg, x, t);
                    switch (v.fn) {
                        case UnaryFn::Phi: return std_normal_cdf(a);
                        case UnaryFn::Exp: return std::exp(a);
                        case UnaryFn::Ln:
                            if (a <= 0.0) throw EvalError("ln of nonpositive argument");
                            return std::log(a);
                        case UnaryFn::Neg: return -a;
                        case UnaryFn::Abs: return std::fabs(a);
                    }
                    throw EvalError("bad unary");
                } else {
                    double a = eval_node(*v.lhs, x, t);
                    double b = eval_node(*v.rhs, x, t);
                    switch (v.op) {
                        case BinaryOp::Add: return a + b;
                        case BinaryOp::Sub: return a - b;
                        case BinaryOp::Mul: return a * b;
                        case BinaryOp::Div:
                            if (b == 0.0) throw EvalError("division by zero");
                            return a / b;
                        case BinaryOp::Pow: {
                            double r = std::pow(a, b);
                            if (!std::isfinite(r)) throw EvalError("pow out of domain");
                            return r;
                        }
                    }
                    throw EvalError("bad binary");
                }
            },
            n.node);
    }

    static std::string print_node(const ExprNode& n) {
        return std::visit(
            [&](const auto& v) -> std::string {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.17g", v.value);
                    return buf;
                } else if constexpr (std::is_same_v<T, VarX>) {
                    return "x";
                } else if constexpr (std::is_same_v<T, ParamT>) {
                    return "t";
                } else if constexpr (std::is_same_v<T, Unary>) {
                    std::string a = print_node(*v.arg);
                    switch (v.fn) {
                        case UnaryFn::Phi: return "phi(" + a + ")";
                        case UnaryFn::Exp: return "exp(" + a + ")";
                        case UnaryFn::Ln: return "ln(" + a + ")";
                        case UnaryFn::Abs: return "abs(" + a + ")";
                        case UnaryFn::Neg: return "(-" + a + ")";
                    }
                    return a;
                } else {
                    const char* op = "+";
                    switch (v.op) {
                        case BinaryOp::Add: op = "+"; break;
                        case BinaryOp::Sub: op = "-"; break;
                        case BinaryOp::Mul: op = "*"; break;
                        case BinaryOp::Div: op = "/"; break;
                        case BinaryOp::Pow: op = "^"; break;
                    }
                    return "(" + print_node(*v.lhs) + op + print_node(*v.rhs) + ")";
                }
            },
            n.node);
    }

    friend class Parser;
};

class Parser {
  public:
    explicit Parser(std::string text) : text_(std::move(text)) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    std::string text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = binary(BinaryOp::Add, lhs, parse_term());
            else if (eat('-')) lhs = binary(BinaryOp::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            if (eat('*')) lhs = binary(BinaryOp::Mul, lhs, parse_unary());
            else if (eat('/')) lhs = binary(BinaryOp::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return Expr(Expr::make(Unary{UnaryFn::Neg, parse_unary().root()}));
        return parse_power();
    }

    Expr parse_power() {
        Expr lhs = parse_atom();
        while (eat('^')) lhs = binary(BinaryOp::Pow, lhs, parse_atom());
        return lhs;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_number() {
        std::size_t start = pos_;
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start);
        pos_ += static_cast<std::size_t>(end - begin);
        return Expr::constant(v);
    }

    Expr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name == "x") return Expr::var_x();
        if (name == "t") return Expr::param_t();
        UnaryFn fn;
        if (name == "phi") fn = UnaryFn::Phi;
        else if (name == "exp") fn = UnaryFn::Exp;
        else if (name == "ln") fn = UnaryFn::Ln;
        else if (name == "abs") fn = UnaryFn::Abs;
        else throw ParseError("unknown identifier '" + name + "'", start);
        if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
        Expr arg = parse_expr();
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        return Expr(Expr::make(Unary{fn, arg.root()}));
    }

    static Expr binary(BinaryOp op, const Expr& a, const Expr& b) {
        return Expr(Expr::make(Binary{op, a.root(), b.root()}));
    }
};

inline Expr parse_expr(const std::string& text) { return Parser(text).parse(); }

} // namespace stochord
