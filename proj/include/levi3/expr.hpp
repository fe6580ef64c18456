#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace levi3 {

enum class Op { Num, Imag, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double value = 0;  // Num
    int exponent = 0;  // Pow
    NodePtr a, b;
};

inline bool same_tree(const NodePtr& x, const NodePtr& y) {
    if (x == y) return true;
    if (!x || !y) return false;
    if (x->op != y->op) return false;
    if (x->op == Op::Num && x->value != y->value) return false;
    if (x->op == Op::Pow && x->exponent != y->exponent) return false;
    return same_tree(x->a, y->a) && same_tree(x->b, y->b);
}

namespace build {
inline NodePtr num(double v) { return std::make_shared<Node>(Node{Op::Num, v, 0, nullptr, nullptr}); }
inline NodePtr imag() { return std::make_shared<Node>(Node{Op::Imag, 0, 0, nullptr, nullptr}); }
inline NodePtr var() { return std::make_shared<Node>(Node{Op::Var, 0, 0, nullptr, nullptr}); }
inline NodePtr bin(Op op, NodePtr a, NodePtr b) { return std::make_shared<Node>(Node{op, 0, 0, std::move(a), std::move(b)}); }
inline NodePtr un(Op op, NodePtr a) { return std::make_shared<Node>(Node{op, 0, 0, std::move(a), nullptr}); }
inline NodePtr pow(NodePtr a, int n) { return std::make_shared<Node>(Node{Op::Pow, 0, n, std::move(a), nullptr}); }
}  // namespace build

namespace detail {

inline const std::vector<std::string>& operand_tokens() {
    static const std::vector<std::string> v{"number", "i", "t", "sin", "cos", "exp", "log", "(", "-"};
    return v;
}

/// Recursive-descent parser for
///   expr   := term (("+"|"-") term)*
///   term   := unary (("*"|"/") unary)*
///   unary  := "-" unary | factor
///   factor := base ("^" int)?
///   base   := number | "i" | "t" | func "(" expr ")" | "(" expr ")"
class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail({"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(std::vector<std::string> expected) {
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": expected one of";
        for (auto& e : expected) msg += " '" + e + "'";
        throw ParseError(pos_, std::move(expected), msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = build::bin(Op::Add, lhs, term());
            else if (eat('-')) lhs = build::bin(Op::Sub, lhs, term());
            else return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*')) lhs = build::bin(Op::Mul, lhs, unary());
            else if (eat('/')) lhs = build::bin(Op::Div, lhs, unary());
            else return lhs;
        }
    }
    NodePtr unary() {
        if (eat('-')) {
            // "-2" is a negative literal, "-2^2" is -(2^2)
            skip();
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                NodePtr n = number();
                if (eat('^')) return build::un(Op::Neg, build::pow(n, exponent()));
                return build::num(-n->value);
            }
            return build::un(Op::Neg, unary());
        }
        return factor();
    }
    NodePtr factor() {
        NodePtr b = base();
        if (eat('^')) return build::pow(b, exponent());
        return b;
    }
    int exponent() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail({"integer exponent"});
        int n = 0;
        auto r = std::from_chars(s_.data() + start, s_.data() + pos_, n);
        if (r.ec != std::errc{} || n > 64) {
            pos_ = start;
            fail({"integer exponent <= 64"});
        }
        return n;
    }
    NodePtr base() {
        skip();
        if (pos_ >= s_.size()) fail(operand_tokens());
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) fail({")", "+", "-", "*", "/", "^"});
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string_view id = s_.substr(start, pos_ - start);
            if (id == "i") return build::imag();
            if (id == "t") return build::var();
            Op f;
            if (id == "sin") f = Op::Sin;
            else if (id == "cos") f = Op::Cos;
            else if (id == "exp") f = Op::Exp;
            else if (id == "log") f = Op::Log;
            else {
                auto exp = operand_tokens();
                throw UnknownIdentifier(start, std::move(exp),
                                        "unknown identifier '" + std::string(id) + "' at offset " + std::to_string(start));
            }
            if (!eat('(')) fail({"("});
            NodePtr arg = expr();
            if (!eat(')')) fail({")", "+", "-", "*", "/", "^"});
            return build::un(f, arg);
        }
        fail(operand_tokens());
    }
    NodePtr number() {
        std::size_t start = pos_;
        auto digits = [&] {
            std::size_t d = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return pos_ > d;
        };
        digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            if (!digits()) fail({"digit"});
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (!digits()) fail({"digit"});
        }
        double v = 0;
        auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (r.ec != std::errc{} || !std::isfinite(v)) {
            pos_ = start;
            fail({"finite number"});
        }
        return build::num(v);
    }
};

inline std::string format_number(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline void print(const NodePtr& n, std::string& out) {
    auto bin = [&](const char* sym) {
        out += '(';
        print(n->a, out);
        out += sym;
        print(n->b, out);
        out += ')';
    };
    switch (n->op) {
        case Op::Num:
            if (n->value < 0 || std::signbit(n->value)) {
                out += "(-" + format_number(-n->value) + ")";
            } else {
                out += format_number(n->value);
            }
            break;
        case Op::Imag: out += 'i'; break;
        case Op::Var: out += 't'; break;
        case Op::Add: bin(" + "); break;
        case Op::Sub: bin(" - "); break;
        case Op::Mul: bin(" * "); break;
        case Op::Div: bin(" / "); break;
        case Op::Pow:
            // a power's base must be a `base`, so wrap anything that is not atomic
            if (n->a->op == Op::Num && n->a->value >= 0 && !std::signbit(n->a->value)) {
                print(n->a, out);
            } else if (n->a->op == Op::Imag || n->a->op == Op::Var || n->a->op == Op::Sin ||
                       n->a->op == Op::Cos || n->a->op == Op::Exp || n->a->op == Op::Log) {
                print(n->a, out);
            } else {
                out += '(';
                print(n->a, out);
                out += ')';
            }
            out += '^' + std::to_string(n->exponent);
            break;
        case Op::Neg:
            // a bare literal after '-' would read back as a negative number
            if (n->a->op == Op::Num && !std::signbit(n->a->value)) {
                out += "(-(" + format_number(n->a->value) + "))";
            } else {
                out += "(-";
                print(n->a, out);
                out += ')';
            }
            break;
        case Op::Sin: out += "sin("; print(n->a, out); out += ')'; break;
        case Op::Cos: out += "cos("; print(n->a, out); out += ')'; break;
        case Op::Exp: out += "exp("; print(n->a, out); out += ')'; break;
        case Op::Log: out += "log("; print(n->a, out); out += ')'; break;
    }
}

template <int N>
Taylor<cplx, N> eval(const NodePtr& n, double t) {
    using Tj = Taylor<cplx, N>;
    switch (n->op) {
        case Op::Num: return Tj::constant(n->value);
        case Op::Imag: return Tj::constant(cplx(0, 1));
        case Op::Var: return Tj::variable(t);
        case Op::Add: return eval<N>(n->a, t) + eval<N>(n->b, t);
        case Op::Sub: return eval<N>(n->a, t) - eval<N>(n->b, t);
        case Op::Mul: return eval<N>(n->a, t) * eval<N>(n->b, t);
        case Op::Div: {
            Tj d = eval<N>(n->b, t);
            if (d.c[0] == cplx(0)) throw DomainError(t, "division by zero at t = " + format_number(t));
            return eval<N>(n->a, t) / d;
        }
        case Op::Pow: return ipow(eval<N>(n->a, t), n->exponent);
        case Op::Neg: return -eval<N>(n->a, t);
        case Op::Sin: return sincos(eval<N>(n->a, t)).first;
        case Op::Cos: return sincos(eval<N>(n->a, t)).second;
        case Op::Exp: return exp(eval<N>(n->a, t));
        case Op::Log: {
            Tj x = eval<N>(n->a, t);
            if (x.c[0].imag() != 0 || !(x.c[0].real() > 0))
                throw DomainError(t, "log of non-positive argument at t = " + format_number(t));
            return log(x);
        }
    }
    return Tj{};
}

inline void scan_flags(const NodePtr& n, bool& div, bool& lg, bool& im, bool& var) {
    if (!n) return;
    div |= n->op == Op::Div;
    lg |= n->op == Op::Log;
    im |= n->op == Op::Imag;
    var |= n->op == Op::Var;
    scan_flags(n->a, div, lg, im, var);
    scan_flags(n->b, div, lg, im, var);
}

}  // namespace detail

/// Coefficient a(t) given by a parsed expression.
class TimeFn {
public:
    TimeFn() : root_(build::num(0)) { refresh(); }
    explicit TimeFn(NodePtr root) : root_(std::move(root)) { refresh(); }

    static TimeFn parse(std::string_view src) { return TimeFn(detail::Parser(src).parse()); }
    static TimeFn constant(double v) { return TimeFn(build::num(v)); }

    /// Canonical form; parsing it gives back an identical tree.
    std::string print() const {
        std::string s;
        detail::print(root_, s);
        return s;
    }

    Jet2 eval_jet2(double t) const { return to_jet2(detail::eval<2>(root_, t)); }
    template <int N>
    Taylor<cplx, N> eval_taylor(double t) const { return detail::eval<N>(root_, t); }
    cplx eval(double t) const { return detail::eval<0>(root_, t).c[0]; }

    const NodePtr& root() const { return root_; }
    bool uses_division() const { return div_; }
    bool uses_log() const { return log_; }
    bool has_imag() const { return imag_; }
    bool depends_on_t() const { return var_; }
    bool is_zero() const { return root_->op == Op::Num && root_->value == 0; }

    friend bool operator==(const TimeFn& x, const TimeFn& y) { return same_tree(x.root_, y.root_); }

private:
    NodePtr root_;
    bool div_ = false, log_ = false, imag_ = false, var_ = false;
    void refresh() { detail::scan_flags(root_, div_, log_, imag_, var_); }
};

}  // namespace levi3
