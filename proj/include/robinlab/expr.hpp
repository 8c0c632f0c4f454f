// Tiny arithmetic expression parser for user-supplied coefficient fields and
// reaction terms. Grammar: numbers, named variables, + - * / ^ (right-assoc
// power), unary minus, parentheses, and a fixed function set.
#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "robinlab/core.hpp"

namespace robinlab::expr {

struct Node {
    virtual ~Node() = default;
    virtual double eval(const double* vars) const = 0;
};

using NodePtr = std::unique_ptr<Node>;

struct ConstNode final : Node {
    double value;
    explicit ConstNode(double v) : value(v) {}
    double eval(const double*) const override { return value; }
};

struct VarNode final : Node {
    int index;
    explicit VarNode(int i) : index(i) {}
    double eval(const double* vars) const override { return vars[index]; }
};

struct UnaryNode final : Node {
    double (*fn)(double);
    NodePtr arg;
    UnaryNode(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
    double eval(const double* vars) const override { return fn(arg->eval(vars)); }
};

struct BinaryNode final : Node {
    double (*fn)(double, double);
    NodePtr lhs, rhs;
    BinaryNode(double (*f)(double, double), NodePtr l, NodePtr r)
        : fn(f), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(const double* vars) const override {
        return fn(lhs->eval(vars), rhs->eval(vars));
    }
};

namespace detail {

inline double add(double a, double b) { return a + b; }
inline double sub(double a, double b) { return a - b; }
inline double mul(double a, double b) { return a * b; }
inline double divi(double a, double b) { return a / b; }
inline double neg(double a) { return -a; }
inline double min2(double a, double b) { return a < b ? a : b; }
inline double max2(double a, double b) { return a > b ? a : b; }
inline double pow2(double a, double b) { return std::pow(a, b); }
inline double ln1(double a) { return std::log(a); }
inline double exp1(double a) { return std::exp(a); }
inline double sqrt1(double a) { return std::sqrt(a); }
inline double sin1(double a) { return std::sin(a); }
inline double cos1(double a) { return std::cos(a); }
inline double tan1(double a) { return std::tan(a); }
inline double abs1(double a) { return std::fabs(a); }

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    NodePtr parse() {
        NodePtr root = parse_sum();
        skip_ws();
        require(pos_ == text_.size(),
                "expression: trailing input at position " + std::to_string(pos_) +
                    " in \"" + text_ + "\"");
        return root;
    }

private:
    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (consume('+')) lhs = std::make_unique<BinaryNode>(add, std::move(lhs), parse_product());
            else if (consume('-')) lhs = std::make_unique<BinaryNode>(sub, std::move(lhs), parse_product());
            else return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (consume('*')) lhs = std::make_unique<BinaryNode>(mul, std::move(lhs), parse_unary());
            else if (consume('/')) lhs = std::make_unique<BinaryNode>(divi, std::move(lhs), parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return std::make_unique<UnaryNode>(neg, parse_unary());
        if (consume('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^'))  // right-associative
            return std::make_unique<BinaryNode>(pow2, std::move(base), parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        require(pos_ < text_.size(), "expression: unexpected end of input in \"" + text_ + "\"");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        if (consume('(')) {
            NodePtr inside = parse_sum();
            require(consume(')'), "expression: missing ')' in \"" + text_ + "\"");
            return inside;
        }
        fail("expression: unexpected character '" + std::string(1, c) + "' in \"" + text_ + "\"");
    }

    NodePtr parse_number() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                text_[end] == 'e' || text_[end] == 'E' ||
                ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
                 (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
            ++end;
        double v = 0;
        try {
            v = std::stod(text_.substr(pos_, end - pos_));
        } catch (const std::exception&) {
            fail("expression: bad number literal in \"" + text_ + "\"");
        }
        pos_ = end;
        return std::make_unique<ConstNode>(v);
    }

    NodePtr parse_name() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            ++end;
        std::string name = text_.substr(pos_, end - pos_);
        pos_ = end;

        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return std::make_unique<VarNode>(int(i));
        if (name == "pi") return std::make_unique<ConstNode>(M_PI);
        if (name == "e") return std::make_unique<ConstNode>(M_E);

        static const std::map<std::string, double (*)(double)> unary = {
            {"ln", ln1},   {"log", ln1}, {"exp", exp1}, {"sqrt", sqrt1},
            {"sin", sin1}, {"cos", cos1}, {"tan", tan1}, {"abs", abs1},
        };
        static const std::map<std::string, double (*)(double, double)> binary = {
            {"pow", pow2}, {"min", min2}, {"max", max2},
        };

        if (auto it = unary.find(name); it != unary.end()) {
            require(consume('('), "expression: '" + name + "' expects '('");
            NodePtr a = parse_sum();
            require(consume(')'), "expression: missing ')' after '" + name + "'");
            return std::make_unique<UnaryNode>(it->second, std::move(a));
        }
        if (auto it = binary.find(name); it != binary.end()) {
            require(consume('('), "expression: '" + name + "' expects '('");
            NodePtr a = parse_sum();
            require(consume(','), "expression: '" + name + "' expects two arguments");
            NodePtr b = parse_sum();
            require(consume(')'), "expression: missing ')' after '" + name + "'");
            return std::make_unique<BinaryNode>(it->second, std::move(a), std::move(b));
        }
        fail("expression: unknown name '" + name + "' in \"" + text_ + "\"");
    }
};

}  // namespace detail

// Compiled expression over a fixed variable list. Copyable via shared state.
class Expression {
public:
    Expression() = default;

    Expression(const std::string& text, std::vector<std::string> vars)
        : text_(text), vars_(std::move(vars)) {
        detail::Parser p(text_, vars_);
        root_ = std::shared_ptr<Node>(p.parse().release());
    }

    double operator()(std::initializer_list<double> values) const {
        return root_->eval(values.begin());
    }

    double eval(const double* values) const { return root_->eval(values); }

    const std::string& text() const { return text_; }
    bool valid() const { return root_ != nullptr; }

private:
    std::string text_;
    std::vector<std::string> vars_;
    std::shared_ptr<Node> root_;
};

}  // namespace robinlab::expr
