#include "expression.hpp"

#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace shum {

struct Expression::Node {
    enum class Kind { constant, var_t, var_x, add, sub, mul, neg, sin, cos, exp };
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
}

NodePtr make_constant(double value) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::constant;
    node->value = value;
    return node;
}

double eval_node(const Node& node, double t, double x) {
    switch (node.kind) {
    case Node::Kind::constant: return node.value;
    case Node::Kind::var_t: return t;
    case Node::Kind::var_x: return x;
    case Node::Kind::add: return eval_node(*node.lhs, t, x) + eval_node(*node.rhs, t, x);
    case Node::Kind::sub: return eval_node(*node.lhs, t, x) - eval_node(*node.rhs, t, x);
    case Node::Kind::mul: return eval_node(*node.lhs, t, x) * eval_node(*node.rhs, t, x);
    case Node::Kind::neg: return -eval_node(*node.lhs, t, x);
    case Node::Kind::sin: return std::sin(eval_node(*node.lhs, t, x));
    case Node::Kind::cos: return std::cos(eval_node(*node.lhs, t, x));
    case Node::Kind::exp: return std::exp(eval_node(*node.lhs, t, x));
    }
    fail(errc::internal, "unreachable expression node kind");
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        skip_spaces();
        require(pos_ < text_.size(), errc::config,
                fmt::format("expression '{}' is empty", text_));
        NodePtr root = parse_sum();
        skip_spaces();
        if (pos_ < text_.size())
            fail_at(fmt::format("unexpected '{}'", text_[pos_]));
        return root;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    [[noreturn]] void fail_at(const std::string& what) {
        fail_config(fmt::format("expression '{}': {} at position {}", text_, what, pos_ + 1));
    }

    void skip_spaces() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_spaces();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (consume('+')) lhs = make_node(Node::Kind::add, lhs, parse_product());
            else if (consume('-')) lhs = make_node(Node::Kind::sub, lhs, parse_product());
            else return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_factor();
        while (consume('*')) lhs = make_node(Node::Kind::mul, lhs, parse_factor());
        return lhs;
    }

    NodePtr parse_factor() {
        if (consume('-')) return make_node(Node::Kind::neg, parse_factor());
        return parse_atom();
    }

    NodePtr parse_atom() {
        skip_spaces();
        if (pos_ >= text_.size()) fail_at("expected a value");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!consume(')')) fail_at("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail_at(fmt::format("unexpected '{}'", c));
    }

    NodePtr parse_number() {
        size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        // Exponent suffix like 1e-3.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // the 'e' starts an identifier, not an exponent
            }
        }
        std::string token = text_.substr(start, pos_ - start);
        try {
            size_t used = 0;
            double value = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            return make_constant(value);
        } catch (const std::exception&) {
            pos_ = start;
            fail_at(fmt::format("malformed number '{}'", token));
        }
    }

    NodePtr parse_identifier() {
        size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name == "t") return make_node(Node::Kind::var_t);
        if (name == "x") return make_node(Node::Kind::var_x);
        if (name == "pi") return make_constant(std::numbers::pi);
        Node::Kind kind;
        if (name == "sin") kind = Node::Kind::sin;
        else if (name == "cos") kind = Node::Kind::cos;
        else if (name == "exp") kind = Node::Kind::exp;
        else {
            pos_ = start;
            fail_at(fmt::format("unknown name '{}' (allowed: t, x, pi, sin, cos, exp)", name));
        }
        if (!consume('(')) fail_at(fmt::format("expected '(' after '{}'", name));
        NodePtr arg = parse_sum();
        if (!consume(')')) fail_at("expected ')'");
        return make_node(kind, arg);
    }
};

} // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

double Expression::operator()(double t, double x) const {
    require(root_ != nullptr, errc::internal, "evaluating an empty expression");
    return eval_node(*root_, t, x);
}

Expression parse_expression(const std::string& text) {
    Parser parser(text);
    return Expression(parser.parse(), text);
}

} // namespace shum
