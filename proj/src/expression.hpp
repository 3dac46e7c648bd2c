#pragma once

#include <memory>
#include <string>

namespace shum {

// Arithmetic over (t, x) with +, -, *, numeric literals, pi, and sin/cos/exp.
// Small enough to parse by recursive descent; anything richer belongs in
// library use rather than config files.
class Expression {
public:
    Expression() = default;
    double operator()(double t, double x) const;
    bool valid() const { return root_ != nullptr; }
    const std::string& source() const { return source_; }

    struct Node;
    Expression(std::shared_ptr<const Node> root, std::string source);

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

// Errors carry the offending position: "expression 'sin(t': expected ')' at
// position 6".
Expression parse_expression(const std::string& text);

} // namespace shum
