#pragma once

#include <memory>
#include <string>

namespace hkflow {

/// A real function of position parsed from a small grammar:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | primary
///   primary := number | 'x' | 'pi' | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
///
/// e.g. "cos(2*pi*x)" or "1 + 0.5*sin(4*pi*x)". Evaluation carries a forward
/// derivative so V'(x) is exact.
class Expression {
public:
    struct Node;

    // Throws UsageError with the offending column on a parse failure.
    static Expression parse(const std::string& text);

    double operator()(double x) const;
    double derivative(double x) const;
    const std::string& text() const noexcept { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace hkflow
