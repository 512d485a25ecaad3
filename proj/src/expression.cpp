#include "hkflow/expression.hpp"

#include "hkflow/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace hkflow {

namespace {

struct Dual {
    double v;
    double d;
};

} // namespace

struct Expression::Node {
    enum class Op { Const, X, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp };
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;

    Dual eval(double x) const
    {
        switch (op) {
        case Op::Const: return {value, 0.0};
        case Op::X: return {x, 1.0};
        case Op::Add: {
            const Dual l = a->eval(x), r = b->eval(x);
            return {l.v + r.v, l.d + r.d};
        }
        case Op::Sub: {
            const Dual l = a->eval(x), r = b->eval(x);
            return {l.v - r.v, l.d - r.d};
        }
        case Op::Mul: {
            const Dual l = a->eval(x), r = b->eval(x);
            return {l.v * r.v, l.d * r.v + l.v * r.d};
        }
        case Op::Div: {
            const Dual l = a->eval(x), r = b->eval(x);
            return {l.v / r.v, (l.d * r.v - l.v * r.d) / (r.v * r.v)};
        }
        case Op::Neg: {
            const Dual l = a->eval(x);
            return {-l.v, -l.d};
        }
        case Op::Sin: {
            const Dual l = a->eval(x);
            return {std::sin(l.v), std::cos(l.v) * l.d};
        }
        case Op::Cos: {
            const Dual l = a->eval(x);
            return {std::cos(l.v), -std::sin(l.v) * l.d};
        }
        case Op::Exp: {
            const Dual l = a->eval(x);
            const double e = std::exp(l.v);
            return {e, e * l.d};
        }
        }
        return {0.0, 0.0};
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0)
{
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = value;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all()
    {
        NodePtr n = expr();
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected character");
        return n;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw UsageError("expression '" + s_ + "': " + msg + " at column " + std::to_string(pos_ + 1));
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr n = term();
        for (;;) {
            if (accept('+'))
                n = make(Op::Add, n, term());
            else if (accept('-'))
                n = make(Op::Sub, n, term());
            else
                return n;
        }
    }

    NodePtr term()
    {
        NodePtr n = unary();
        for (;;) {
            if (accept('*'))
                n = make(Op::Mul, n, unary());
            else if (accept('/'))
                n = make(Op::Div, n, unary());
            else
                return n;
        }
    }

    NodePtr unary()
    {
        if (accept('-'))
            return make(Op::Neg, unary());
        if (accept('+'))
            return unary();
        return primary();
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        if (accept('(')) {
            NodePtr n = expr();
            if (!accept(')'))
                fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin)
                fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Op::Const, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            const std::string word = s_.substr(start, pos_ - start);
            if (word == "x")
                return make(Op::X);
            if (word == "pi")
                return make(Op::Const, nullptr, nullptr, std::numbers::pi);
            Op fn;
            if (word == "sin")
                fn = Op::Sin;
            else if (word == "cos")
                fn = Op::Cos;
            else if (word == "exp")
                fn = Op::Exp;
            else {
                pos_ = start;
                fail("unknown identifier '" + word + "'");
            }
            if (!accept('('))
                fail("expected '(' after " + word);
            NodePtr arg = expr();
            if (!accept(')'))
                fail("expected ')'");
            return make(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

Expression Expression::parse(const std::string& text)
{
    Expression e;
    e.root_ = Parser(text).parse_all();
    e.text_ = text;
    return e;
}

double Expression::operator()(double x) const { return root_->eval(x).v; }

double Expression::derivative(double x) const { return root_->eval(x).d; }

} // namespace hkflow
