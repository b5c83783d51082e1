#include "hypersurf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hypersurf/errors.hpp"

namespace hypersurf {

class ExpressionParser {
public:
    ExpressionParser(std::string_view src, int dimension) : src_(src), dimension_(dimension) {}

    Expression run() {
        if (dimension_ != 1 && dimension_ != 2) throw InvalidArgument("expression dimension must be 1 or 2");
        Expression e;
        e.dimension_ = dimension_;
        e.source_ = std::string(src_);
        out_ = &e.nodes_;
        e.root_ = sum();
        skip_space();
        if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    using Op = Expression::Op;

    std::int32_t emit(Op op, std::int32_t lhs = -1, std::int32_t rhs = -1, double value = 0.0) {
        out_->push_back({op, value, lhs, rhs});
        return static_cast<std::int32_t>(out_->size() - 1);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    std::int32_t sum() {
        std::int32_t lhs = product();
        for (;;) {
            if (accept('+')) lhs = emit(Op::Add, lhs, product());
            else if (accept('-')) lhs = emit(Op::Sub, lhs, product());
            else return lhs;
        }
    }

    std::int32_t product() {
        std::int32_t lhs = unary();
        for (;;) {
            if (accept('*')) lhs = emit(Op::Mul, lhs, unary());
            else if (accept('/')) lhs = emit(Op::Div, lhs, unary());
            else return lhs;
        }
    }

    std::int32_t unary() {
        if (accept('-')) return emit(Op::Neg, unary());
        return power();
    }

    std::int32_t power() {
        std::int32_t base = primary();
        if (accept('^')) return emit(Op::Pow, base, unary());
        return base;
    }

    std::int32_t primary() {
        skip_space();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            std::int32_t inner = sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    std::int32_t number() {
        const std::size_t start = pos_;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value,
                                               std::chars_format::general);
        if (ec != std::errc() || ptr == src_.data() + pos_) throw ParseError("malformed number", start);
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        return emit(Op::Number, -1, -1, value);
    }

    std::int32_t identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "pi") return emit(Op::Pi);
        if (name == "x") return emit(Op::VarX);
        if (name == "y") {
            if (dimension_ < 2) throw ParseError("variable 'y' is not available in dimension 1", start);
            return emit(Op::VarY);
        }
        Op fn;
        if (name == "sin") fn = Op::Sin;
        else if (name == "cos") fn = Op::Cos;
        else if (name == "exp") fn = Op::Exp;
        else if (name == "abs") fn = Op::Abs;
        else if (name == "sqrt") fn = Op::Sqrt;
        else throw ParseError("unknown identifier '" + std::string(name) + "'", start);

        expect('(');
        std::int32_t arg = sum();
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == ',')
            throw ParseError("function '" + std::string(name) + "' takes exactly one argument", pos_);
        expect(')');
        return emit(fn, arg);
    }

    std::string_view src_;
    int dimension_;
    std::size_t pos_ = 0;
    std::vector<Expression::Node>* out_ = nullptr;
};

Expression Expression::parse(std::string_view source, int dimension) {
    return ExpressionParser(source, dimension).run();
}

double Expression::eval(std::int32_t index, double x, double y) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::Pi: return std::numbers::pi;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Neg: return -eval(n.lhs, x, y);
        case Op::Add: return eval(n.lhs, x, y) + eval(n.rhs, x, y);
        case Op::Sub: return eval(n.lhs, x, y) - eval(n.rhs, x, y);
        case Op::Mul: return eval(n.lhs, x, y) * eval(n.rhs, x, y);
        case Op::Div: {
            const double num = eval(n.lhs, x, y);
            const double den = eval(n.rhs, x, y);
            if (den == 0.0) throw EvaluationError("division by zero in '" + source_ + "'");
            return num / den;
        }
        case Op::Pow: return std::pow(eval(n.lhs, x, y), eval(n.rhs, x, y));
        case Op::Sin: return std::sin(eval(n.lhs, x, y));
        case Op::Cos: return std::cos(eval(n.lhs, x, y));
        case Op::Exp: return std::exp(eval(n.lhs, x, y));
        case Op::Abs: return std::abs(eval(n.lhs, x, y));
        case Op::Sqrt: {
            const double a = eval(n.lhs, x, y);
            if (a < 0.0) throw EvaluationError("sqrt of a negative number in '" + source_ + "'");
            return std::sqrt(a);
        }
    }
    return 0.0;
}

void Expression::print_node(std::int32_t index, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    auto binary = [&](const char* op) {
        out += '(';
        print_node(n.lhs, out);
        out += op;
        print_node(n.rhs, out);
        out += ')';
    };
    auto call = [&](const char* name) {
        out += name;
        out += '(';
        print_node(n.lhs, out);
        out += ')';
    };
    switch (n.op) {
        case Op::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case Op::Pi: out += "pi"; return;
        case Op::VarX: out += 'x'; return;
        case Op::VarY: out += 'y'; return;
        case Op::Neg:
            out += "(-";
            print_node(n.lhs, out);
            out += ')';
            return;
        case Op::Add: binary(" + "); return;
        case Op::Sub: binary(" - "); return;
        case Op::Mul: binary(" * "); return;
        case Op::Div: binary(" / "); return;
        case Op::Pow: binary("^"); return;
        case Op::Sin: call("sin"); return;
        case Op::Cos: call("cos"); return;
        case Op::Exp: call("exp"); return;
        case Op::Abs: call("abs"); return;
        case Op::Sqrt: call("sqrt"); return;
    }
}

std::string Expression::print() const {
    std::string out;
    print_node(root_, out);
    return out;
}

bool Expression::structurally_equal(const Expression& other) const {
    auto same = [&](auto&& self, std::int32_t a, std::int32_t b) -> bool {
        if ((a < 0) != (b < 0)) return false;
        if (a < 0) return true;
        const Node& na = nodes_[static_cast<std::size_t>(a)];
        const Node& nb = other.nodes_[static_cast<std::size_t>(b)];
        if (na.op != nb.op) return false;
        if (na.op == Op::Number && na.value != nb.value) return false;
        return self(self, na.lhs, nb.lhs) && self(self, na.rhs, nb.rhs);
    };
    return dimension_ == other.dimension_ && same(same, root_, other.root_);
}

}  // namespace hypersurf
