#include "cel/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "cel/errors.hpp"

namespace cel::dsl {

ExprPtr Expr::constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Constant;
    e->value = v;
    return e;
}

ExprPtr Expr::coordinate(int index) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Coordinate;
    e->coord = index;
    return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr sub) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Unary;
    e->uop = op;
    e->lhs = std::move(sub);
    return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->bop = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

namespace {

bool contains_coordinate(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Constant: return false;
    case Expr::Kind::Coordinate: return true;
    case Expr::Kind::Unary: return contains_coordinate(*e.lhs);
    case Expr::Kind::Binary: return contains_coordinate(*e.lhs) || contains_coordinate(*e.rhs);
    }
    return false;
}

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> coords)
        : text_(text), coords_(coords) {}

    ExprPtr parse() {
        ExprPtr e = expression();
        skip_space();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr expression() {
        ExprPtr e = term();
        while (true) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                e = Expr::binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, e, term());
            } else {
                return e;
            }
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        while (true) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                e = Expr::binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, e, unary());
            } else {
                return e;
            }
        }
    }

    ExprPtr unary() {
        if (consume('-')) {
            ExprPtr sub = unary();
            if (sub->kind == Expr::Kind::Constant) return Expr::constant(-sub->value);
            return Expr::unary(UnaryOp::Neg, std::move(sub));
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        skip_space();
        if (consume('^')) {
            std::size_t exp_pos = pos_;
            ExprPtr exponent = unary(); // right associative, minus sign allowed
            if (contains_coordinate(*exponent))
                throw NonConstantExponent("exponent must be a constant", exp_pos);
            if (exponent->kind != Expr::Kind::Constant) {
                double v;
                try {
                    v = eval(*exponent, {});
                } catch (const Error&) {
                    throw SyntaxError("exponent does not evaluate to a finite constant", exp_pos);
                }
                exponent = Expr::constant(v);
            }
            return Expr::binary(BinaryOp::Pow, std::move(base), std::move(exponent));
        }
        return base;
    }

    ExprPtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expression();
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // 'e' belongs to an identifier or is junk; not ours
            }
        }
        const std::string s(text_.substr(start, pos_ - start));
        try {
            return Expr::constant(std::stod(s));
        } catch (const std::exception&) {
            throw SyntaxError("malformed number '" + s + "'", start);
        }
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            UnaryOp op;
            if (name == "sin") op = UnaryOp::Sin;
            else if (name == "cos") op = UnaryOp::Cos;
            else if (name == "exp") op = UnaryOp::Exp;
            else if (name == "ln") op = UnaryOp::Ln;
            else if (name == "sqrt") op = UnaryOp::Sqrt;
            else throw UnknownIdentifier("unknown function '" + name + "'", start);
            ++pos_;
            ExprPtr arg = expression();
            if (!consume(')')) throw SyntaxError("expected ')' after function argument", pos_);
            return Expr::unary(op, std::move(arg));
        }
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (coords_[i] == name) return Expr::coordinate(static_cast<int>(i));
        throw UnknownIdentifier("unknown identifier '" + name + "'", start);
    }

    std::string_view text_;
    std::span<const std::string> coords_;
    std::size_t pos_ = 0;
};

// precedence levels: add/sub 1, mul/div 2, unary minus 3, pow 4, atoms 5
int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Constant: return e.value < 0.0 ? 3 : 5;
    case Expr::Kind::Coordinate: return 5;
    case Expr::Kind::Unary: return e.uop == UnaryOp::Neg ? 3 : 5;
    case Expr::Kind::Binary:
        switch (e.bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
        }
    }
    return 5;
}

std::string format_constant(double v) {
    // shortest representation that round-trips
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

void print(const Expr& e, std::span<const std::string> coords, int min_prec, std::string& out) {
    const int prec = precedence(e);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (e.kind) {
    case Expr::Kind::Constant: out += format_constant(e.value); break;
    case Expr::Kind::Coordinate: out += coords[e.coord]; break;
    case Expr::Kind::Unary:
        switch (e.uop) {
        case UnaryOp::Neg:
            out += '-';
            print(*e.lhs, coords, 3, out);
            break;
        case UnaryOp::Sin: out += "sin("; print(*e.lhs, coords, 0, out); out += ')'; break;
        case UnaryOp::Cos: out += "cos("; print(*e.lhs, coords, 0, out); out += ')'; break;
        case UnaryOp::Exp: out += "exp("; print(*e.lhs, coords, 0, out); out += ')'; break;
        case UnaryOp::Ln: out += "ln("; print(*e.lhs, coords, 0, out); out += ')'; break;
        case UnaryOp::Sqrt: out += "sqrt("; print(*e.lhs, coords, 0, out); out += ')'; break;
        }
        break;
    case Expr::Kind::Binary:
        switch (e.bop) {
        case BinaryOp::Add:
            print(*e.lhs, coords, 1, out);
            out += " + ";
            print(*e.rhs, coords, 2, out);
            break;
        case BinaryOp::Sub:
            print(*e.lhs, coords, 1, out);
            out += " - ";
            print(*e.rhs, coords, 2, out);
            break;
        case BinaryOp::Mul:
            print(*e.lhs, coords, 2, out);
            out += '*';
            print(*e.rhs, coords, 3, out);
            break;
        case BinaryOp::Div:
            print(*e.lhs, coords, 2, out);
            out += '/';
            print(*e.rhs, coords, 3, out);
            break;
        case BinaryOp::Pow:
            print(*e.lhs, coords, 5, out);
            out += '^';
            print(*e.rhs, coords, 3, out);
            break;
        }
        break;
    }
    if (parens) out += ')';
}

} // namespace

ExprPtr parse_expression(std::string_view text, std::span<const std::string> coord_names) {
    return Parser(text, coord_names).parse();
}

std::string to_string(const Expr& e, std::span<const std::string> coord_names) {
    std::string out;
    print(e, coord_names, 0, out);
    return out;
}

bool equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Constant: return a.value == b.value;
    case Expr::Kind::Coordinate: return a.coord == b.coord;
    case Expr::Kind::Unary: return a.uop == b.uop && equal(*a.lhs, *b.lhs);
    case Expr::Kind::Binary:
        return a.bop == b.bop && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
    return false;
}

double eval(const Expr& e, std::span<const double> point) {
    switch (e.kind) {
    case Expr::Kind::Constant: return e.value;
    case Expr::Kind::Coordinate:
        if (e.coord >= static_cast<int>(point.size()))
            throw IndexOutOfRange("coordinate index beyond point dimension");
        return point[e.coord];
    case Expr::Kind::Unary: {
        double v = eval(*e.lhs, point);
        switch (e.uop) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
        case UnaryOp::Exp: return std::exp(v);
        case UnaryOp::Ln:
            if (v <= 0.0) throw DomainError("ln of non-positive value");
            return std::log(v);
        case UnaryOp::Sqrt:
            if (v < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(v);
        }
        break;
    }
    case Expr::Kind::Binary: {
        double a = eval(*e.lhs, point);
        double b = eval(*e.rhs, point);
        switch (e.bop) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
            if (b == 0.0) throw SingularPointError("division by zero");
            return a / b;
        case BinaryOp::Pow: {
            if (a < 0.0 && b != std::nearbyint(b))
                throw DomainError("pow of negative base with non-integer exponent");
            if (a == 0.0 && b < 0.0) throw SingularPointError("zero base with negative exponent");
            return std::pow(a, b);
        }
        }
        break;
    }
    }
    throw Error("corrupt expression node");
}

jets::Jet eval_jet(const Expr& e, std::span<const double> point, int order) {
    const int dim = static_cast<int>(point.size());
    switch (e.kind) {
    case Expr::Kind::Constant: return jets::Jet::constant(e.value, dim, order);
    case Expr::Kind::Coordinate: return jets::Jet::variable(point[e.coord], e.coord, dim, order);
    case Expr::Kind::Unary: {
        jets::Jet v = eval_jet(*e.lhs, point, order);
        switch (e.uop) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Sin: return jets::sin(v);
        case UnaryOp::Cos: return jets::cos(v);
        case UnaryOp::Exp: return jets::exp(v);
        case UnaryOp::Ln: return jets::log(v);
        case UnaryOp::Sqrt: return jets::sqrt(v);
        }
        break;
    }
    case Expr::Kind::Binary: {
        if (e.bop == BinaryOp::Pow)
            return jets::pow(eval_jet(*e.lhs, point, order), e.rhs->value);
        jets::Jet a = eval_jet(*e.lhs, point, order);
        jets::Jet b = eval_jet(*e.rhs, point, order);
        switch (e.bop) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Pow: break; // handled above
        }
        break;
    }
    }
    throw Error("corrupt expression node");
}

} // namespace cel::dsl
