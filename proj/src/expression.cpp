#include "rmiga/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "rmiga/errors.hpp"

namespace rmiga {

namespace {

constexpr int kMaxStack = 128;

struct Fn1 {
    const char* name;
    double (*fn)(double);
};
struct Fn2 {
    const char* name;
    double (*fn)(double, double);
};

constexpr std::array<Fn1, 8> kUnaryFns = {{{"sin", std::sin},
                                           {"cos", std::cos},
                                           {"tan", std::tan},
                                           {"sqrt", std::sqrt},
                                           {"exp", std::exp},
                                           {"log", std::log},
                                           {"abs", std::fabs},
                                           {"atan", std::atan}}};

constexpr std::array<Fn2, 2> kBinaryFns = {{{"atan2", std::atan2}, {"pow", std::pow}}};

int find_unary(const std::string& name) {
    for (std::size_t i = 0; i < kUnaryFns.size(); ++i)
        if (name == kUnaryFns[i].name)
            return static_cast<int>(i);
    return -1;
}

int find_binary(const std::string& name) {
    for (std::size_t i = 0; i < kBinaryFns.size(); ++i)
        if (name == kBinaryFns[i].name)
            return static_cast<int>(i);
    return -1;
}

} // namespace

struct ExpressionParser {
    const std::string& text;
    std::size_t pos = 0;
    int depth = 0;   // simulated evaluation stack depth
    int max_depth = 0;
    int nesting = 0; // parser recursion guard
    std::vector<Expression::Instr> program;

    using Op = Expression::Op;

    explicit ExpressionParser(const std::string& s) : text(s) {}

    [[noreturn]] void fail(const std::string& message) const {
        throw InvalidArgument("expression: " + message + " at position " + std::to_string(pos));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void emit(Op op, double value = 0.0, int fn = 0) {
        switch (op) {
        case Op::push_const:
        case Op::push_x:
        case Op::push_y:
            ++depth;
            break;
        case Op::neg:
        case Op::call1:
            break;
        default:
            --depth; // binary operators and call2 consume one slot
            break;
        }
        max_depth = std::max(max_depth, depth);
        if (max_depth > kMaxStack)
            fail("expression too deep");
        program.push_back({op, value, fn});
    }

    void parse_full() {
        parse_expr();
        skip_ws();
        if (pos != text.size())
            fail(std::string("unexpected character '") + text[pos] + "'");
        if (depth != 1)
            fail("malformed expression");
    }

    void parse_expr() {
        if (++nesting > 100)
            fail("expression too deeply nested");
        parse_term();
        while (true) {
            if (eat('+'))
                parse_term(), emit(Op::add);
            else if (eat('-'))
                parse_term(), emit(Op::sub);
            else
                break;
        }
        --nesting;
    }

    void parse_term() {
        parse_unary();
        while (true) {
            if (eat('*'))
                parse_unary(), emit(Op::mul);
            else if (eat('/'))
                parse_unary(), emit(Op::div);
            else
                break;
        }
    }

    void parse_unary() {
        int signs = 0;
        while (true) {
            if (eat('-'))
                ++signs;
            else if (eat('+'))
                ;
            else
                break;
        }
        parse_power();
        if (signs % 2 == 1)
            emit(Op::neg);
    }

    void parse_power() {
        parse_primary();
        if (eat('^')) {
            parse_unary(); // right associative, exponent may carry a sign
            emit(Op::pow);
        }
    }

    void parse_primary() {
        const char c = peek();
        if (c == '\0')
            fail("unexpected end of expression");
        if (c == '(') {
            ++pos;
            parse_expr();
            if (!eat(')'))
                fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            parse_identifier();
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    void parse_number() {
        const char* start = text.c_str() + pos;
        char* end = nullptr;
        const double value = std::strtod(start, &end);
        if (end == start)
            fail("invalid number");
        pos += static_cast<std::size_t>(end - start);
        emit(Op::push_const, value);
    }

    void parse_identifier() {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string name = text.substr(start, pos - start);

        if (peek() == '(') {
            const int u = find_unary(name);
            const int b = find_binary(name);
            if (u < 0 && b < 0) {
                pos = start;
                fail("unknown function '" + name + "'");
            }
            ++pos; // '('
            parse_expr();
            int args = 1;
            while (eat(',')) {
                parse_expr();
                ++args;
            }
            if (!eat(')'))
                fail("expected ')'");
            const int expected = u >= 0 ? 1 : 2;
            if (args != expected) {
                pos = start;
                fail("function '" + name + "' expects " + std::to_string(expected) +
                     (expected == 1 ? " argument" : " arguments") + ", got " + std::to_string(args));
            }
            if (u >= 0)
                emit(Op::call1, 0.0, u);
            else
                emit(Op::call2, 0.0, b);
            return;
        }

        if (name == "x")
            emit(Op::push_x);
        else if (name == "y")
            emit(Op::push_y);
        else if (name == "pi")
            emit(Op::push_const, std::numbers::pi);
        else if (name == "e")
            emit(Op::push_const, std::numbers::e);
        else {
            pos = start;
            fail("unknown identifier '" + name + "'");
        }
    }
};

Expression Expression::parse(const std::string& text) {
    ExpressionParser parser(text);
    parser.parse_full();
    Expression expr;
    expr.program_ = std::move(parser.program);
    return expr;
}

double Expression::operator()(double x, double y) const {
    double stack[kMaxStack];
    int top = -1;
    for (const Instr& instr : program_) {
        switch (instr.op) {
        case Op::push_const:
            stack[++top] = instr.value;
            break;
        case Op::push_x:
            stack[++top] = x;
            break;
        case Op::push_y:
            stack[++top] = y;
            break;
        case Op::add:
            stack[top - 1] += stack[top];
            --top;
            break;
        case Op::sub:
            stack[top - 1] -= stack[top];
            --top;
            break;
        case Op::mul:
            stack[top - 1] *= stack[top];
            --top;
            break;
        case Op::div:
            stack[top - 1] /= stack[top];
            --top;
            break;
        case Op::pow:
            stack[top - 1] = std::pow(stack[top - 1], stack[top]);
            --top;
            break;
        case Op::neg:
            stack[top] = -stack[top];
            break;
        case Op::call1:
            stack[top] = kUnaryFns[instr.fn].fn(stack[top]);
            break;
        case Op::call2:
            stack[top - 1] = kBinaryFns[instr.fn].fn(stack[top - 1], stack[top]);
            --top;
            break;
        }
    }
    return stack[0];
}

LoadFunction Expression::as_load() const {
    return [expr = *this](double x, double y) { return expr(x, y); };
}

} // namespace rmiga
