#pragma once

#include <string>
#include <vector>

#include "rmiga/problem.hpp"

namespace rmiga {

/// Compiled arithmetic expression in x and y. Grammar: decimal numbers (with
/// exponents), the constants pi and e, the binary operators + - * / ^ (with ^
/// right associative and binding tighter than unary minus), parentheses, the
/// one-argument functions sin cos tan sqrt exp log abs atan, and the
/// two-argument functions atan2 and pow.
class Expression {
public:
    /// Compile the expression, rejecting unknown identifiers, wrong arities,
    /// and malformed syntax with the offending position.
    static Expression parse(const std::string& text);

    double operator()(double x, double y) const;

    /// The expression as a load function (copies the compiled program).
    LoadFunction as_load() const;

private:
    enum class Op : unsigned char {
        push_const,
        push_x,
        push_y,
        add,
        sub,
        mul,
        div,
        pow,
        neg,
        call1,
        call2,
    };

    struct Instr {
        Op op;
        double value = 0.0; // push_const
        int fn = 0;         // call1 / call2 table index
    };

    std::vector<Instr> program_;

    friend struct ExpressionParser;
};

} // namespace rmiga
