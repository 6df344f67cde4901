#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "horizon/dual.hpp"
#include "horizon/errors.hpp"

namespace horizon {

/// Variable bindings for ad-hoc evaluation.
using VarMap = std::map<std::string, double, std::less<>>;

class BoundExpr;

/// Immutable arithmetic expression tree.
///
/// Grammar (loosest to tightest binding):
///   sum     := term (('+'|'-') term)*          left-associative
///   term    := factor (('*'|'/') factor)*      left-associative
///   factor  := '-' factor | power
///   power   := primary ('^' factor)?           right-associative
///   primary := number | identifier | identifier '(' args ')' | '(' sum ')'
///
/// Functions: sqrt, log, exp, abs, sin, cos (one argument) and
/// pow (two arguments; equivalent to '^'). Any other identifier is a
/// variable; whether it is legal is decided when the expression is
/// bound to a problem, not at parse time.
class Expr {
public:
    /// Parses `source`; throws ParseError with a byte offset on bad input.
    static Expr parse(std::string_view source);

    /// Canonical fully-parenthesized rendering. Guaranteed to re-parse
    /// to a structurally identical tree.
    std::string to_string() const;

    /// Sorted list of distinct variable names referenced by the tree.
    std::vector<std::string> variables() const;

    double eval(const VarMap& bindings) const;
    Dual eval_dual(const VarMap& bindings, std::string_view wrt) const;

    /// Resolves every variable to a slot index in `slot_names`; throws
    /// EvalError naming the first variable not in the list. The result
    /// evaluates against a value span without any name lookups.
    BoundExpr bind(std::span<const std::string> slot_names) const;

    /// Structural equality (same shape, same literals, same names).
    bool equals(const Expr& other) const;

    bool empty() const { return nodes_.empty(); }

private:
    friend class BoundExpr;
    friend class ExprParser;

    enum class Kind : std::uint8_t {
        Literal, Variable,
        Add, Sub, Mul, Div, Pow,
        Neg, Sqrt, Log, Exp, Abs, Sin, Cos,
    };

    struct Node {
        Kind kind;
        std::int32_t a = -1;   // left child / unary operand
        std::int32_t b = -1;   // right child
        double literal = 0.0;
        std::int32_t name = -1; // index into names_ for Variable
    };

    std::vector<Node> nodes_;
    std::vector<std::string> names_;
    std::int32_t root_ = -1;

    std::string render(std::int32_t idx) const;
};

/// An Expr whose variables have been resolved to slot indices.
/// Evaluation is allocation-free and thread-safe.
class BoundExpr {
public:
    BoundExpr() = default;

    double eval(std::span<const double> slots) const;

    /// Value and derivative with respect to slot `wrt`.
    Dual eval_dual(std::span<const double> slots, int wrt) const;

    bool empty() const { return nodes_.empty(); }

private:
    friend class Expr;

    std::vector<Expr::Node> nodes_; // Variable nodes carry slot in `name`
    std::int32_t root_ = -1;

    template <typename T>
    T eval_impl(std::int32_t idx, std::span<const T> slots) const;
};

} // namespace horizon
