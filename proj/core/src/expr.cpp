#include "horizon/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace horizon {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_integer_valued(double x) {
    return std::isfinite(x) && x == std::nearbyint(x);
}

[[noreturn]] void eval_fail(const std::string& what) { throw EvalError(what); }

// Domain-checked primitives shared by both evaluation paths. The plain
// double versions come first so the evaluation template sees them.

double checked_sqrt(double v) {
    if (v < 0.0) eval_fail("sqrt of negative value");
    return std::sqrt(v);
}

double checked_log(double v) {
    if (v <= 0.0) eval_fail("log of non-positive value");
    return std::log(v);
}

double checked_abs(double v) { return std::fabs(v); }

// x^y with negative bases allowed only for integer exponents and 0^y
// only for y >= 0.
double checked_pow(double x, double y) {
    if (x == 0.0 && y < 0.0) eval_fail("0 raised to a negative power");
    if (x < 0.0 && !is_integer_valued(y)) eval_fail("negative base with non-integer exponent");
    return std::pow(x, y);
}

double checked_exp(double x) { return std::exp(x); }
double checked_sin(double x) { return std::sin(x); }
double checked_cos(double x) { return std::cos(x); }

Dual checked_sqrt(Dual v) {
    if (v.value < 0.0) eval_fail("sqrt of negative value");
    if (v.value == 0.0 && v.deriv != 0.0) eval_fail("derivative of sqrt at 0 is unbounded");
    return v.deriv == 0.0 ? Dual{std::sqrt(v.value), 0.0} : sqrt(v);
}

Dual checked_log(Dual v) {
    if (v.value <= 0.0) eval_fail("log of non-positive value");
    return log(v);
}

Dual checked_abs(Dual v) {
    if (v.value == 0.0 && v.deriv != 0.0) eval_fail("derivative of abs at 0 is undefined");
    return abs(v);
}

Dual checked_pow(Dual x, Dual y) {
    if (x.value == 0.0 && y.value < 0.0) eval_fail("0 raised to a negative power");
    if (x.value < 0.0 && !is_integer_valued(y.value))
        eval_fail("negative base with non-integer exponent");

    if (y.deriv == 0.0) {
        // Power rule; also covers negative bases with integer exponents.
        double v = std::pow(x.value, y.value);
        if (x.deriv == 0.0 || y.value == 0.0) return {v, 0.0};
        if (x.value == 0.0 && y.value < 1.0)
            eval_fail("derivative of x^p at 0 is unbounded for p < 1");
        return {v, y.value * std::pow(x.value, y.value - 1.0) * x.deriv};
    }
    // Varying exponent: d(x^y) = x^y (y' ln x + y x'/x) needs x > 0.
    if (x.value <= 0.0) eval_fail("non-positive base with varying exponent");
    double v = std::pow(x.value, y.value);
    return {v, v * (y.deriv * std::log(x.value) + y.value * x.deriv / x.value)};
}

Dual checked_exp(Dual x) { return exp(x); }
Dual checked_sin(Dual x) { return sin(x); }
Dual checked_cos(Dual x) { return cos(x); }

double finite_or_fail(double v) {
    if (!std::isfinite(v)) eval_fail("non-finite result");
    return v;
}

Dual finite_or_fail(Dual v) {
    if (!std::isfinite(v.value)) eval_fail("non-finite result");
    if (!std::isfinite(v.deriv)) eval_fail("non-finite derivative");
    return v;
}

std::string literal_to_string(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

// ---------------------------------------------------------------------------
// Parser

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    Expr run() {
        Expr e;
        out_ = &e;
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        e.root_ = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    Expr* out_ = nullptr;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    std::int32_t add_node(Expr::Node n) {
        out_->nodes_.push_back(n);
        return static_cast<std::int32_t>(out_->nodes_.size() - 1);
    }

    std::int32_t make_binary(Expr::Kind k, std::int32_t a, std::int32_t b) {
        return add_node({k, a, b, 0.0, -1});
    }

    std::int32_t parse_sum() {
        std::int32_t lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make_binary(Expr::Kind::Add, lhs, parse_term());
            else if (accept('-')) lhs = make_binary(Expr::Kind::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    std::int32_t parse_term() {
        std::int32_t lhs = parse_factor();
        for (;;) {
            if (accept('*')) lhs = make_binary(Expr::Kind::Mul, lhs, parse_factor());
            else if (accept('/')) lhs = make_binary(Expr::Kind::Div, lhs, parse_factor());
            else return lhs;
        }
    }

    // Unary minus binds looser than '^': -x^2 parses as -(x^2).
    std::int32_t parse_factor() {
        if (accept('-')) return add_node({Expr::Kind::Neg, parse_factor(), -1, 0.0, -1});
        return parse_power();
    }

    std::int32_t parse_power() {
        std::int32_t base = parse_primary();
        if (accept('^')) return make_binary(Expr::Kind::Pow, base, parse_factor());
        return base;
    }

    std::int32_t parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];

        if (c == '(') {
            ++pos_;
            std::int32_t inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            return parse_number();
        }
        if (is_ident_start(c)) return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::int32_t parse_number() {
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return add_node({Expr::Kind::Literal, -1, -1, v, -1});
    }

    std::int32_t parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        std::string name(src_.substr(start, pos_ - start));

        if (peek() != '(') {
            auto& names = out_->names_;
            auto it = std::find(names.begin(), names.end(), name);
            std::int32_t id = it == names.end()
                                  ? (names.push_back(name),
                                     static_cast<std::int32_t>(names.size() - 1))
                                  : static_cast<std::int32_t>(it - names.begin());
            return add_node({Expr::Kind::Variable, -1, -1, 0.0, id});
        }

        expect('(');
        if (name == "pow") {
            std::int32_t a = parse_sum();
            expect(',');
            std::int32_t b = parse_sum();
            expect(')');
            return make_binary(Expr::Kind::Pow, a, b);
        }

        Expr::Kind kind;
        if (name == "sqrt") kind = Expr::Kind::Sqrt;
        else if (name == "log") kind = Expr::Kind::Log;
        else if (name == "exp") kind = Expr::Kind::Exp;
        else if (name == "abs") kind = Expr::Kind::Abs;
        else if (name == "sin") kind = Expr::Kind::Sin;
        else if (name == "cos") kind = Expr::Kind::Cos;
        else throw ParseError("unknown function '" + name + "'", start);

        std::int32_t arg = parse_sum();
        expect(')');
        return add_node({kind, arg, -1, 0.0, -1});
    }
};

Expr Expr::parse(std::string_view source) { return ExprParser(source).run(); }

// ---------------------------------------------------------------------------
// Printing and structure

std::string Expr::render(std::int32_t idx) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
    case Kind::Literal: return literal_to_string(n.literal);
    case Kind::Variable: return names_[static_cast<std::size_t>(n.name)];
    case Kind::Add: return "(" + render(n.a) + " + " + render(n.b) + ")";
    case Kind::Sub: return "(" + render(n.a) + " - " + render(n.b) + ")";
    case Kind::Mul: return "(" + render(n.a) + " * " + render(n.b) + ")";
    case Kind::Div: return "(" + render(n.a) + " / " + render(n.b) + ")";
    case Kind::Pow: return "(" + render(n.a) + " ^ " + render(n.b) + ")";
    case Kind::Neg: return "(-" + render(n.a) + ")";
    case Kind::Sqrt: return "sqrt(" + render(n.a) + ")";
    case Kind::Log: return "log(" + render(n.a) + ")";
    case Kind::Exp: return "exp(" + render(n.a) + ")";
    case Kind::Abs: return "abs(" + render(n.a) + ")";
    case Kind::Sin: return "sin(" + render(n.a) + ")";
    case Kind::Cos: return "cos(" + render(n.a) + ")";
    }
    return {};
}

std::string Expr::to_string() const { return root_ < 0 ? std::string() : render(root_); }

std::vector<std::string> Expr::variables() const {
    std::vector<std::string> vars = names_;
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

// The rendering is canonical (fully parenthesized, shortest-round-trip
// literals), so textual equality is structural equality.
bool Expr::equals(const Expr& other) const { return to_string() == other.to_string(); }

// ---------------------------------------------------------------------------
// Evaluation

template <typename T>
T BoundExpr::eval_impl(std::int32_t idx, std::span<const T> slots) const {
    const Expr::Node& n = nodes_[static_cast<std::size_t>(idx)];
    using K = Expr::Kind;
    switch (n.kind) {
    case K::Literal: return T(n.literal);
    case K::Variable: return slots[static_cast<std::size_t>(n.name)];
    case K::Add: return eval_impl(n.a, slots) + eval_impl(n.b, slots);
    case K::Sub: return eval_impl(n.a, slots) - eval_impl(n.b, slots);
    case K::Mul: return eval_impl(n.a, slots) * eval_impl(n.b, slots);
    case K::Div: return eval_impl(n.a, slots) / eval_impl(n.b, slots);
    case K::Pow: return checked_pow(eval_impl(n.a, slots), eval_impl(n.b, slots));
    case K::Neg: return -eval_impl(n.a, slots);
    case K::Sqrt: return checked_sqrt(eval_impl(n.a, slots));
    case K::Log: return checked_log(eval_impl(n.a, slots));
    case K::Exp: return checked_exp(eval_impl(n.a, slots));
    case K::Abs: return checked_abs(eval_impl(n.a, slots));
    case K::Sin: return checked_sin(eval_impl(n.a, slots));
    case K::Cos: return checked_cos(eval_impl(n.a, slots));
    }
    eval_fail("corrupt expression node");
}

double BoundExpr::eval(std::span<const double> slots) const {
    if (root_ < 0) eval_fail("empty expression");
    return finite_or_fail(eval_impl<double>(root_, slots));
}

Dual BoundExpr::eval_dual(std::span<const double> slots, int wrt) const {
    if (root_ < 0) eval_fail("empty expression");
    Dual stack_slots[8];
    std::vector<Dual> heap_slots;
    std::span<Dual> dual_slots;
    if (slots.size() <= 8) {
        dual_slots = std::span<Dual>(stack_slots, slots.size());
    } else {
        heap_slots.resize(slots.size());
        dual_slots = heap_slots;
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
        dual_slots[i] = {slots[i], static_cast<int>(i) == wrt ? 1.0 : 0.0};
    return finite_or_fail(
        eval_impl<Dual>(root_, std::span<const Dual>(dual_slots.data(), dual_slots.size())));
}

BoundExpr Expr::bind(std::span<const std::string> slot_names) const {
    BoundExpr b;
    b.nodes_ = nodes_;
    b.root_ = root_;
    for (auto& n : b.nodes_) {
        if (n.kind != Kind::Variable) continue;
        const std::string& var = names_[static_cast<std::size_t>(n.name)];
        auto it = std::find(slot_names.begin(), slot_names.end(), var);
        if (it == slot_names.end())
            throw EvalError("variable '" + var + "' is not declared by the problem");
        n.name = static_cast<std::int32_t>(it - slot_names.begin());
    }
    return b;
}

double Expr::eval(const VarMap& bindings) const {
    for (const auto& var : variables())
        if (bindings.find(var) == bindings.end())
            throw EvalError("unbound variable '" + var + "'");
    std::vector<std::string> names;
    std::vector<double> values;
    names.reserve(bindings.size());
    for (const auto& [k, v] : bindings) {
        names.push_back(k);
        values.push_back(v);
    }
    return bind(names).eval(values);
}

Dual Expr::eval_dual(const VarMap& bindings, std::string_view wrt) const {
    for (const auto& var : variables())
        if (bindings.find(var) == bindings.end())
            throw EvalError("unbound variable '" + var + "'");
    std::vector<std::string> names;
    std::vector<double> values;
    int wrt_slot = -1;
    for (const auto& [k, v] : bindings) {
        if (k == wrt) wrt_slot = static_cast<int>(names.size());
        names.push_back(k);
        values.push_back(v);
    }
    if (wrt_slot < 0) throw EvalError("unbound derivative variable '" + std::string(wrt) + "'");
    return bind(names).eval_dual(values, wrt_slot);
}

} // namespace horizon
