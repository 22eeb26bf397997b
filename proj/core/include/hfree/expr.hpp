#pragma once

// Immutable scalar expression trees over named coordinates.
//
// An Expr is a cheap-to-copy handle onto a shared, immutable node. The
// grammar is closed over {+, -, *, /, integer ^, sin, cos, exp}, which keeps
// symbolic differentiation closed as well.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hfree {

enum class Op : std::uint8_t { Const, Coord, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };

class Expr {
public:
    /// Const 0.
    Expr();
    /// Const `value`. Implicit so that `2.0 * x` reads naturally.
    Expr(double value);  // NOLINT(google-explicit-constructor)

    static Expr constant(double value);
    static Expr coord(std::string name);

    // Raw node constructors: no simplification is applied.
    static Expr neg(Expr operand);
    static Expr binary(Op op, Expr lhs, Expr rhs);
    static Expr pow(Expr base, int exponent);
    static Expr call(Op fn, Expr argument);

    Op op() const noexcept;
    bool is_const() const noexcept { return op() == Op::Const; }
    bool is_const(double value) const noexcept;

    /// Literal value; only valid for Const.
    double value() const;
    /// Coordinate name; only valid for Coord.
    const std::string& name() const;
    /// Integer exponent; only valid for Pow.
    int exponent() const;
    /// Single child of Neg, Pow (the base), Sin, Cos and Exp.
    const Expr& operand() const;
    const Expr& lhs() const;
    const Expr& rhs() const;

    /// Node-by-node structural comparison.
    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

Expr operator-(const Expr& e);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);

/// Coordinate name -> value.
using Binding = std::map<std::string, double, std::less<>>;
using Substitution = std::map<std::string, Expr, std::less<>>;

/// Parses the expression DSL. Throws ParseError.
Expr parse(std::string_view src);

/// Prints in DSL syntax; parse(to_string(e)) rebuilds a tree that evaluates
/// bit-identically to e.
std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

/// Throws EvalError on unbound coordinates, division by zero and 0^-n.
double eval(const Expr& e, const Binding& point);

Expr diff(const Expr& e, std::string_view coord);

/// Semantics-preserving normalization: constant folding, 0/1 identities,
/// Neg/Sub normalization, like-term and like-power merging. Idempotent.
Expr simplify(const Expr& e);

std::set<std::string> free_vars(const Expr& e);

/// Replaces coordinates by expressions (no simplification).
Expr substitute(const Expr& e, const Substitution& replacements);

/// Expression compiled against an ordered coordinate list. Coordinates are
/// resolved when compiling, so evaluation is a flat stack program over a
/// point given in that order.
class CompiledExpr {
public:
    CompiledExpr() = default;
    /// Throws EvalError if `e` mentions a coordinate not in `coords`.
    CompiledExpr(const Expr& e, std::span<const std::string> coords);

    double operator()(std::span<const double> point) const;

private:
    struct Instr {
        Op op;
        int arg;  // coordinate index or exponent
        double value;
    };
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
};

}  // namespace hfree
