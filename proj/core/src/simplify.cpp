// Best-effort algebraic normalization.
//
// Each make_* assumes its arguments are already simplified and returns a
// simplified node. simplify() rebuilds bottom-up through them and repeats
// until the tree stops changing, which makes it idempotent.

#include <cmath>
#include <optional>
#include <utility>

#include "hfree/expr.hpp"

namespace hfree {
namespace {

constexpr int kMaxPasses = 64;

bool finite(double v) { return std::isfinite(v); }

bool is_negative_const(const Expr& e) { return e.is_const() && std::signbit(e.value()) && e.value() != 0.0; }

// e == c * rest with c a literal; returns (1, e) otherwise.
std::pair<double, Expr> split_coefficient(const Expr& e) {
    if (e.op() == Op::Mul && e.lhs().is_const()) return {e.lhs().value(), e.rhs()};
    return {1.0, e};
}

// e == base ^ n; returns (e, 1) otherwise.
std::pair<Expr, int> split_power(const Expr& e) {
    if (e.op() == Op::Pow) return {e.operand(), e.exponent()};
    return {e, 1};
}

Expr make_neg(const Expr& a);
Expr make_add(const Expr& a, const Expr& b);
Expr make_sub(const Expr& a, const Expr& b);
Expr make_mul(const Expr& a, const Expr& b);
Expr make_div(const Expr& a, const Expr& b);
Expr make_pow(const Expr& base, int n);
Expr make_call(Op fn, const Expr& a);

Expr make_neg(const Expr& a) {
    if (a.is_const()) return Expr::constant(0.0 - a.value());
    if (a.op() == Op::Neg) return a.operand();
    if (a.op() == Op::Sub) return make_sub(a.rhs(), a.lhs());
    if (a.op() == Op::Mul && a.lhs().is_const()) return make_mul(Expr::constant(-a.lhs().value()), a.rhs());
    return Expr::neg(a);
}

// Shared like-term merge for a + b (sign = +1) and a - b (sign = -1).
std::optional<Expr> merge_like_terms(const Expr& a, const Expr& b, double sign) {
    if (a.is_const() || b.is_const()) return std::nullopt;
    auto [ca, ra] = split_coefficient(a);
    auto [cb, rb] = split_coefficient(b);
    if (!(ra == rb)) return std::nullopt;
    const double c = ca + sign * cb;
    if (!finite(c)) return std::nullopt;
    return make_mul(Expr::constant(c), ra);
}

Expr make_add(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) {
        const double v = a.value() + b.value();
        if (finite(v)) return Expr::constant(v);
    }
    if (a.is_const(0.0)) return b;
    if (b.is_const(0.0)) return a;
    if (b.op() == Op::Neg) return make_sub(a, b.operand());
    if (a.op() == Op::Neg) return make_sub(b, a.operand());
    if (is_negative_const(b)) return make_sub(a, Expr::constant(-b.value()));
    if (b.op() == Op::Mul && is_negative_const(b.lhs())) {
        return make_sub(a, make_mul(Expr::constant(-b.lhs().value()), b.rhs()));
    }
    if (auto merged = merge_like_terms(a, b, 1.0)) return *merged;
    return Expr::binary(Op::Add, a, b);
}

Expr make_sub(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) {
        const double v = a.value() - b.value();
        if (finite(v)) return Expr::constant(v);
    }
    if (b.is_const(0.0)) return a;
    if (a.is_const(0.0)) return make_neg(b);
    if (a == b) return Expr::constant(0.0);
    if (b.op() == Op::Neg) return make_add(a, b.operand());
    if (a.op() == Op::Neg) return make_neg(make_add(a.operand(), b));
    if (is_negative_const(b)) return make_add(a, Expr::constant(-b.value()));
    if (b.op() == Op::Mul && is_negative_const(b.lhs())) {
        return make_add(a, make_mul(Expr::constant(-b.lhs().value()), b.rhs()));
    }
    if (auto merged = merge_like_terms(a, b, -1.0)) return *merged;
    return Expr::binary(Op::Sub, a, b);
}

Expr make_mul(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) {
        const double v = a.value() * b.value();
        if (finite(v)) return Expr::constant(v);
    }
    if (a.is_const(0.0) || b.is_const(0.0)) return Expr::constant(0.0);
    if (a.is_const(1.0)) return b;
    if (b.is_const(1.0)) return a;
    if (a.is_const(-1.0)) return make_neg(b);
    if (b.is_const(-1.0)) return make_neg(a);
    if (a.op() == Op::Neg) return make_neg(make_mul(a.operand(), b));
    if (b.op() == Op::Neg) return make_neg(make_mul(a, b.operand()));
    // Literals move to the left and combine.
    if (b.is_const()) return make_mul(b, a);
    if (a.is_const() && b.op() == Op::Mul && b.lhs().is_const()) {
        const double v = a.value() * b.lhs().value();
        if (finite(v)) return make_mul(Expr::constant(v), b.rhs());
    }
    if (!a.is_const() && b.op() == Op::Mul && b.lhs().is_const()) {
        return make_mul(b.lhs(), make_mul(a, b.rhs()));
    }
    if (a.op() == Op::Mul && a.lhs().is_const()) {
        return make_mul(a.lhs(), make_mul(a.rhs(), b));
    }
    if (!a.is_const()) {
        auto [base_a, na] = split_power(a);
        auto [base_b, nb] = split_power(b);
        if (base_a == base_b) return make_pow(base_a, na + nb);
    }
    return Expr::binary(Op::Mul, a, b);
}

Expr make_div(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const() && b.value() != 0.0) {
        const double v = a.value() / b.value();
        if (finite(v)) return Expr::constant(v);
    }
    if (b.is_const(1.0)) return a;
    if (b.is_const(-1.0)) return make_neg(a);
    if (a.is_const(0.0) && !b.is_const(0.0)) return Expr::constant(0.0);
    if (a.op() == Op::Neg) return make_neg(make_div(a.operand(), b));
    if (b.op() == Op::Neg) return make_neg(make_div(a, b.operand()));
    if (a == b && !a.is_const()) return Expr::constant(1.0);
    return Expr::binary(Op::Div, a, b);
}

Expr make_pow(const Expr& base, int n) {
    if (n == 0) return Expr::constant(1.0);
    if (n == 1) return base;
    if (base.is_const()) {
        if (!(base.value() == 0.0 && n < 0)) {
            const double v = std::pow(base.value(), static_cast<double>(n));
            if (finite(v)) return Expr::constant(v);
        }
        return Expr::pow(base, n);
    }
    if (base.op() == Op::Pow) {
        const long long m = static_cast<long long>(base.exponent()) * n;
        if (m >= -(1LL << 30) && m <= (1LL << 30)) return make_pow(base.operand(), static_cast<int>(m));
    }
    if (base.op() == Op::Neg) {
        Expr p = make_pow(base.operand(), n);
        return (n % 2 == 0) ? p : make_neg(p);
    }
    return Expr::pow(base, n);
}

Expr make_call(Op fn, const Expr& a) {
    if (a.is_const()) {
        const double v = fn == Op::Sin ? std::sin(a.value())
                         : fn == Op::Cos ? std::cos(a.value())
                                         : std::exp(a.value());
        if (finite(v)) return Expr::constant(v);
    }
    if (a.op() == Op::Neg) {
        if (fn == Op::Sin) return make_neg(Expr::call(Op::Sin, a.operand()));
        if (fn == Op::Cos) return Expr::call(Op::Cos, a.operand());
    }
    return Expr::call(fn, a);
}

Expr simplify_pass(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Coord:
            return e;
        case Op::Neg:
            return make_neg(simplify_pass(e.operand()));
        case Op::Add:
            return make_add(simplify_pass(e.lhs()), simplify_pass(e.rhs()));
        case Op::Sub:
            return make_sub(simplify_pass(e.lhs()), simplify_pass(e.rhs()));
        case Op::Mul:
            return make_mul(simplify_pass(e.lhs()), simplify_pass(e.rhs()));
        case Op::Div:
            return make_div(simplify_pass(e.lhs()), simplify_pass(e.rhs()));
        case Op::Pow:
            return make_pow(simplify_pass(e.operand()), e.exponent());
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
            return make_call(e.op(), simplify_pass(e.operand()));
    }
    return e;
}

}  // namespace

Expr simplify(const Expr& e) {
    Expr current = simplify_pass(e);
    for (int pass = 1; pass < kMaxPasses; ++pass) {
        Expr next = simplify_pass(current);
        if (next == current) return current;
        current = std::move(next);
    }
    return current;
}

}  // namespace hfree
