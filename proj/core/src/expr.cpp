#include "hfree/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hfree/error.hpp"

namespace hfree {

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;
    int exponent = 0;
    std::string name;
    std::array<Expr, 2> children{Expr(nullptr), Expr(nullptr)};
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(double value) : Expr(constant(value)) {}

Expr Expr::constant(double value) {
    auto node = std::make_shared<Node>();
    node->op = Op::Const;
    node->value = value;
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr Expr::coord(std::string name) {
    auto node = std::make_shared<Node>();
    node->op = Op::Coord;
    node->name = std::move(name);
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr Expr::neg(Expr operand) {
    auto node = std::make_shared<Node>();
    node->op = Op::Neg;
    node->children[0] = std::move(operand);
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div) {
        throw std::invalid_argument("Expr::binary: not a binary operator");
    }
    auto node = std::make_shared<Node>();
    node->op = op;
    node->children[0] = std::move(lhs);
    node->children[1] = std::move(rhs);
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr Expr::pow(Expr base, int exponent) {
    auto node = std::make_shared<Node>();
    node->op = Op::Pow;
    node->exponent = exponent;
    node->children[0] = std::move(base);
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr Expr::call(Op fn, Expr argument) {
    if (fn != Op::Sin && fn != Op::Cos && fn != Op::Exp) {
        throw std::invalid_argument("Expr::call: not a function");
    }
    auto node = std::make_shared<Node>();
    node->op = fn;
    node->children[0] = std::move(argument);
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Op Expr::op() const noexcept { return node_->op; }

bool Expr::is_const(double value) const noexcept {
    return node_->op == Op::Const && node_->value == value;
}

double Expr::value() const {
    if (op() != Op::Const) throw std::logic_error("Expr::value on non-constant");
    return node_->value;
}

const std::string& Expr::name() const {
    if (op() != Op::Coord) throw std::logic_error("Expr::name on non-coordinate");
    return node_->name;
}

int Expr::exponent() const {
    if (op() != Op::Pow) throw std::logic_error("Expr::exponent on non-power");
    return node_->exponent;
}

const Expr& Expr::operand() const {
    switch (op()) {
        case Op::Neg:
        case Op::Pow:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
            return node_->children[0];
        default:
            throw std::logic_error("Expr::operand on node without a single child");
    }
}

const Expr& Expr::lhs() const {
    if (op() < Op::Add || op() > Op::Div) throw std::logic_error("Expr::lhs on non-binary node");
    return node_->children[0];
}

const Expr& Expr::rhs() const {
    if (op() < Op::Add || op() > Op::Div) throw std::logic_error("Expr::rhs on non-binary node");
    return node_->children[1];
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.op != y.op) return false;
    switch (x.op) {
        case Op::Const:
            // Bitwise-identical literal; distinguishes 0 from -0.
            return x.value == y.value && std::signbit(x.value) == std::signbit(y.value);
        case Op::Coord:
            return x.name == y.name;
        case Op::Pow:
            return x.exponent == y.exponent && x.children[0] == y.children[0];
        case Op::Neg:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
            return x.children[0] == y.children[0];
        default:
            return x.children[0] == y.children[0] && x.children[1] == y.children[1];
    }
}

Expr operator-(const Expr& e) { return Expr::neg(e); }
Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr pow(const Expr& base, int exponent) { return Expr::pow(base, exponent); }
Expr sin(const Expr& e) { return Expr::call(Op::Sin, e); }
Expr cos(const Expr& e) { return Expr::call(Op::Cos, e); }
Expr exp(const Expr& e) { return Expr::call(Op::Exp, e); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

double apply_div(double num, double den) {
    if (den == 0.0) throw EvalError("division by zero");
    return num / den;
}

double apply_pow(double base, int exponent) {
    if (base == 0.0 && exponent < 0) throw EvalError("zero raised to a negative power");
    return std::pow(base, static_cast<double>(exponent));
}

}  // namespace detail

double eval(const Expr& e, const Binding& point) {
    switch (e.op()) {
        case Op::Const:
            return e.value();
        case Op::Coord: {
            auto it = point.find(e.name());
            if (it == point.end()) throw EvalError("unbound coordinate '" + e.name() + "'");
            return it->second;
        }
        case Op::Neg:
            return -eval(e.operand(), point);
        case Op::Add:
            return eval(e.lhs(), point) + eval(e.rhs(), point);
        case Op::Sub:
            return eval(e.lhs(), point) - eval(e.rhs(), point);
        case Op::Mul:
            return eval(e.lhs(), point) * eval(e.rhs(), point);
        case Op::Div: {
            const double num = eval(e.lhs(), point);
            return detail::apply_div(num, eval(e.rhs(), point));
        }
        case Op::Pow:
            return detail::apply_pow(eval(e.operand(), point), e.exponent());
        case Op::Sin:
            return std::sin(eval(e.operand(), point));
        case Op::Cos:
            return std::cos(eval(e.operand(), point));
        case Op::Exp:
            return std::exp(eval(e.operand(), point));
    }
    throw std::logic_error("eval: unknown node");
}

namespace {

void collect_vars(const Expr& e, std::set<std::string>& out) {
    switch (e.op()) {
        case Op::Const:
            return;
        case Op::Coord:
            out.insert(e.name());
            return;
        case Op::Neg:
        case Op::Pow:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
            collect_vars(e.operand(), out);
            return;
        default:
            collect_vars(e.lhs(), out);
            collect_vars(e.rhs(), out);
    }
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    collect_vars(e, out);
    return out;
}

Expr substitute(const Expr& e, const Substitution& replacements) {
    switch (e.op()) {
        case Op::Const:
            return e;
        case Op::Coord: {
            auto it = replacements.find(e.name());
            return it == replacements.end() ? e : it->second;
        }
        case Op::Neg:
            return Expr::neg(substitute(e.operand(), replacements));
        case Op::Pow:
            return Expr::pow(substitute(e.operand(), replacements), e.exponent());
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
            return Expr::call(e.op(), substitute(e.operand(), replacements));
        default:
            return Expr::binary(e.op(), substitute(e.lhs(), replacements),
                                substitute(e.rhs(), replacements));
    }
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

Expr diff_raw(const Expr& e, std::string_view x) {
    switch (e.op()) {
        case Op::Const:
            return Expr(0.0);
        case Op::Coord:
            return Expr(e.name() == x ? 1.0 : 0.0);
        case Op::Neg:
            return -diff_raw(e.operand(), x);
        case Op::Add:
            return diff_raw(e.lhs(), x) + diff_raw(e.rhs(), x);
        case Op::Sub:
            return diff_raw(e.lhs(), x) - diff_raw(e.rhs(), x);
        case Op::Mul:
            return diff_raw(e.lhs(), x) * e.rhs() + e.lhs() * diff_raw(e.rhs(), x);
        case Op::Div:
            return (diff_raw(e.lhs(), x) * e.rhs() - e.lhs() * diff_raw(e.rhs(), x)) /
                   pow(e.rhs(), 2);
        case Op::Pow: {
            const int n = e.exponent();
            if (n == 0) return Expr(0.0);
            return Expr(static_cast<double>(n)) * pow(e.operand(), n - 1) *
                   diff_raw(e.operand(), x);
        }
        case Op::Sin:
            return cos(e.operand()) * diff_raw(e.operand(), x);
        case Op::Cos:
            return -(sin(e.operand()) * diff_raw(e.operand(), x));
        case Op::Exp:
            return e * diff_raw(e.operand(), x);
    }
    throw std::logic_error("diff: unknown node");
}

}  // namespace

Expr diff(const Expr& e, std::string_view coord) { return simplify(diff_raw(simplify(e), coord)); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Binding strength used for parenthesization.
int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add:
        case Op::Sub:
            return 1;
        case Op::Mul:
        case Op::Div:
            return 2;
        case Op::Neg:
            return 3;
        case Op::Pow:
            return 4;
        default:
            return 5;
    }
}

void print_number(std::ostream& os, double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(v));
    if (ec != std::errc{}) throw std::logic_error("to_chars failed");
    if (std::signbit(v)) {
        os << "(-" << std::string_view(buf.data(), end - buf.data()) << ')';
    } else {
        os << std::string_view(buf.data(), end - buf.data());
    }
}

void print(std::ostream& os, const Expr& e);

void print_wrapped(std::ostream& os, const Expr& e, bool wrap) {
    if (wrap) os << '(';
    print(os, e);
    if (wrap) os << ')';
}

void print(std::ostream& os, const Expr& e) {
    switch (e.op()) {
        case Op::Const:
            print_number(os, e.value());
            return;
        case Op::Coord:
            os << e.name();
            return;
        case Op::Neg:
            os << '-';
            print_wrapped(os, e.operand(), precedence(e.operand()) < 4);
            return;
        case Op::Add:
        case Op::Sub:
            print_wrapped(os, e.lhs(), precedence(e.lhs()) < 1);
            os << (e.op() == Op::Add ? " + " : " - ");
            print_wrapped(os, e.rhs(), precedence(e.rhs()) <= 1 || e.rhs().op() == Op::Neg);
            return;
        case Op::Mul:
        case Op::Div:
            print_wrapped(os, e.lhs(), precedence(e.lhs()) < 2);
            os << (e.op() == Op::Mul ? '*' : '/');
            print_wrapped(os, e.rhs(), precedence(e.rhs()) <= 3);
            return;
        case Op::Pow:
            print_wrapped(os, e.operand(), precedence(e.operand()) < 5);
            os << '^' << e.exponent();
            return;
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
            os << (e.op() == Op::Sin ? "sin(" : e.op() == Op::Cos ? "cos(" : "exp(");
            print(os, e.operand());
            os << ')';
            return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(os, e);
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
    print(os, e);
    return os;
}

// ---------------------------------------------------------------------------
// Compiled evaluation
// ---------------------------------------------------------------------------

namespace {

struct Compiler {
    std::span<const std::string> coords;
    std::vector<std::pair<Op, std::pair<int, double>>> code;
    std::size_t depth = 0;
    std::size_t max_depth = 0;

    void push() { max_depth = std::max(max_depth, ++depth); }

    void emit(const Expr& e) {
        switch (e.op()) {
            case Op::Const:
                code.push_back({Op::Const, {0, e.value()}});
                push();
                return;
            case Op::Coord: {
                for (std::size_t i = 0; i < coords.size(); ++i) {
                    if (coords[i] == e.name()) {
                        code.push_back({Op::Coord, {static_cast<int>(i), 0.0}});
                        push();
                        return;
                    }
                }
                throw EvalError("unbound coordinate '" + e.name() + "'");
            }
            case Op::Neg:
            case Op::Sin:
            case Op::Cos:
            case Op::Exp:
                emit(e.operand());
                code.push_back({e.op(), {0, 0.0}});
                return;
            case Op::Pow:
                emit(e.operand());
                code.push_back({Op::Pow, {e.exponent(), 0.0}});
                return;
            default:
                emit(e.lhs());
                emit(e.rhs());
                code.push_back({e.op(), {0, 0.0}});
                --depth;
        }
    }
};

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> coords) {
    Compiler c{coords, {}, 0, 0};
    c.emit(e);
    code_.reserve(c.code.size());
    for (const auto& [op, arg] : c.code) code_.push_back({op, arg.first, arg.second});
    max_depth_ = c.max_depth;
}

double CompiledExpr::operator()(std::span<const double> point) const {
    constexpr std::size_t kInline = 64;
    std::array<double, kInline> inline_stack{};
    std::vector<double> heap_stack;
    double* stack = inline_stack.data();
    if (max_depth_ > kInline) {
        heap_stack.resize(max_depth_);
        stack = heap_stack.data();
    }
    std::size_t top = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::Const:
                stack[top++] = in.value;
                break;
            case Op::Coord:
                if (static_cast<std::size_t>(in.arg) >= point.size()) {
                    throw EvalError("point has fewer coordinates than the chart");
                }
                stack[top++] = point[static_cast<std::size_t>(in.arg)];
                break;
            case Op::Neg:
                stack[top - 1] = -stack[top - 1];
                break;
            case Op::Sin:
                stack[top - 1] = std::sin(stack[top - 1]);
                break;
            case Op::Cos:
                stack[top - 1] = std::cos(stack[top - 1]);
                break;
            case Op::Exp:
                stack[top - 1] = std::exp(stack[top - 1]);
                break;
            case Op::Pow:
                stack[top - 1] = detail::apply_pow(stack[top - 1], in.arg);
                break;
            case Op::Add:
                --top;
                stack[top - 1] = stack[top - 1] + stack[top];
                break;
            case Op::Sub:
                --top;
                stack[top - 1] = stack[top - 1] - stack[top];
                break;
            case Op::Mul:
                --top;
                stack[top - 1] = stack[top - 1] * stack[top];
                break;
            case Op::Div:
                --top;
                stack[top - 1] = detail::apply_div(stack[top - 1], stack[top]);
                break;
        }
    }
    return stack[0];
}

}  // namespace hfree
