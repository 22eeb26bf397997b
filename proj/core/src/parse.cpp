// Recursive-descent parser for the expression DSL.
//
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' integer)*        right-associative
//   atom  := number | ident | func '(' expr ')' | '(' expr ')'
//
// `pi` is a reserved identifier for the constant. Exponents may be written
// signed (`x^-2`) or parenthesized (`x^(-2)`).

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "hfree/error.hpp"
#include "hfree/expr.hpp"

namespace hfree {

ParseError::ParseError(std::size_t position, std::string expected, std::string found)
    : Error("parse error at offset " + std::to_string(position) + ": expected " + expected +
            ", found " + found),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

BelowCriticalDimension::BelowCriticalDimension(std::size_t target_dim, std::size_t critical_dim)
    : Error("target dimension " + std::to_string(target_dim) +
            " is below the critical dimension " + std::to_string(critical_dim)),
      target_dim_(target_dim),
      critical_dim_(critical_dim) {}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string_view text;
    bool integral = false;  // Number without '.' or exponent part
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            current_ = {Tok::End, start, {}};
            return;
        }
        const char c = src_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
            lex_number(start);
            return;
        }
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
            current_ = {Tok::Ident, start, src_.substr(start, pos_ - start)};
            return;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '^': kind = Tok::Caret; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            default:
                throw ParseError(start, "an expression token", "'" + std::string(1, c) + "'");
        }
        ++pos_;
        current_ = {kind, start, src_.substr(start, 1)};
    }

    void lex_number(std::size_t start) {
        bool integral = true;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            integral = false;
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && is_digit(src_[p])) {
                integral = false;
                pos_ = p;
                while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
            }
        }
        current_ = {Tok::Number, start, src_.substr(start, pos_ - start), integral};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_{Tok::End, 0, {}};
};

std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + std::string(t.text) + "'";
}

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    Expr parse_all() {
        Expr e = expr();
        if (lex_.peek().kind != Tok::End) {
            throw ParseError(lex_.peek().pos, "operator or end of input", describe(lex_.peek()));
        }
        return e;
    }

private:
    Expr expr() {
        Expr lhs = term();
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            const Op op = lex_.take().kind == Tok::Plus ? Op::Add : Op::Sub;
            lhs = Expr::binary(op, lhs, term());
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
            const Op op = lex_.take().kind == Tok::Star ? Op::Mul : Op::Div;
            lhs = Expr::binary(op, lhs, unary());
        }
        return lhs;
    }

    Expr unary() {
        if (lex_.peek().kind == Tok::Minus) {
            lex_.take();
            return Expr::neg(unary());
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (lex_.peek().kind != Tok::Caret) return base;
        std::vector<long long> exponents;
        while (lex_.peek().kind == Tok::Caret) {
            lex_.take();
            exponents.push_back(integer_exponent());
        }
        // Right-associative: x^a^b = x^(a^b), folded as integers.
        const std::size_t first_pos = lex_.peek().pos;
        long long folded = exponents.back();
        for (std::size_t i = exponents.size() - 1; i-- > 0;) {
            folded = int_pow(exponents[i], folded, first_pos);
        }
        if (folded > std::numeric_limits<int>::max() || folded < std::numeric_limits<int>::min()) {
            throw ParseError(first_pos, "exponent within int range", std::to_string(folded));
        }
        return Expr::pow(base, static_cast<int>(folded));
    }

    static long long int_pow(long long base, long long exponent, std::size_t pos) {
        if (exponent < 0) {
            if (base == 1) return 1;
            if (base == -1) return (exponent % 2 == 0) ? 1 : -1;
            throw ParseError(pos, "integer exponent", "fractional power tower");
        }
        long long result = 1;
        for (long long i = 0; i < exponent; ++i) {
            if (std::llabs(result) > std::numeric_limits<int>::max()) {
                throw ParseError(pos, "exponent within int range", "overflowing power tower");
            }
            result *= base;
        }
        return result;
    }

    long long integer_exponent() {
        bool paren = false;
        if (lex_.peek().kind == Tok::LParen) {
            paren = true;
            lex_.take();
        }
        long long sign = 1;
        if (lex_.peek().kind == Tok::Minus || lex_.peek().kind == Tok::Plus) {
            if (lex_.take().kind == Tok::Minus) sign = -1;
        }
        const Token t = lex_.peek();
        if (t.kind != Tok::Number) throw ParseError(t.pos, "integer exponent", describe(t));
        if (!t.integral) throw ParseError(t.pos, "integer exponent", "fractional exponent " + describe(t));
        lex_.take();
        long long value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || value > std::numeric_limits<int>::max()) {
            throw ParseError(t.pos, "exponent within int range", describe(t));
        }
        if (paren) expect(Tok::RParen, "')'");
        return sign * value;
    }

    Expr atom() {
        const Token t = lex_.peek();
        switch (t.kind) {
            case Tok::Number: {
                lex_.take();
                double value = 0.0;
                auto [ptr, ec] =
                    std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
                if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
                    throw ParseError(t.pos, "finite number literal", describe(t));
                }
                return Expr::constant(value);
            }
            case Tok::Ident: {
                lex_.take();
                if (auto fn = function_op(t.text)) {
                    expect(Tok::LParen, "'(' after function name");
                    Expr arg = expr();
                    expect(Tok::RParen, "')'");
                    return Expr::call(*fn, arg);
                }
                if (lex_.peek().kind == Tok::LParen) {
                    throw ParseError(t.pos, "function name (sin, cos, exp)", describe(t));
                }
                if (t.text == "pi") return Expr::constant(std::numbers::pi);
                return Expr::coord(std::string(t.text));
            }
            case Tok::LParen: {
                lex_.take();
                Expr inner = expr();
                expect(Tok::RParen, "')'");
                return inner;
            }
            default:
                throw ParseError(t.pos, "number, identifier or '('", describe(t));
        }
    }

    static std::optional<Op> function_op(std::string_view name) {
        if (name == "sin") return Op::Sin;
        if (name == "cos") return Op::Cos;
        if (name == "exp") return Op::Exp;
        return std::nullopt;
    }

    void expect(Tok kind, const char* what) {
        if (lex_.peek().kind != kind) throw ParseError(lex_.peek().pos, what, describe(lex_.peek()));
        lex_.take();
    }

    Lexer lex_;
};

}  // namespace

Expr parse(std::string_view src) { return Parser(src).parse_all(); }

}  // namespace hfree
