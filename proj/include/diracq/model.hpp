#pragma once

#include "expr.hpp"

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace diracq {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + msg),
          line(line_),
          col(col_) {}
};

struct Model {
    int dim = 0;
    Expr lagrangian;
    VarTable table() const { return VarTable(dim); }
    bool operator==(const Model& o) const { return dim == o.dim && lagrangian == o.lagrangian; }
};

namespace detail {

enum class Tok { ident, number, plus, minus, star, caret, slash, lparen, rparen, eq, sep, end };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

inline std::vector<Token> lex_model(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string t, int l, int c) { out.push_back({k, std::move(t), l, c}); };
    while (i < src.size()) {
        char ch = src[i];
        int l = line, c = col;
        if (ch == '\n') {
            push(Tok::sep, "\\n", l, c);
            ++i, ++line, col = 1;
        } else if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i, ++col;
        } else if (ch == ';') {
            push(Tok::sep, ";", l, c);
            ++i, ++col;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::string num;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
                num += src[i], ++i, ++col;
            push(Tok::number, num, l, c);
        } else if (std::isalpha(static_cast<unsigned char>(ch))) {
            std::string id;
            while (i < src.size() && std::isalnum(static_cast<unsigned char>(src[i])))
                id += src[i], ++i, ++col;
            push(Tok::ident, id, l, c);
        } else {
            Tok k;
            switch (ch) {
                case '+': k = Tok::plus; break;
                case '-': k = Tok::minus; break;
                case '*': k = Tok::star; break;
                case '^': k = Tok::caret; break;
                case '/': k = Tok::slash; break;
                case '(': k = Tok::lparen; break;
                case ')': k = Tok::rparen; break;
                case '=': k = Tok::eq; break;
                default:
                    throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
            }
            push(k, std::string(1, ch), l, c);
            ++i, ++col;
        }
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class ModelParser {
  public:
    explicit ModelParser(const std::string& src) : toks_(lex_model(src)) {}

    Model run() {
        Model m;
        bool have_dim = false, have_l = false;
        skip_seps();
        while (!at(Tok::end)) {
            const Token& t = peek();
            if (t.kind == Tok::ident && t.text == "dim") {
                if (have_dim) throw ParseError(t.line, t.col, "duplicate dim statement");
                next();
                const Token& n = expect(Tok::number, "expected dimension after 'dim'");
                long d = to_small_int(n, 64, "dimension");
                if (d < 1) throw ParseError(n.line, n.col, "dimension must be >= 1");
                m.dim = static_cast<int>(d);
                tab_ = VarTable(m.dim);
                have_dim = true;
            } else if (t.kind == Tok::ident && t.text == "L") {
                if (!have_dim)
                    throw ParseError(t.line, t.col, "dim must be declared before L");
                if (have_l) throw ParseError(t.line, t.col, "duplicate L statement");
                int ll = t.line, lc = t.col;
                next();
                expect(Tok::eq, "expected '=' after L");
                m.lagrangian = parse_expr();
                if (m.lagrangian.is_zero()) throw ParseError(ll, lc, "empty Lagrangian");
                if (m.lagrangian.degree_in(Role::v) > 2)
                    throw ParseError(ll, lc, "velocity degree > 2 in Lagrangian");
                have_l = true;
            } else {
                throw ParseError(t.line, t.col, "expected 'dim' or 'L' statement");
            }
            end_statement();
        }
        if (!have_dim) throw ParseError(1, 1, "missing dim statement");
        if (!have_l) throw ParseError(1, 1, "empty Lagrangian");
        return m;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool at(Tok k) const { return peek().kind == k; }

    const Token& expect(Tok k, const std::string& msg) {
        if (!at(k)) throw ParseError(peek().line, peek().col, msg);
        return next();
    }

    void skip_seps() {
        while (at(Tok::sep)) next();
    }

    void end_statement() {
        if (at(Tok::end)) return;
        if (!at(Tok::sep))
            throw ParseError(peek().line, peek().col, "expected ';' or newline after statement");
        skip_seps();
    }

    static long to_small_int(const Token& t, long limit, const std::string& what) {
        if (t.text.size() > 9) throw ParseError(t.line, t.col, what + " too large");
        long v = std::stol(t.text);
        if (v > limit) throw ParseError(t.line, t.col, what + " too large");
        return v;
    }

    Expr parse_expr() {
        bool neg = false;
        if (at(Tok::minus)) {
            next();
            neg = true;
        }
        Expr acc = parse_term();
        if (neg) acc = -acc;
        while (at(Tok::plus) || at(Tok::minus)) {
            bool minus = next().kind == Tok::minus;
            Expr t = parse_term();
            acc = minus ? acc - t : acc + t;
        }
        return acc;
    }

    Expr parse_term() {
        Expr acc = parse_factor();
        while (at(Tok::star)) {
            next();
            acc = acc * parse_factor();
        }
        if (at(Tok::slash))
            throw ParseError(peek().line, peek().col,
                             "'/' is only allowed inside rational literals");
        return acc;
    }

    Expr parse_factor() {
        Expr base = parse_base();
        if (at(Tok::caret)) {
            next();
            const Token& e = expect(Tok::number, "expected integer exponent after '^'");
            long n = to_small_int(e, 999, "exponent");
            base = base.pow(static_cast<int>(n));
        }
        return base;
    }

    Expr parse_base() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::number: {
                next();
                BigInt num(t.text);
                if (at(Tok::slash)) {
                    next();
                    const Token& d = expect(Tok::number, "expected denominator after '/'");
                    BigInt den(d.text);
                    if (den == 0)
                        throw ParseError(d.line, d.col, "zero denominator in rational literal");
                    return Expr::constant(Rational(num, den), tab_);
                }
                return Expr::constant(Rational(num), tab_);
            }
            case Tok::ident: {
                next();
                return variable_ref(t);
            }
            case Tok::lparen: {
                next();
                Expr e = parse_expr();
                expect(Tok::rparen, "expected ')'");
                return e;
            }
            case Tok::slash:
                throw ParseError(t.line, t.col, "'/' is only allowed inside rational literals");
            default:
                throw ParseError(t.line, t.col, "expected a number, variable, or '('");
        }
    }

    Expr variable_ref(const Token& t) {
        const std::string& s = t.text;
        Role role;
        if (s[0] == 'q')
            role = Role::q;
        else if (s[0] == 'v')
            role = Role::v;
        else
            throw ParseError(t.line, t.col,
                             "undeclared variable '" + s + "' (expected q1..q" +
                                 std::to_string(tab_.dim()) + " or v1..v" +
                                 std::to_string(tab_.dim()) + ")");
        if (s.size() < 2 || s.find_first_not_of("0123456789", 1) != std::string::npos)
            throw ParseError(t.line, t.col, "undeclared variable '" + s + "'");
        long a = std::stol(s.substr(1));
        if (a < 1 || a > tab_.dim())
            throw ParseError(t.line, t.col,
                             "undeclared variable '" + s + "' (dimension is " +
                                 std::to_string(tab_.dim()) + ")");
        return Expr::variable(tab_, role, static_cast<int>(a));
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    VarTable tab_;
};

}  // namespace detail

inline Model parse_model(const std::string& text) { return detail::ModelParser(text).run(); }

// Canonical text form; parse_model(print_model(m)) == m.
inline std::string print_model(const Model& m) {
    return "dim " + std::to_string(m.dim) + "\nL = " + m.lagrangian.str() + "\n";
}

}  // namespace diracq
