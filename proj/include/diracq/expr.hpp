#pragma once

#include "rational.hpp"
#include "vartable.hpp"

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace diracq {

// Exponent vector laid out per VarTable.
using Mono = std::vector<int>;

inline int mono_degree(const Mono& m) {
    int s = 0;
    for (int e : m) s += e;
    return s;
}

// Graded lexicographic order. Total degree decides; ties are broken on the
// highest-indexed variable, so within (q,p) blocks q1 < ... < qd < p1 < ... < pd.
struct GrlexLess {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da < db;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    }
};

inline bool mono_divides(const Mono& a, const Mono& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

// Exact multivariate polynomial with rational coefficients, kept in canonical
// form: sorted by GrlexLess, no zero coefficients.
class Expr {
  public:
    using TermMap = std::map<Mono, Rational, GrlexLess>;

    Expr() = default;
    explicit Expr(VarTable tab) : tab_(tab) {}

    static Expr zero(VarTable tab = VarTable()) { return Expr(tab); }

    static Expr constant(const Rational& c, VarTable tab = VarTable()) {
        Expr e(tab);
        if (c != 0) e.terms_[Mono(tab.size(), 0)] = c;
        return e;
    }

    static Expr variable(VarTable tab, Role r, int a) {
        Expr e(tab);
        Mono m(tab.size(), 0);
        m[tab.index(r, a)] = 1;
        e.terms_[std::move(m)] = 1;
        return e;
    }

    static Expr term(VarTable tab, Mono m, const Rational& c) {
        Expr e(tab);
        if (c != 0) e.terms_[std::move(m)] = c;
        return e;
    }

    const VarTable& table() const { return tab_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && mono_degree(terms_.begin()->first) == 0);
    }

    Rational constant_value() const {
        if (is_zero()) return 0;
        if (!is_constant()) throw AlgorithmError("Expr: not a constant");
        return terms_.begin()->second;
    }

    int degree() const {
        if (terms_.empty()) return -1;
        return mono_degree(terms_.rbegin()->first);
    }

    int degree_in(Role r) const {
        if (tab_.dim() == 0) return terms_.empty() ? -1 : 0;
        int best = terms_.empty() ? -1 : 0;
        for (const auto& [m, c] : terms_) {
            int s = 0;
            for (int a = 1; a <= tab_.dim(); ++a) s += m[tab_.index(r, a)];
            if (s > best) best = s;
        }
        return best;
    }

    bool uses(Role r) const { return degree_in(r) > 0; }

    const Mono& leading_monomial() const {
        require_nonzero();
        return terms_.rbegin()->first;
    }

    const Rational& leading_coeff() const {
        require_nonzero();
        return terms_.rbegin()->second;
    }

    Expr make_monic() const {
        if (is_zero()) return *this;
        return scaled(Rational(1) / leading_coeff());
    }

    Expr scaled(const Rational& c) const {
        Expr r(tab_);
        if (c == 0) return r;
        for (const auto& [m, k] : terms_) r.terms_[m] = k * c;
        return r;
    }

    Expr operator-() const { return scaled(-1); }

    friend Expr operator+(const Expr& a, const Expr& b) {
        auto [x, y] = promote(a, b);
        Expr r = x;
        for (const auto& [m, c] : y.terms_) r.add_term(m, c);
        return r;
    }

    friend Expr operator-(const Expr& a, const Expr& b) {
        auto [x, y] = promote(a, b);
        Expr r = x;
        for (const auto& [m, c] : y.terms_) r.add_term(m, -c);
        return r;
    }

    friend Expr operator*(const Expr& a, const Expr& b) {
        auto [x, y] = promote(a, b);
        Expr r(x.tab_);
        for (const auto& [ma, ca] : x.terms_)
            for (const auto& [mb, cb] : y.terms_) {
                Mono m = ma;
                for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
                r.add_term(std::move(m), ca * cb);
            }
        return r;
    }

    friend Expr operator*(const Rational& c, const Expr& a) { return a.scaled(c); }
    friend Expr operator*(const Expr& a, const Rational& c) { return a.scaled(c); }

    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    Expr pow(int n) const {
        if (n < 0) throw AlgorithmError("Expr: negative exponent");
        Expr r = Expr::constant(1, tab_);
        for (int i = 0; i < n; ++i) r = r * *this;
        return r;
    }

    Expr derivative(int idx) const {
        Expr r(tab_);
        for (const auto& [m, c] : terms_) {
            if (m[idx] == 0) continue;
            Mono dm = m;
            dm[idx] -= 1;
            r.add_term(std::move(dm), c * m[idx]);
        }
        return r;
    }

    Expr derivative(Role role, int a) const { return derivative(tab_.index(role, a)); }

    // Simultaneous substitution: variable slot -> replacement expression.
    Expr substitute(const std::map<int, Expr>& sub) const {
        Expr r(tab_);
        for (const auto& [m, c] : terms_) {
            Expr acc = Expr::constant(c, tab_);
            Mono rest(m.size(), 0);
            for (size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                auto it = sub.find(static_cast<int>(i));
                if (it == sub.end())
                    rest[i] = m[i];
                else
                    acc = acc * it->second.pow(m[i]);
            }
            if (mono_degree(rest) > 0) acc = acc * Expr::term(tab_, rest, 1);
            r += acc;
        }
        return r;
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        if (a.is_zero() && b.is_zero()) return true;
        if (a.tab_ != b.tab_) {
            if (a.tab_.dim() == 0 || b.tab_.dim() == 0) {
                auto [x, y] = promote(a, b);
                return x.terms_ == y.terms_;
            }
            return false;
        }
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const Rational& c = it->second;
            if (first) {
                if (c < 0) os << "-";
                first = false;
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            Rational ac = abs(c);
            std::string mono = mono_str(it->first);
            if (mono.empty())
                os << rational_str(ac);
            else if (ac == 1)
                os << mono;
            else
                os << rational_str(ac) << "*" << mono;
        }
        return os.str();
    }

  private:
    void require_nonzero() const {
        if (terms_.empty()) throw AlgorithmError("Expr: zero polynomial has no leading term");
    }

    void add_term(Mono m, const Rational& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    std::string mono_str(const Mono& m) const {
        std::ostringstream os;
        bool first = true;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (!first) os << "*";
            first = false;
            os << tab_.name(static_cast<int>(i));
            if (m[i] > 1) os << "^" << m[i];
        }
        return os.str();
    }

    // The zero-dimensional table carries constants only; promote it to the
    // other operand's table so mixed arithmetic stays exact.
    static std::pair<Expr, Expr> promote(const Expr& a, const Expr& b) {
        if (a.tab_ == b.tab_) return {a, b};
        if (a.tab_.dim() == 0 && a.is_constant())
            return {Expr::constant(a.constant_value(), b.tab_), b};
        if (b.tab_.dim() == 0 && b.is_constant())
            return {a, Expr::constant(b.constant_value(), a.tab_)};
        throw AlgorithmError("Expr: mismatched variable tables");
    }

    VarTable tab_;
    TermMap terms_;
};

}  // namespace diracq
