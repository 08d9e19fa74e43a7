#pragma once

#include "expr.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

namespace diracq {

struct Division {
    std::vector<Expr> quotients;
    Expr remainder;
};

// Multivariate division with full term reduction: every remainder term is
// divisible by no leading monomial of gs. Divisors are tried in list order.
inline Division divide(const Expr& f, const std::vector<Expr>& gs) {
    Division out;
    out.quotients.assign(gs.size(), Expr::zero(f.table()));
    out.remainder = Expr::zero(f.table());
    Expr work = f;
    while (!work.is_zero()) {
        const Mono& lm = work.leading_monomial();
        const Rational& lc = work.leading_coeff();
        bool divided = false;
        for (size_t i = 0; i < gs.size(); ++i) {
            if (gs[i].is_zero()) continue;
            const Mono& gm = gs[i].leading_monomial();
            if (!mono_divides(gm, lm)) continue;
            Mono qm = lm;
            for (size_t k = 0; k < qm.size(); ++k) qm[k] -= gm[k];
            Expr qt = Expr::term(work.table(), std::move(qm), lc / gs[i].leading_coeff());
            out.quotients[i] += qt;
            work -= qt * gs[i];
            divided = true;
            break;
        }
        if (!divided) {
            Expr lt = Expr::term(work.table(), lm, lc);
            out.remainder += lt;
            work -= lt;
        }
    }
    return out;
}

inline Expr normal_form(const Expr& f, const std::vector<Expr>& gs) {
    return divide(f, gs).remainder;
}

struct GroebnerResult {
    std::vector<Expr> basis;
    bool complete = true;
};

namespace detail {

inline Mono mono_lcm(const Mono& a, const Mono& b) {
    Mono m = a;
    for (size_t i = 0; i < m.size(); ++i) m[i] = std::max(a[i], b[i]);
    return m;
}

inline bool coprime(const Mono& a, const Mono& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0 && b[i] > 0) return false;
    return true;
}

inline Expr s_polynomial(const Expr& f, const Expr& g) {
    Mono l = mono_lcm(f.leading_monomial(), g.leading_monomial());
    Mono mf = l, mg = l;
    for (size_t i = 0; i < l.size(); ++i) {
        mf[i] -= f.leading_monomial()[i];
        mg[i] -= g.leading_monomial()[i];
    }
    Expr tf = Expr::term(f.table(), std::move(mf), Rational(1) / f.leading_coeff());
    Expr tg = Expr::term(g.table(), std::move(mg), Rational(1) / g.leading_coeff());
    return tf * f - tg * g;
}

inline std::vector<Expr> interreduce(std::vector<Expr> basis) {
    // Drop elements whose leading monomial another element divides, then put
    // each survivor into normal form against the others.
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < basis.size() && !changed; ++i)
            for (size_t j = 0; j < basis.size(); ++j) {
                if (i == j) continue;
                if (mono_divides(basis[j].leading_monomial(), basis[i].leading_monomial())) {
                    basis.erase(basis.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
    }
    for (size_t i = 0; i < basis.size(); ++i) {
        std::vector<Expr> others;
        for (size_t j = 0; j < basis.size(); ++j)
            if (j != i) others.push_back(basis[j]);
        basis[i] = normal_form(basis[i], others).make_monic();
    }
    std::sort(basis.begin(), basis.end(), [](const Expr& a, const Expr& b) {
        return GrlexLess()(a.leading_monomial(), b.leading_monomial());
    });
    return basis;
}

}  // namespace detail

// Buchberger completion under the graded-lex order. S-polynomials whose lcm
// degree exceeds the cap are discarded and the result is marked truncated.
inline GroebnerResult groebner(const std::vector<Expr>& gens, int degree_cap = 12) {
    GroebnerResult out;
    std::vector<Expr>& basis = out.basis;
    for (const Expr& g : gens)
        if (!g.is_zero()) basis.push_back(g.make_monic());
    if (basis.empty()) return out;

    using Pair = std::tuple<int, size_t, size_t>;  // (lcm degree, i, j)
    std::set<Pair> pending;
    auto push_pairs = [&](size_t j) {
        for (size_t i = 0; i < j; ++i) {
            Mono l = detail::mono_lcm(basis[i].leading_monomial(), basis[j].leading_monomial());
            pending.emplace(mono_degree(l), i, j);
        }
    };
    for (size_t j = 1; j < basis.size(); ++j) push_pairs(j);

    while (!pending.empty()) {
        auto [deg, i, j] = *pending.begin();
        pending.erase(pending.begin());
        if (deg > degree_cap) {
            out.complete = false;
            continue;
        }
        if (detail::coprime(basis[i].leading_monomial(), basis[j].leading_monomial())) continue;
        Expr r = normal_form(detail::s_polynomial(basis[i], basis[j]), basis);
        if (r.is_zero()) continue;
        if (r.degree() > degree_cap) {
            out.complete = false;
            continue;
        }
        basis.push_back(r.make_monic());
        push_pairs(basis.size() - 1);
    }
    basis = detail::interreduce(basis);
    return out;
}

// A constraint ideal with its Groebner completion; reduce() computes the
// unique normal form, realizing weak equality f ~ g as reduce(f - g) == 0.
class IdealBasis {
  public:
    IdealBasis() = default;

    explicit IdealBasis(const std::vector<Expr>& gens, int degree_cap = 12)
        : generators_(gens), cap_(degree_cap) {
        GroebnerResult r = groebner(gens, degree_cap);
        basis_ = std::move(r.basis);
        complete_ = r.complete;
    }

    const std::vector<Expr>& generators() const { return generators_; }
    const std::vector<Expr>& basis() const { return basis_; }
    bool complete() const { return complete_; }
    int degree_cap() const { return cap_; }
    bool empty() const { return basis_.empty(); }

    Expr reduce(const Expr& f) const {
        if (basis_.empty()) return f;
        return normal_form(f, basis_);
    }

    bool contains(const Expr& f) const { return reduce(f).is_zero(); }

  private:
    std::vector<Expr> generators_;
    std::vector<Expr> basis_;
    bool complete_ = true;
    int cap_ = 12;
};

}  // namespace diracq
