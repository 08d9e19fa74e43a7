#pragma once

#include "ideal.hpp"

#include <optional>
#include <vector>

namespace diracq {

using ExprVec = std::vector<Expr>;
using ExprMat = std::vector<ExprVec>;
using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

namespace linalg {

inline Expr red(const Expr& e, const IdealBasis* ideal) { return ideal ? ideal->reduce(e) : e; }

// Fraction over the polynomial ring, evaluated weakly when an ideal is given.
// Invariant after normalize(): num is in normal form and den is either the
// constant 1 or a weakly nonzero non-constant polynomial.
struct Frac {
    Expr num, den;
};

inline Frac normalize(Expr num, Expr den, const IdealBasis* ideal) {
    num = red(num, ideal);
    if (num.is_zero()) return {num, Expr::constant(1, num.table())};
    if (den.is_constant()) {
        Rational c = den.constant_value();
        if (c == 0) throw AlgorithmError("linalg: zero denominator");
        return {num.scaled(Rational(1) / c), Expr::constant(1, num.table())};
    }
    Expr d = red(den, ideal);
    if (d.is_zero()) throw AlgorithmError("linalg: weakly zero denominator");
    if (d.is_constant()) return {num.scaled(Rational(1) / d.constant_value()),
                                 Expr::constant(1, num.table())};
    Division dv = divide(num, {d});
    if (dv.remainder.is_zero()) return {red(dv.quotients[0], ideal),
                                        Expr::constant(1, num.table())};
    return {num, d};
}

inline Frac frac_of(const Expr& e, const IdealBasis* ideal) {
    return normalize(e, Expr::constant(1, e.table()), ideal);
}

inline bool frac_zero(const Frac& f) { return f.num.is_zero(); }

inline Frac frac_add(const Frac& a, const Frac& b, const IdealBasis* ideal) {
    return normalize(a.num * b.den + b.num * a.den, a.den * b.den, ideal);
}

inline Frac frac_sub(const Frac& a, const Frac& b, const IdealBasis* ideal) {
    return normalize(a.num * b.den - b.num * a.den, a.den * b.den, ideal);
}

inline Frac frac_mul(const Frac& a, const Frac& b, const IdealBasis* ideal) {
    return normalize(a.num * b.num, a.den * b.den, ideal);
}

inline Frac frac_div(const Frac& a, const Frac& b, const IdealBasis* ideal) {
    if (frac_zero(b)) throw AlgorithmError("linalg: division by weak zero");
    return normalize(a.num * b.den, a.den * b.num, ideal);
}

// Reduced row echelon form over the weak fraction field.
struct Echelon {
    std::vector<std::vector<Frac>> rows;
    std::vector<int> pivot_cols;      // one per pivot row, ascending
    std::vector<int> row_origin;      // original row index per current row
    int cols = 0;
};

// Pivot rule: within each column, the candidate row whose numerator has the
// lowest total degree wins; ties go to the earliest row. Columns at or past
// pivot_limit are carried along but never pivoted (augmented columns).
inline Echelon rref(const ExprMat& m, const IdealBasis* ideal, int pivot_limit = -1) {
    Echelon e;
    size_t nr = m.size();
    e.cols = nr ? static_cast<int>(m[0].size()) : 0;
    if (pivot_limit < 0 || pivot_limit > e.cols) pivot_limit = e.cols;
    e.rows.resize(nr);
    e.row_origin.resize(nr);
    for (size_t i = 0; i < nr; ++i) {
        e.row_origin[i] = static_cast<int>(i);
        for (const Expr& x : m[i]) e.rows[i].push_back(frac_of(x, ideal));
    }
    size_t r = 0;
    for (int j = 0; j < pivot_limit && r < nr; ++j) {
        int best = -1, best_deg = 0;
        for (size_t i = r; i < nr; ++i) {
            if (frac_zero(e.rows[i][j])) continue;
            int deg = e.rows[i][j].num.degree();
            if (best < 0 || deg < best_deg) best = static_cast<int>(i), best_deg = deg;
        }
        if (best < 0) continue;
        std::swap(e.rows[r], e.rows[static_cast<size_t>(best)]);
        std::swap(e.row_origin[r], e.row_origin[static_cast<size_t>(best)]);
        Frac piv = e.rows[r][j];
        for (int k = 0; k < e.cols; ++k) e.rows[r][k] = frac_div(e.rows[r][k], piv, ideal);
        for (size_t i = 0; i < nr; ++i) {
            if (i == r || frac_zero(e.rows[i][j])) continue;
            Frac c = e.rows[i][j];
            for (int k = 0; k < e.cols; ++k)
                e.rows[i][k] = frac_sub(e.rows[i][k], frac_mul(c, e.rows[r][k], ideal), ideal);
        }
        e.pivot_cols.push_back(j);
        ++r;
    }
    return e;
}

inline int weak_rank(const ExprMat& m, const IdealBasis* ideal = nullptr) {
    return static_cast<int>(rref(m, ideal).pivot_cols.size());
}

// Clears denominators and scales so the first nonzero entry is monic.
inline ExprVec clear_denominators(const std::vector<Frac>& v, const IdealBasis* ideal) {
    Expr prod = Expr::constant(1, v.empty() ? Expr().table() : v[0].num.table());
    for (const Frac& f : v)
        if (!f.den.is_constant()) prod = prod * f.den;
    ExprVec out;
    for (const Frac& f : v) {
        if (frac_zero(f)) {
            out.push_back(Expr::zero(f.num.table()));
            continue;
        }
        Division d = divide(prod, {f.den});
        if (!d.remainder.is_zero()) throw AlgorithmError("linalg: denominator clearing failed");
        out.push_back(red(f.num * d.quotients[0], ideal));
    }
    for (const Expr& x : out)
        if (!x.is_zero()) {
            Rational lead = x.leading_coeff();
            for (Expr& y : out) y = y.scaled(Rational(1) / lead);
            break;
        }
    return out;
}

// Basis of the right null space, as denominator-cleared polynomial vectors.
inline std::vector<ExprVec> weak_nullspace(const ExprMat& m, const IdealBasis* ideal = nullptr) {
    if (m.empty()) return {};
    Echelon e = rref(m, ideal);
    int n = e.cols;
    VarTable tab = m[0].empty() ? VarTable() : m[0][0].table();
    std::vector<int> pivot_of_col(static_cast<size_t>(n), -1);
    for (size_t r = 0; r < e.pivot_cols.size(); ++r)
        pivot_of_col[static_cast<size_t>(e.pivot_cols[r])] = static_cast<int>(r);
    std::vector<ExprVec> basis;
    Expr one = Expr::constant(1, tab);
    for (int j = 0; j < n; ++j) {
        if (pivot_of_col[static_cast<size_t>(j)] >= 0) continue;
        std::vector<Frac> vec(static_cast<size_t>(n), frac_of(Expr::zero(tab), ideal));
        vec[static_cast<size_t>(j)] = frac_of(one, ideal);
        for (size_t r = 0; r < e.pivot_cols.size(); ++r) {
            Frac c = e.rows[r][static_cast<size_t>(j)];
            c.num = -c.num;
            vec[static_cast<size_t>(e.pivot_cols[r])] = normalize(c.num, c.den, ideal);
        }
        basis.push_back(clear_denominators(vec, ideal));
    }
    return basis;
}

struct AffineSolution {
    bool consistent = true;
    ExprVec particular;               // polynomial entries; free unknowns set to 0
    std::vector<ExprVec> homogeneous; // null space of the coefficient matrix
    ExprVec inconsistency;            // weakly nonzero residues of unsolvable rows
    std::vector<int> inconsistent_rows; // original row indices behind those residues
    int rank = 0;
    std::vector<int> pivot_cols;
};

// Solves A x = b over the weak fraction field. Unsolvable rows do not abort:
// their reduced residues are returned, and `particular` still solves the rows
// that do have pivots (free unknowns fixed to zero).
inline AffineSolution solve_affine(const ExprMat& a, const ExprVec& b,
                                   const IdealBasis* ideal = nullptr) {
    AffineSolution out;
    if (a.empty()) return out;
    size_t nr = a.size(), nc = a[0].size();
    VarTable tab;
    for (const auto& row : a)
        for (const Expr& x : row)
            if (x.table().dim()) tab = x.table();
    for (const Expr& x : b)
        if (x.table().dim()) tab = x.table();
    ExprMat aug = a;
    for (size_t i = 0; i < nr; ++i) aug[i].push_back(b[i]);
    Echelon e = rref(aug, ideal, static_cast<int>(nc));
    out.rank = static_cast<int>(e.pivot_cols.size());
    out.pivot_cols = e.pivot_cols;
    for (size_t i = e.pivot_cols.size(); i < e.rows.size(); ++i) {
        Expr residue = red(e.rows[i][nc].num, ideal);
        if (!residue.is_zero()) {
            out.consistent = false;
            out.inconsistency.push_back(residue.make_monic());
            out.inconsistent_rows.push_back(e.row_origin[i]);
        }
    }
    out.particular.assign(nc, Expr::zero(tab));
    for (size_t r = 0; r < e.pivot_cols.size(); ++r) {
        Frac f = e.rows[r][nc];
        if (!f.den.is_constant())
            throw AlgorithmError("linalg: solution is not polynomial");
        out.particular[static_cast<size_t>(e.pivot_cols[r])] = red(f.num, ideal);
    }
    out.homogeneous = weak_nullspace(a, ideal);
    return out;
}

// Fraction-free determinant (Bareiss). Exact over the polynomial ring.
inline Expr det(ExprMat m) {
    size_t n = m.size();
    if (n == 0) return Expr::constant(1);
    VarTable tab = m[0][0].table();
    Expr prev = Expr::constant(1, tab);
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            size_t sw = k + 1;
            while (sw < n && m[sw][k].is_zero()) ++sw;
            if (sw == n) return Expr::zero(tab);
            std::swap(m[k], m[sw]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                Expr t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                Division d = divide(t, {prev});
                if (!d.remainder.is_zero())
                    throw AlgorithmError("linalg: fraction-free elimination failed");
                m[i][j] = d.quotients[0];
            }
        prev = m[k][k];
    }
    Expr result = m[n - 1][n - 1];
    return sign < 0 ? -result : result;
}

inline ExprMat adjugate(const ExprMat& m) {
    size_t n = m.size();
    ExprMat adj(n, ExprVec(n));
    if (n == 1) {
        adj[0][0] = Expr::constant(1, m[0][0].table());
        return adj;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            ExprMat minor;
            for (size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                ExprVec row;
                for (size_t c = 0; c < n; ++c)
                    if (c != j) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            Expr cof = det(minor);
            adj[j][i] = ((i + j) % 2 == 0) ? cof : -cof;
        }
    return adj;
}

// Plain rational Gauss-Jordan for the affine reduction.
inline int rat_rank(RatMat m) {
    size_t nr = m.size();
    if (nr == 0) return 0;
    size_t nc = m[0].size(), r = 0;
    for (size_t j = 0; j < nc && r < nr; ++j) {
        size_t piv = r;
        while (piv < nr && m[piv][j] == 0) ++piv;
        if (piv == nr) continue;
        std::swap(m[r], m[piv]);
        Rational d = m[r][j];
        for (size_t k = 0; k < nc; ++k) m[r][k] /= d;
        for (size_t i = 0; i < nr; ++i) {
            if (i == r || m[i][j] == 0) continue;
            Rational c = m[i][j];
            for (size_t k = 0; k < nc; ++k) m[i][k] -= c * m[r][k];
        }
        ++r;
    }
    return static_cast<int>(r);
}

inline std::vector<RatVec> rat_nullspace(RatMat m) {
    size_t nr = m.size();
    if (nr == 0) return {};
    size_t nc = m[0].size(), r = 0;
    std::vector<int> pivot_of_col(nc, -1);
    for (size_t j = 0; j < nc && r < nr; ++j) {
        size_t piv = r;
        while (piv < nr && m[piv][j] == 0) ++piv;
        if (piv == nr) continue;
        std::swap(m[r], m[piv]);
        Rational d = m[r][j];
        for (size_t k = 0; k < nc; ++k) m[r][k] /= d;
        for (size_t i = 0; i < nr; ++i) {
            if (i == r || m[i][j] == 0) continue;
            Rational c = m[i][j];
            for (size_t k = 0; k < nc; ++k) m[i][k] -= c * m[r][k];
        }
        pivot_of_col[j] = static_cast<int>(r);
        ++r;
    }
    std::vector<RatVec> basis;
    for (size_t j = 0; j < nc; ++j) {
        if (pivot_of_col[j] >= 0) continue;
        RatVec v(nc, 0);
        v[j] = 1;
        for (size_t jj = 0; jj < nc; ++jj)
            if (pivot_of_col[jj] >= 0) v[jj] = -m[static_cast<size_t>(pivot_of_col[jj])][j];
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of A x = b, or nullopt when inconsistent.
inline std::optional<RatVec> rat_solve(RatMat a, RatVec b) {
    size_t nr = a.size();
    if (nr == 0) return RatVec{};
    size_t nc = a[0].size(), r = 0;
    std::vector<int> pivot_col;
    for (size_t j = 0; j < nc && r < nr; ++j) {
        size_t piv = r;
        while (piv < nr && a[piv][j] == 0) ++piv;
        if (piv == nr) continue;
        std::swap(a[r], a[piv]);
        std::swap(b[r], b[piv]);
        Rational d = a[r][j];
        for (size_t k = 0; k < nc; ++k) a[r][k] /= d;
        b[r] /= d;
        for (size_t i = 0; i < nr; ++i) {
            if (i == r || a[i][j] == 0) continue;
            Rational c = a[i][j];
            for (size_t k = 0; k < nc; ++k) a[i][k] -= c * a[r][k];
            b[i] -= c * b[r];
        }
        pivot_col.push_back(static_cast<int>(j));
        ++r;
    }
    for (size_t i = r; i < nr; ++i)
        if (b[i] != 0) return std::nullopt;
    RatVec x(nc, 0);
    for (size_t k = 0; k < pivot_col.size(); ++k) x[static_cast<size_t>(pivot_col[k])] = b[k];
    return x;
}

// Greedily extends `inside` with vectors from `pool` until the span stops
// growing; returns only the appended vectors.
inline std::vector<RatVec> rat_complete(const std::vector<RatVec>& inside,
                                        const std::vector<RatVec>& pool) {
    std::vector<RatVec> have = inside, added;
    int rank = have.empty() ? 0 : rat_rank(have);
    for (const RatVec& cand : pool) {
        std::vector<RatVec> trial = have;
        trial.push_back(cand);
        int r2 = rat_rank(trial);
        if (r2 > rank) {
            have.push_back(cand);
            added.push_back(cand);
            rank = r2;
        }
    }
    return added;
}

}  // namespace linalg

}  // namespace diracq
