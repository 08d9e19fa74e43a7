#pragma once

#include "dirac.hpp"

namespace diracq {

struct GaugeVariation {
    Expr raw;      // {f, G} on all of phase space
    Expr reduced;  // the same modulo the constraint ideal
};

inline GaugeVariation gauge_variation(const Expr& f, const Expr& g, const IdealBasis& ideal) {
    Expr raw = poisson_bracket(f, g);
    return {raw, ideal.reduce(raw)};
}

struct ClosurePair {
    int n = 0, m = 0;      // 1-based indices into the first-class basis, n < m
    ExprVec coefficients;  // f^p as read off by division in basis order
    Expr residual;         // ideal-reduced remainder, zero on success
};

using ClosureTable = std::vector<ClosurePair>;

// Expresses {G_n, G_m} = sum_p f^p G_p + (ideal member). The coefficients are
// basis-dependent; the residual is not, and must vanish.
inline ClosureTable closure_coefficients(const ExprVec& first_class, const IdealBasis& ideal) {
    ClosureTable table;
    for (size_t n = 0; n < first_class.size(); ++n)
        for (size_t m = n + 1; m < first_class.size(); ++m) {
            Expr w = poisson_bracket(first_class[n], first_class[m]);
            Division dv = divide(w, first_class);
            Expr residual = ideal.reduce(dv.remainder);
            if (!residual.is_zero())
                throw AlgorithmError("gauge: first-class closure violated");
            table.push_back(ClosurePair{static_cast<int>(n) + 1, static_cast<int>(m) + 1,
                                        dv.quotients, residual});
        }
    return table;
}

inline ClosureTable closure_coefficients(const ConstraintAnalysis& an) {
    return closure_coefficients(an.first_class_basis, an.ideal);
}

struct ObservableCheck {
    bool observable = true;
    std::vector<std::pair<int, Expr>> failures;  // (basis index, residual)
};

inline ObservableCheck is_observable(const Expr& f, const ConstraintAnalysis& an) {
    ObservableCheck out;
    for (size_t n = 0; n < an.first_class_basis.size(); ++n) {
        Expr r = an.ideal.reduce(poisson_bracket(f, an.first_class_basis[n]));
        if (!r.is_zero()) {
            out.observable = false;
            out.failures.emplace_back(static_cast<int>(n) + 1, r);
        }
    }
    return out;
}

// Components ordered (qdot_1..qdot_d, pdot_1..pdot_d).
inline ExprVec hamiltonian_vector_field(const Expr& g) {
    int d = g.table().dim();
    ExprVec x;
    for (int a = 1; a <= d; ++a) x.push_back(g.derivative(Role::p, a));
    for (int a = 1; a <= d; ++a) x.push_back(-g.derivative(Role::q, a));
    return x;
}

inline ExprVec hamiltonian_vector_field(const Expr& g, const ConstraintAnalysis& an) {
    for (const Constraint& c : an.constraints)
        if (!an.ideal.reduce(poisson_bracket(c.expr, g)).is_zero())
            throw AlgorithmError("gauge: vector field is not tangent to the constraint surface");
    return hamiltonian_vector_field(g);
}

// Linear-algebra snapshot of the quotient P_phys for all-affine constraints.
// Phase-space vectors are indexed (q_1..q_d, p_1..p_d).
struct ReducedSpace {
    int dimension = 0;
    std::vector<Expr> basis;             // coordinate functions xi_i on P_phys
    RatMat induced_form;                 // Omega_phys[i][j] = w_i . J w_j
    RatMat induced_brackets;             // {xi_i, xi_j} implied by the form
    std::vector<RatVec> sigma_directions;  // basis of the direction space of Sigma
    std::vector<RatVec> gauge_directions;  // restricted X_n, one per first-class G_n
    std::vector<RatVec> phys_directions;   // w_i completing the gauge span inside Sigma
};

namespace detail {

// v . J w for J = [[0, I], [-I, 0]] in (q, p) block order.
inline Rational symplectic_product(const RatVec& v, const RatVec& w) {
    size_t d = v.size() / 2;
    Rational s = 0;
    for (size_t a = 0; a < d; ++a) s += v[a] * w[d + a] - v[d + a] * w[a];
    return s;
}

inline RatVec linear_gradient(const Expr& e) {
    int d = e.table().dim();
    RatVec grad(static_cast<size_t>(2 * d), 0);
    for (int a = 1; a <= d; ++a) {
        Expr dq = e.derivative(Role::q, a);
        Expr dp = e.derivative(Role::p, a);
        if (!dq.is_constant() || !dp.is_constant())
            throw AlgorithmError("gauge: nonlinear reduction unsupported");
        grad[static_cast<size_t>(a - 1)] = dq.is_zero() ? Rational(0) : dq.constant_value();
        grad[static_cast<size_t>(d + a - 1)] = dp.is_zero() ? Rational(0) : dp.constant_value();
    }
    return grad;
}

}  // namespace detail

inline ReducedSpace linear_reduction(const ConstraintAnalysis& an) {
    ReducedSpace out;
    int d = an.model.dim;
    size_t zn = static_cast<size_t>(2 * d);
    VarTable tab = an.model.table();

    RatMat dmat;
    for (const Constraint& c : an.constraints) {
        if (c.expr.degree() > 1) throw AlgorithmError("gauge: nonlinear reduction unsupported");
        dmat.push_back(detail::linear_gradient(c.expr));
    }
    if (dmat.empty()) {
        for (size_t i = 0; i < zn; ++i) {
            RatVec e(zn, 0);
            e[i] = 1;
            out.sigma_directions.push_back(std::move(e));
        }
    } else {
        out.sigma_directions = linalg::rat_nullspace(dmat);
    }

    for (const Expr& g : an.first_class_basis) {
        RatVec grad = detail::linear_gradient(g);
        RatVec x(zn, 0);  // J grad, the constant Hamiltonian field of g
        for (int a = 0; a < d; ++a) {
            x[static_cast<size_t>(a)] = grad[static_cast<size_t>(d + a)];
            x[static_cast<size_t>(d + a)] = -grad[static_cast<size_t>(a)];
        }
        for (const RatVec& row : dmat) {
            Rational dot = 0;
            for (size_t i = 0; i < zn; ++i) dot += row[i] * x[i];
            if (dot != 0)
                throw AlgorithmError("gauge: gauge direction leaves the constraint surface");
        }
        out.gauge_directions.push_back(std::move(x));
    }

    out.phys_directions = linalg::rat_complete(out.gauge_directions, out.sigma_directions);
    out.dimension = static_cast<int>(out.phys_directions.size());
    if (Rational(out.dimension) != 2 * an.dof)
        throw AlgorithmError("gauge: reduced dimension disagrees with the constraint count");

    size_t k = out.phys_directions.size();
    out.induced_form.assign(k, RatVec(k, 0));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            out.induced_form[i][j] =
                detail::symplectic_product(out.phys_directions[i], out.phys_directions[j]);
    if (k && linalg::rat_rank(out.induced_form) != static_cast<int>(k))
        throw AlgorithmError("gauge: induced symplectic form is degenerate");

    // Coordinate functions dual to the w_i and constant along every gauge
    // direction, so they descend to the quotient.
    if (k) {
        RatMat sys = out.phys_directions;
        for (const RatVec& x : out.gauge_directions) sys.push_back(x);
        for (size_t i = 0; i < k; ++i) {
            RatVec rhs(sys.size(), 0);
            rhs[i] = 1;
            auto a = linalg::rat_solve(sys, rhs);
            if (!a) throw AlgorithmError("gauge: no dual coordinate solution");
            Expr xi = Expr::zero(tab);
            for (int c = 1; c <= d; ++c) {
                xi += (*a)[static_cast<size_t>(c - 1)] * Expr::variable(tab, Role::q, c);
                xi += (*a)[static_cast<size_t>(d + c - 1)] * Expr::variable(tab, Role::p, c);
            }
            out.basis.push_back(xi);
        }
        // Brackets of the duals follow from the form on the w_i.
        RatMat inv(k, RatVec(k));
        for (size_t j = 0; j < k; ++j) {
            RatVec e(k, 0);
            e[j] = 1;
            auto col = linalg::rat_solve(out.induced_form, e);
            if (!col) throw AlgorithmError("gauge: induced form not invertible");
            for (size_t i = 0; i < k; ++i) inv[i][j] = (*col)[i];
        }
        out.induced_brackets.assign(k, RatVec(k, 0));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j) out.induced_brackets[i][j] = -inv[i][j];
    }
    return out;
}

}  // namespace diracq
