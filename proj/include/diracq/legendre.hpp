#pragma once

#include "constraint.hpp"
#include "linalg.hpp"
#include "model.hpp"

#include <map>

namespace diracq {

// W_ab = d2L/dv_a dv_b; v-free because the model caps velocity degree at 2.
inline ExprMat hessian(const Model& m) {
    ExprMat w(static_cast<size_t>(m.dim), ExprVec(static_cast<size_t>(m.dim)));
    for (int a = 1; a <= m.dim; ++a) {
        Expr da = m.lagrangian.derivative(Role::v, a);
        for (int b = 1; b <= m.dim; ++b)
            w[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)] = da.derivative(Role::v, b);
    }
    return w;
}

struct LegendreResult {
    Model model;
    ExprMat hessian;
    int rank = 0;
    ExprVec momenta_map;                  // p_a as functions of (q, v)
    std::map<int, Expr> velocity_solution; // solvable v^a in (q, p), zero section
    std::vector<Constraint> primaries;
    Expr h_canonical;
};

inline LegendreResult legendre_transform(const Model& m) {
    if (m.lagrangian.degree_in(Role::v) > 2)
        throw AlgorithmError("legendre: velocity degree above 2 is unsupported");
    LegendreResult out;
    out.model = m;
    VarTable tab = m.table();
    out.hessian = hessian(m);
    out.rank = linalg::weak_rank(out.hessian);

    ExprVec b;
    std::map<int, Expr> v_zero;
    for (int a = 1; a <= m.dim; ++a) v_zero[tab.index(Role::v, a)] = Expr::zero(tab);
    for (int a = 1; a <= m.dim; ++a) {
        out.momenta_map.push_back(m.lagrangian.derivative(Role::v, a));
        b.push_back(out.momenta_map.back().substitute(v_zero));
    }

    // Momenta are affine in v: p = W v + b. Null vectors of W give the
    // relations lambda . (p - b) = 0 that survive as primary constraints.
    ExprVec prim_exprs;
    for (const ExprVec& lam : linalg::weak_nullspace(out.hessian)) {
        Expr phi = Expr::zero(tab);
        for (int a = 1; a <= m.dim; ++a) {
            Expr pa = Expr::variable(tab, Role::p, a);
            phi += lam[static_cast<size_t>(a - 1)] * (pa - b[static_cast<size_t>(a - 1)]);
        }
        prim_exprs.push_back(phi.make_monic());
    }
    prim_exprs = detail::interreduce(prim_exprs);
    if (static_cast<int>(prim_exprs.size()) != m.dim - out.rank)
        throw AlgorithmError("legendre: primary constraint count disagrees with Hessian rank");
    int label = 1;
    for (const Expr& e : prim_exprs)
        out.primaries.push_back(Constraint{e, 0, ConstraintClass::unclassified, label++, false});

    // Solve W v = p - b for the pivot velocities, keeping free velocities
    // symbolic so the zero-section step below can be checked.
    ExprMat aug = out.hessian;
    for (int a = 1; a <= m.dim; ++a) {
        Expr pa = Expr::variable(tab, Role::p, a);
        aug[static_cast<size_t>(a - 1)].push_back(pa - b[static_cast<size_t>(a - 1)]);
    }
    linalg::Echelon ech = linalg::rref(aug, nullptr, m.dim);
    if (static_cast<int>(ech.pivot_cols.size()) != out.rank)
        throw AlgorithmError("legendre: velocity elimination rank mismatch");

    std::vector<bool> is_pivot(static_cast<size_t>(m.dim), false);
    for (int pc : ech.pivot_cols) is_pivot[static_cast<size_t>(pc)] = true;
    auto as_poly = [](const linalg::Frac& f) {
        if (!f.den.is_constant())
            throw AlgorithmError("legendre: velocity solution is not polynomial");
        return f.num;
    };
    std::map<int, Expr> pivot_general;
    for (size_t r = 0; r < ech.pivot_cols.size(); ++r) {
        int pc = ech.pivot_cols[r];
        Expr val = as_poly(ech.rows[r][static_cast<size_t>(m.dim)]);
        for (int j = 0; j < m.dim; ++j) {
            if (is_pivot[static_cast<size_t>(j)] || linalg::frac_zero(ech.rows[r][static_cast<size_t>(j)]))
                continue;
            Expr vj = Expr::variable(tab, Role::v, j + 1);
            val -= as_poly(ech.rows[r][static_cast<size_t>(j)]) * vj;
        }
        pivot_general[tab.index(Role::v, pc + 1)] = val;
        std::map<int, Expr> fv = v_zero;
        out.velocity_solution[pc + 1] = val.substitute(fv);
    }

    Expr energy = -m.lagrangian;
    for (int a = 1; a <= m.dim; ++a)
        energy += Expr::variable(tab, Role::v, a) * Expr::variable(tab, Role::p, a);
    Expr h_general = energy.substitute(pivot_general);

    // Each leftover velocity must enter affinely with a coefficient that is a
    // primary-ideal member; dropping it is then the zero section of the
    // Legendre image, not a choice of dynamics.
    IdealBasis prim_ideal(prim_exprs);
    Expr h = h_general;
    for (int a = 1; a <= m.dim; ++a) {
        if (is_pivot[static_cast<size_t>(a - 1)]) continue;
        Expr coeff = h_general.derivative(Role::v, a);
        if (coeff.uses(Role::v) || !prim_ideal.reduce(coeff).is_zero())
            throw AlgorithmError("legendre: free-velocity coefficient does not vanish on the constraint surface");
        h -= Expr::variable(tab, Role::v, a) * coeff;
    }
    if (h.uses(Role::v))
        throw AlgorithmError("legendre: residual velocity in canonical Hamiltonian");
    out.h_canonical = h;
    return out;
}

}  // namespace diracq
