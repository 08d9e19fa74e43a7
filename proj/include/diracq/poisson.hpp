#pragma once

#include "expr.hpp"

namespace diracq {

// Canonical bracket {f,g} = sum_a (df/dq^a dg/dp_a - dg/dq^a df/dp_a).
// Velocity and multiplier variables are treated as constants.
inline Expr poisson_bracket(const Expr& f, const Expr& g) {
    const VarTable& tab = f.table().dim() ? f.table() : g.table();
    Expr s = Expr::zero(tab);
    for (int a = 1; a <= tab.dim(); ++a) {
        s += f.derivative(Role::q, a) * g.derivative(Role::p, a);
        s -= g.derivative(Role::q, a) * f.derivative(Role::p, a);
    }
    return s;
}

}  // namespace diracq
