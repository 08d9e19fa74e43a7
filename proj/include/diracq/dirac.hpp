#pragma once

#include "legendre.hpp"
#include "poisson.hpp"

#include <algorithm>
#include <optional>

namespace diracq {

// One conservation equation sum_i u_coeffs[i] u^i + inhom ~ 0, everything
// already reduced modulo the generation's constraint ideal.
struct MultiplierEquation {
    int source_label = 0;
    ExprVec u_coeffs;
    Expr inhom;
};

struct MultiplierSolution {
    ExprVec particular;
    std::vector<ExprVec> free_directions;
    int free_count = 0;
};

struct ResidualRecord {
    int label = 0;
    Expr residual;
    char kase = 'a';      // 'a' conserved, 'b' multiplier equation, 'c' new
                          // constraint, 'm' promoted from a mixed residual
    int promoted_label = 0;
};

struct GenerationRecord {
    int generation = 0;
    std::vector<ResidualRecord> entries;
    std::vector<int> new_labels;
};

struct ClassifyResult {
    ExprMat bracket_matrix;
    ExprVec first_class_basis;
    std::vector<ExprVec> first_class_combos;
    ExprVec second_class_basis;
    std::vector<int> second_class_labels;
};

struct ConstraintAnalysis {
    Model model;
    LegendreResult legendre;
    Expr h_total;
    std::vector<Constraint> constraints;
    IdealBasis ideal;
    bool ideal_complete = true;
    std::vector<GenerationRecord> iteration_log;
    std::vector<MultiplierEquation> final_equations;
    MultiplierSolution multipliers;
    ExprMat bracket_matrix;
    ExprVec first_class_basis;
    std::vector<ExprVec> first_class_combos;
    ExprVec second_class_basis;
    std::vector<int> second_class_labels;
    int primary_count = 0;
    int primary_first_class_count = 0;
    Rational dof;
};

struct AnalysisOptions {
    int max_generations = 20;
    int degree_cap = 12;
};

inline Expr total_hamiltonian(const LegendreResult& lr) {
    VarTable tab = lr.model.table();
    Expr h = lr.h_canonical;
    for (const Constraint& c : lr.primaries)
        h += Expr::variable(tab, Role::u, c.label) * c.expr;
    return h;
}

struct ConsistencyOutcome {
    std::vector<ResidualRecord> records;
    std::vector<Constraint> new_constraints;
    std::vector<MultiplierEquation> equations;
};

// One scan of every constraint against H_T: the residual trichotomy.
inline ConsistencyOutcome consistency_step(const std::vector<Constraint>& current,
                                           const Expr& h_total, const IdealBasis& ideal,
                                           int multiplier_count) {
    ConsistencyOutcome out;
    if (current.empty()) return out;
    VarTable tab = current.front().expr.table();
    ExprVec pending;
    for (const Constraint& c : current) {
        Expr r = ideal.reduce(poisson_bracket(c.expr, h_total));
        ResidualRecord rec;
        rec.label = c.label;
        rec.residual = r;
        if (r.is_zero()) {
            rec.kase = 'a';
            out.records.push_back(rec);
            continue;
        }
        if (r.degree_in(Role::u) > 1)
            throw AlgorithmError("dirac: consistency residual is not affine in the multipliers");
        ExprVec coeffs;
        Expr inhom = r;
        bool has_u = false;
        for (int i = 1; i <= multiplier_count; ++i) {
            Expr a = r.derivative(Role::u, i);
            if (!a.is_zero()) has_u = true;
            inhom -= Expr::variable(tab, Role::u, i) * a;
            coeffs.push_back(a);
        }
        if (has_u) {
            rec.kase = 'b';
            out.equations.push_back(MultiplierEquation{c.label, coeffs, inhom});
        } else {
            // Candidate secondary; keep only what is new relative to the
            // ideal and to candidates already found in this scan.
            Expr nf = divide(r, pending).remainder;
            if (nf.is_zero()) {
                rec.kase = 'a';
            } else {
                rec.kase = 'c';
                nf = nf.make_monic();
                pending.push_back(nf);
                out.new_constraints.push_back(Constraint{nf, 1, ConstraintClass::unclassified, 0, false});
            }
        }
        out.records.push_back(rec);
    }
    return out;
}

inline MultiplierSolution solve_multipliers(const std::vector<MultiplierEquation>& equations,
                                            const IdealBasis& ideal, int multiplier_count,
                                            const VarTable& tab) {
    MultiplierSolution out;
    if (multiplier_count == 0) return out;
    if (equations.empty()) {
        out.particular.assign(static_cast<size_t>(multiplier_count), Expr::zero(tab));
        for (int i = 0; i < multiplier_count; ++i) {
            ExprVec dir(static_cast<size_t>(multiplier_count), Expr::zero(tab));
            dir[static_cast<size_t>(i)] = Expr::constant(1, tab);
            out.free_directions.push_back(std::move(dir));
        }
        out.free_count = multiplier_count;
        return out;
    }
    ExprMat a;
    ExprVec rhs;
    for (const MultiplierEquation& eq : equations) {
        a.push_back(eq.u_coeffs);
        rhs.push_back(-eq.inhom);
    }
    linalg::AffineSolution sol = linalg::solve_affine(a, rhs, &ideal);
    if (!sol.consistent)
        throw AlgorithmError("dirac: multiplier system is inconsistent (regularity violation)");
    out.particular = sol.particular;
    out.free_directions = sol.homogeneous;
    out.free_count = static_cast<int>(sol.homogeneous.size());
    for (const MultiplierEquation& eq : equations) {
        Expr check = eq.inhom;
        for (size_t i = 0; i < eq.u_coeffs.size(); ++i) check += eq.u_coeffs[i] * out.particular[i];
        if (!ideal.reduce(check).is_zero())
            throw AlgorithmError("dirac: multiplier solution failed verification");
        for (const ExprVec& dir : out.free_directions) {
            Expr h = Expr::zero(tab);
            for (size_t i = 0; i < eq.u_coeffs.size(); ++i) h += eq.u_coeffs[i] * dir[i];
            if (!ideal.reduce(h).is_zero())
                throw AlgorithmError("dirac: free multiplier direction failed verification");
        }
    }
    return out;
}

inline ClassifyResult classify(const std::vector<Constraint>& constraints, const IdealBasis& ideal) {
    ClassifyResult out;
    size_t j = constraints.size();
    if (j == 0) return out;
    VarTable tab = constraints.front().expr.table();
    out.bracket_matrix.assign(j, ExprVec(j, Expr::zero(tab)));
    for (size_t a = 0; a < j; ++a)
        for (size_t b = a + 1; b < j; ++b) {
            Expr m = ideal.reduce(poisson_bracket(constraints[a].expr, constraints[b].expr));
            out.bracket_matrix[a][b] = m;
            out.bracket_matrix[b][a] = -m;
        }
    int s = linalg::weak_rank(out.bracket_matrix, &ideal);
    if (s % 2 != 0)
        throw AlgorithmError("dirac: constraint bracket matrix has odd rank");
    out.first_class_combos = linalg::weak_nullspace(out.bracket_matrix, &ideal);
    if (static_cast<int>(out.first_class_combos.size()) != static_cast<int>(j) - s)
        throw AlgorithmError("dirac: classification rank/nullity mismatch");
    for (const ExprVec& combo : out.first_class_combos) {
        Expr g = Expr::zero(tab);
        for (size_t k = 0; k < j; ++k) g += combo[k] * constraints[k].expr;
        out.first_class_basis.push_back(g.make_monic());
    }
    // Second-class representatives: greedily take label pairs while the
    // principal submatrix stays nondegenerate.
    std::vector<size_t> sel;
    auto sub_rank = [&](const std::vector<size_t>& idx) {
        ExprMat sub(idx.size(), ExprVec(idx.size()));
        for (size_t r = 0; r < idx.size(); ++r)
            for (size_t c = 0; c < idx.size(); ++c) sub[r][c] = out.bracket_matrix[idx[r]][idx[c]];
        return linalg::weak_rank(sub, &ideal);
    };
    bool grew = true;
    while (static_cast<int>(sel.size()) < s && grew) {
        grew = false;
        for (size_t a = 0; a < j && !grew; ++a) {
            if (std::find(sel.begin(), sel.end(), a) != sel.end()) continue;
            for (size_t b = a + 1; b < j && !grew; ++b) {
                if (std::find(sel.begin(), sel.end(), b) != sel.end()) continue;
                std::vector<size_t> trial = sel;
                trial.push_back(a);
                trial.push_back(b);
                std::sort(trial.begin(), trial.end());
                if (sub_rank(trial) == static_cast<int>(trial.size())) {
                    sel = trial;
                    grew = true;
                }
            }
        }
    }
    if (static_cast<int>(sel.size()) != s)
        throw AlgorithmError("dirac: could not select a nondegenerate second-class set");
    for (size_t idx : sel) {
        out.second_class_basis.push_back(constraints[idx].expr);
        out.second_class_labels.push_back(constraints[idx].label);
    }
    return out;
}

inline ConstraintAnalysis run_algorithm(const Model& m, const AnalysisOptions& opts = {}) {
    ConstraintAnalysis an;
    an.model = m;
    an.legendre = legendre_transform(m);
    an.h_total = total_hamiltonian(an.legendre);
    an.constraints = an.legendre.primaries;
    an.primary_count = static_cast<int>(an.constraints.size());
    VarTable tab = m.table();
    int next_label = an.primary_count + 1;

    bool fixed_point = an.constraints.empty();
    for (int gen = 1; !fixed_point && gen <= opts.max_generations; ++gen) {
        ExprVec exprs;
        for (const Constraint& c : an.constraints) exprs.push_back(c.expr);
        an.ideal = IdealBasis(exprs, opts.degree_cap);
        an.ideal_complete = an.ideal_complete && an.ideal.complete();

        ConsistencyOutcome step = consistency_step(an.constraints, an.h_total, an.ideal,
                                                   an.primary_count);
        GenerationRecord rec;
        rec.generation = gen;
        rec.entries = step.records;

        size_t case_c_cursor = 0;
        for (Constraint& c : step.new_constraints) {
            c.generation = gen;
            c.label = next_label++;
            rec.new_labels.push_back(c.label);
            while (case_c_cursor < rec.entries.size() && rec.entries[case_c_cursor].kase != 'c')
                ++case_c_cursor;
            if (case_c_cursor < rec.entries.size())
                rec.entries[case_c_cursor++].promoted_label = c.label;
            an.constraints.push_back(c);
        }
        // A residual can mix a multiplier part with an unsolvable remainder;
        // eliminating the multipliers exposes that remainder as a secondary.
        if (!step.equations.empty()) {
            ExprMat a;
            ExprVec rhs;
            for (const MultiplierEquation& eq : step.equations) {
                a.push_back(eq.u_coeffs);
                rhs.push_back(-eq.inhom);
            }
            linalg::AffineSolution sol = linalg::solve_affine(a, rhs, &an.ideal);
            ExprVec pending;
            for (Constraint& c : step.new_constraints) pending.push_back(c.expr);
            for (size_t k = 0; k < sol.inconsistency.size(); ++k) {
                Expr nf = divide(sol.inconsistency[k], pending).remainder;
                if (nf.is_zero()) continue;
                nf = nf.make_monic();
                pending.push_back(nf);
                Constraint c{nf, gen, ConstraintClass::unclassified, next_label++, true};
                rec.new_labels.push_back(c.label);
                int src = step.equations[static_cast<size_t>(sol.inconsistent_rows[k])].source_label;
                for (ResidualRecord& rr : rec.entries)
                    if (rr.label == src) {
                        rr.kase = 'm';
                        rr.promoted_label = c.label;
                    }
                an.constraints.push_back(c);
            }
        }
        an.final_equations = step.equations;
        an.iteration_log.push_back(rec);
        fixed_point = rec.new_labels.empty();
    }
    if (!fixed_point) throw AlgorithmError("dirac: non-terminating at cap");
    if (an.constraints.empty()) {
        an.ideal = IdealBasis();
        an.dof = m.dim;
        return an;
    }
    // The scan that confirmed the fixed point used the final ideal already.
    ClassifyResult cr = classify(an.constraints, an.ideal);
    an.bracket_matrix = cr.bracket_matrix;
    an.first_class_basis = cr.first_class_basis;
    an.first_class_combos = cr.first_class_combos;
    an.second_class_basis = cr.second_class_basis;
    an.second_class_labels = cr.second_class_labels;
    for (Constraint& c : an.constraints) {
        bool row_zero = true;
        for (size_t k = 0; k < an.constraints.size() && row_zero; ++k)
            row_zero = an.bracket_matrix[static_cast<size_t>(c.label - 1)][k].is_zero();
        c.klass = row_zero ? ConstraintClass::first : ConstraintClass::second;
    }
    an.multipliers = solve_multipliers(an.final_equations, an.ideal, an.primary_count, tab);

    int n = static_cast<int>(an.first_class_basis.size());
    int s = static_cast<int>(an.second_class_basis.size());
    if (an.primary_count > 0) {
        ExprMat prim_cols(an.constraints.size(), ExprVec(static_cast<size_t>(an.primary_count)));
        for (size_t r = 0; r < an.constraints.size(); ++r)
            for (int c = 0; c < an.primary_count; ++c)
                prim_cols[r][static_cast<size_t>(c)] = an.bracket_matrix[r][static_cast<size_t>(c)];
        an.primary_first_class_count = an.primary_count - linalg::weak_rank(prim_cols, &an.ideal);
    }
    an.dof = Rational(m.dim) - Rational(n) - Rational(s, 2);
    if (an.dof < 0) throw AlgorithmError("dirac: negative degree-of-freedom count");
    return an;
}

inline Rational dof_count(const ConstraintAnalysis& an) { return an.dof; }

// Standard second-class elimination: {f,g} - {f,chi} C^{-1} {chi,g}, with
// C^{-1} taken as adjugate over determinant and the determinant reduced first.
inline Expr dirac_bracket(const Expr& f, const Expr& g, const ConstraintAnalysis& an) {
    Expr base = an.ideal.reduce(poisson_bracket(f, g));
    size_t s = an.second_class_basis.size();
    if (s == 0) return base;
    ExprMat c(s, ExprVec(s));
    for (size_t r = 0; r < s; ++r)
        for (size_t k = 0; k < s; ++k)
            c[r][k] = an.ideal.reduce(poisson_bracket(an.second_class_basis[r], an.second_class_basis[k]));
    Expr d = an.ideal.reduce(linalg::det(c));
    if (d.is_zero())
        throw AlgorithmError("dirac: second-class bracket matrix is weakly singular");
    ExprMat adj = linalg::adjugate(c);
    Expr num = Expr::zero(f.table());
    for (size_t r = 0; r < s; ++r) {
        Expr fr = poisson_bracket(f, an.second_class_basis[r]);
        for (size_t k = 0; k < s; ++k)
            num += fr * adj[r][k] * poisson_bracket(an.second_class_basis[k], g);
    }
    num = an.ideal.reduce(num);
    Expr corr;
    if (d.is_constant()) {
        corr = num.scaled(Rational(1) / d.constant_value());
    } else {
        Division dv = divide(num, {d});
        if (!dv.remainder.is_zero())
            throw AlgorithmError("dirac: bracket correction is not polynomial");
        corr = dv.quotients[0];
    }
    return an.ideal.reduce(base - corr);
}

}  // namespace diracq
