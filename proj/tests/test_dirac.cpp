#include <catch2/catch_amalgamated.hpp>

#include <diracq/dirac.hpp>

#include "testutil.hpp"

#include <random>

using namespace diracq;

namespace {

Expr qv(const VarTable& tab, int a) { return Expr::variable(tab, Role::q, a); }
Expr pv(const VarTable& tab, int a) { return Expr::variable(tab, Role::p, a); }
Expr uv(const VarTable& tab, int a) { return Expr::variable(tab, Role::u, a); }

ConstraintAnalysis analyze(const char* src) { return run_algorithm(parse_model(src)); }

}  // namespace

TEST_CASE("total Hamiltonian attaches one multiplier per primary") {
    Model m = parse_model("dim 2\nL = v1*q2");
    VarTable tab = m.table();
    LegendreResult lr = legendre_transform(m);
    Expr want = uv(tab, 1) * (pv(tab, 1) - qv(tab, 2)) + uv(tab, 2) * pv(tab, 2);
    REQUIRE(total_hamiltonian(lr) == want);

    Model m2 = parse_model("dim 2\nL = 1/2*(v1 - q2)^2");
    LegendreResult lr2 = legendre_transform(m2);
    Expr want2 = Rational(1, 2) * pv(tab, 1) * pv(tab, 1) + qv(tab, 2) * pv(tab, 1) +
                 uv(tab, 1) * pv(tab, 2);
    REQUIRE(total_hamiltonian(lr2) == want2);

    Model m3 = parse_model("dim 2\nL = 1/2*v1^2 + 1/2*v2^2");
    REQUIRE(total_hamiltonian(legendre_transform(m3)) == legendre_transform(m3).h_canonical);
}

TEST_CASE("consistency residuals split into the three cases") {
    Model m = parse_model("dim 2\nL = v1*q2");
    VarTable tab = m.table();
    LegendreResult lr = legendre_transform(m);
    ExprVec exprs;
    for (const Constraint& c : lr.primaries) exprs.push_back(c.expr);
    IdealBasis ideal(exprs);
    ConsistencyOutcome step = consistency_step(lr.primaries, total_hamiltonian(lr), ideal, 2);
    REQUIRE(step.new_constraints.empty());
    REQUIRE(step.equations.size() == 2);
    REQUIRE(step.records[0].kase == 'b');
    REQUIRE(step.records[0].residual == -uv(tab, 2));
    REQUIRE(step.records[1].residual == uv(tab, 1));
    REQUIRE(step.equations[0].u_coeffs[1] == Expr::constant(-1, tab));
    REQUIRE(step.equations[0].inhom.is_zero());

    Model m2 = parse_model("dim 2\nL = 1/2*(v1 - q2)^2");
    LegendreResult lr2 = legendre_transform(m2);
    IdealBasis ideal2(ExprVec{lr2.primaries[0].expr});
    ConsistencyOutcome step2 = consistency_step(lr2.primaries, total_hamiltonian(lr2), ideal2, 1);
    REQUIRE(step2.equations.empty());
    REQUIRE(step2.records[0].kase == 'c');
    REQUIRE(step2.records[0].residual == -pv(tab, 1));
    REQUIRE(step2.new_constraints.size() == 1);
    REQUIRE(step2.new_constraints[0].expr == pv(tab, 1));
}

TEST_CASE("free particle carries no constraints") {
    ConstraintAnalysis an = analyze("dim 2\nL = 1/2*v1^2 + 1/2*v2^2");
    REQUIRE(an.constraints.empty());
    REQUIRE(an.first_class_basis.empty());
    REQUIRE(an.second_class_basis.empty());
    REQUIRE(an.multipliers.free_count == 0);
    REQUIRE(an.dof == 2);
    REQUIRE(an.iteration_log.empty());
}

TEST_CASE("L = v1*q2 yields a pure second-class pair with fixed multipliers") {
    ConstraintAnalysis an = analyze("dim 2\nL = v1*q2");
    VarTable tab = an.model.table();
    REQUIRE(an.constraints.size() == 2);
    REQUIRE(an.primary_count == 2);
    REQUIRE(an.iteration_log.size() == 1);
    REQUIRE(an.first_class_basis.empty());
    REQUIRE(an.second_class_basis.size() == 2);
    REQUIRE(an.second_class_labels == std::vector<int>{1, 2});
    REQUIRE(an.constraints[0].klass == ConstraintClass::second);
    REQUIRE(an.constraints[1].klass == ConstraintClass::second);
    REQUIRE(an.multipliers.free_count == 0);
    REQUIRE(an.multipliers.particular[0].is_zero());
    REQUIRE(an.multipliers.particular[1].is_zero());
    REQUIRE(an.dof == 1);
    REQUIRE(an.primary_first_class_count == 0);
    REQUIRE(an.bracket_matrix[0][1] == Expr::constant(-1, tab));
    REQUIRE(an.bracket_matrix[1][0] == Expr::constant(1, tab));
}

TEST_CASE("L = 1/2*(v1 - q2)^2 yields a first-class pair with a free multiplier") {
    ConstraintAnalysis an = analyze("dim 2\nL = 1/2*(v1 - q2)^2");
    VarTable tab = an.model.table();
    REQUIRE(an.constraints.size() == 2);
    REQUIRE(an.primary_count == 1);
    REQUIRE(an.constraints[0].expr == pv(tab, 2));
    REQUIRE(an.constraints[1].expr == pv(tab, 1));
    REQUIRE(an.constraints[1].generation == 1);
    REQUIRE_FALSE(an.constraints[1].mixed);
    REQUIRE(origin_str(an.constraints[1]) == "secondary(1)");
    REQUIRE(an.iteration_log.size() == 2);
    REQUIRE(an.iteration_log[0].entries[0].kase == 'c');
    REQUIRE(an.iteration_log[0].entries[0].promoted_label == 2);
    REQUIRE(an.iteration_log[1].entries[0].kase == 'a');
    REQUIRE(an.iteration_log[1].entries[1].kase == 'a');
    REQUIRE(an.first_class_basis.size() == 2);
    REQUIRE(an.first_class_basis[0] == pv(tab, 2));
    REQUIRE(an.first_class_basis[1] == pv(tab, 1));
    REQUIRE(an.second_class_basis.empty());
    REQUIRE(an.constraints[0].klass == ConstraintClass::first);
    REQUIRE(an.constraints[1].klass == ConstraintClass::first);
    REQUIRE(an.multipliers.free_count == 1);
    REQUIRE(an.multipliers.particular[0].is_zero());
    REQUIRE(an.dof == 0);
    REQUIRE(an.primary_first_class_count == 1);
}

TEST_CASE("mixed-class model separates first- and second-class sectors") {
    ConstraintAnalysis an = analyze("dim 4\nL = v1*q2 + 1/2*(v3 - q4)^2");
    VarTable tab = an.model.table();
    REQUIRE(an.constraints.size() == 4);
    REQUIRE(an.primary_count == 3);
    REQUIRE(an.constraints[3].expr == pv(tab, 3));
    REQUIRE(an.constraints[3].generation == 1);
    REQUIRE(an.second_class_labels == std::vector<int>{1, 2});
    REQUIRE(an.first_class_basis.size() == 2);
    REQUIRE(an.first_class_basis[0] == pv(tab, 4));
    REQUIRE(an.first_class_basis[1] == pv(tab, 3));
    REQUIRE(an.multipliers.free_count == 1);
    REQUIRE(an.multipliers.free_directions[0][0].is_zero());
    REQUIRE(an.multipliers.free_directions[0][1].is_zero());
    REQUIRE(an.multipliers.free_directions[0][2] == Expr::constant(1, tab));
    REQUIRE(an.dof == 1);
    REQUIRE(an.primary_first_class_count == 1);
}

TEST_CASE("a linear potential fixes a multiplier to a nonzero value") {
    ConstraintAnalysis an = analyze("dim 2\nL = v1*q2 + q1");
    VarTable tab = an.model.table();
    REQUIRE(an.constraints.size() == 2);
    REQUIRE(an.second_class_basis.size() == 2);
    REQUIRE(an.multipliers.free_count == 0);
    REQUIRE(an.multipliers.particular[0].is_zero());
    REQUIRE(an.multipliers.particular[1] == Expr::constant(1, tab));
    REQUIRE(an.dof == 1);
    REQUIRE(an.iteration_log.size() == 1);
}

TEST_CASE("mixed residuals promote their multiplier-free remainder") {
    ConstraintAnalysis an = analyze("dim 3\nL = v1*q3 + v2*q3 - q1^2");
    VarTable tab = an.model.table();
    REQUIRE(an.primary_count == 3);
    REQUIRE(an.constraints.size() == 4);
    REQUIRE(an.constraints[3].expr == qv(tab, 1));
    REQUIRE(an.constraints[3].mixed);
    REQUIRE(an.constraints[3].generation == 1);
    REQUIRE(origin_str(an.constraints[3]) == "secondary(1) [mixed residual]");
    bool flagged = false;
    for (const ResidualRecord& rr : an.iteration_log[0].entries)
        if (rr.kase == 'm' && rr.promoted_label == 4) flagged = true;
    REQUIRE(flagged);
    REQUIRE(an.iteration_log.size() == 2);
    REQUIRE(an.second_class_basis.size() == 4);
    REQUIRE(an.first_class_basis.empty());
    REQUIRE(an.multipliers.free_count == 0);
    for (const Expr& u : an.multipliers.particular) REQUIRE(u.is_zero());
    REQUIRE(an.dof == 1);
}

TEST_CASE("multiplier solver handles the no-equation case") {
    VarTable tab{2};
    IdealBasis ideal;
    MultiplierSolution sol = solve_multipliers({}, ideal, 2, tab);
    REQUIRE(sol.free_count == 2);
    REQUIRE(sol.particular.size() == 2);
    REQUIRE(sol.particular[0].is_zero());
    REQUIRE(sol.free_directions.size() == 2);
    REQUIRE(sol.free_directions[0][0] == Expr::constant(1, tab));
    REQUIRE(sol.free_directions[1][1] == Expr::constant(1, tab));
}

TEST_CASE("classification invariants hold across the corpus") {
    for (const char* src :
         {"dim 2\nL = v1*q2", "dim 2\nL = 1/2*(v1 - q2)^2", "dim 4\nL = v1*q2 + 1/2*(v3 - q4)^2",
          "dim 2\nL = v1*q2 + q1", "dim 3\nL = v1*q3 + v2*q3 - q1^2"}) {
        ConstraintAnalysis an = analyze(src);
        size_t j = an.constraints.size();
        REQUIRE(an.first_class_basis.size() + an.second_class_basis.size() == j);
        REQUIRE(an.second_class_basis.size() % 2 == 0);
        for (size_t a = 0; a < j; ++a)
            for (size_t b = 0; b < j; ++b)
                REQUIRE(an.bracket_matrix[a][b] == -an.bracket_matrix[b][a]);
        // First-class elements commute weakly with every constraint.
        for (const Expr& g : an.first_class_basis)
            for (const Constraint& c : an.constraints)
                REQUIRE(an.ideal.reduce(poisson_bracket(g, c.expr)).is_zero());
        REQUIRE(an.dof >= 0);
    }
}

TEST_CASE("classification is stable under unimodular recombination") {
    for (const char* src : {"dim 2\nL = v1*q2", "dim 4\nL = v1*q2 + 1/2*(v3 - q4)^2"}) {
        ConstraintAnalysis an = analyze(src);
        size_t j = an.constraints.size();
        // Shear then swap: determinant -1, integer inverse.
        std::vector<Constraint> mixed = an.constraints;
        mixed[0].expr = an.constraints[0].expr + Rational(2) * an.constraints[1].expr;
        std::swap(mixed[0], mixed[1]);
        for (size_t k = 0; k < j; ++k) mixed[k].label = static_cast<int>(k) + 1;
        ExprVec exprs;
        for (const Constraint& c : mixed) exprs.push_back(c.expr);
        IdealBasis ideal(exprs);
        ClassifyResult cr = classify(mixed, ideal);
        REQUIRE(cr.first_class_basis.size() == an.first_class_basis.size());
        REQUIRE(cr.second_class_basis.size() == an.second_class_basis.size());
    }
}

TEST_CASE("Dirac bracket reduces to the Poisson bracket without second-class constraints") {
    ConstraintAnalysis an = analyze("dim 2\nL = 1/2*(v1 - q2)^2");
    VarTable tab = an.model.table();
    REQUIRE(dirac_bracket(qv(tab, 1), pv(tab, 1), an) == Expr::constant(1, tab));
    REQUIRE(dirac_bracket(qv(tab, 1), qv(tab, 2), an).is_zero());
}

TEST_CASE("Dirac bracket of the coordinates in the second-class pair model") {
    ConstraintAnalysis an = analyze("dim 2\nL = v1*q2");
    VarTable tab = an.model.table();
    REQUIRE(dirac_bracket(qv(tab, 1), qv(tab, 2), an) == Expr::constant(1, tab));
    REQUIRE(dirac_bracket(qv(tab, 2), qv(tab, 1), an) == Expr::constant(-1, tab));
}

TEST_CASE("second-class constraints are degenerate directions of the Dirac bracket") {
    std::mt19937 rng(20260817);
    for (const char* src : {"dim 2\nL = v1*q2", "dim 2\nL = v1*q2 + q1",
                            "dim 3\nL = v1*q3 + v2*q3 - q1^2"}) {
        ConstraintAnalysis an = analyze(src);
        VarTable tab = an.model.table();
        for (int trial = 0; trial < 20; ++trial) {
            Expr f = testutil::random_qp_expr(rng, tab, 4, 3);
            for (const Expr& chi : an.second_class_basis)
                REQUIRE(dirac_bracket(chi, f, an).is_zero());
        }
    }
}

TEST_CASE("Dirac bracket is antisymmetric and satisfies Jacobi weakly") {
    std::mt19937 rng(997);
    ConstraintAnalysis an = analyze("dim 2\nL = v1*q2");
    VarTable tab = an.model.table();
    for (int trial = 0; trial < 8; ++trial) {
        Expr f = testutil::random_qp_expr(rng, tab, 3, 2);
        Expr g = testutil::random_qp_expr(rng, tab, 3, 2);
        Expr h = testutil::random_qp_expr(rng, tab, 3, 2);
        REQUIRE(an.ideal.reduce(dirac_bracket(f, g, an) + dirac_bracket(g, f, an)).is_zero());
        Expr jac = dirac_bracket(f, dirac_bracket(g, h, an), an) +
                   dirac_bracket(g, dirac_bracket(h, f, an), an) +
                   dirac_bracket(h, dirac_bracket(f, g, an), an);
        REQUIRE(an.ideal.reduce(jac).is_zero());
    }
}

TEST_CASE("generation cap aborts instead of looping") {
    AnalysisOptions opts;
    opts.max_generations = 1;
    REQUIRE_THROWS_AS(run_algorithm(parse_model("dim 2\nL = 1/2*(v1 - q2)^2"), opts),
                      AlgorithmError);
    opts.max_generations = 2;
    REQUIRE_NOTHROW(run_algorithm(parse_model("dim 2\nL = 1/2*(v1 - q2)^2"), opts));
}

TEST_CASE("repeated runs produce identical analyses") {
    const char* src = "dim 4\nL = v1*q2 + 1/2*(v3 - q4)^2";
    ConstraintAnalysis a = analyze(src), b = analyze(src);
    REQUIRE(a.constraints.size() == b.constraints.size());
    for (size_t k = 0; k < a.constraints.size(); ++k)
        REQUIRE(a.constraints[k].expr.str() == b.constraints[k].expr.str());
    REQUIRE(a.h_total.str() == b.h_total.str());
    for (size_t k = 0; k < a.first_class_basis.size(); ++k)
        REQUIRE(a.first_class_basis[k].str() == b.first_class_basis[k].str());
}
