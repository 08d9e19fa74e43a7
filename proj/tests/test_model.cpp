#include <diracq/model.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "testutil.hpp"

using namespace diracq;

TEST_CASE("parses the singular pair model", "[model]") {
    Model m = parse_model("dim 2; L = v1*q2");
    REQUIRE(m.dim == 2);
    VarTable t = m.table();
    CHECK(m.lagrangian == Expr::variable(t, Role::v, 1) * Expr::variable(t, Role::q, 2));
}

TEST_CASE("parses rationals, powers, and parentheses", "[model]") {
    Model m = parse_model("dim 2\nL = 1/2*(v1 - q2)^2");
    VarTable t = m.table();
    Expr v1 = Expr::variable(t, Role::v, 1), q2 = Expr::variable(t, Role::q, 2);
    CHECK(m.lagrangian == Expr::constant(Rational(1, 2), t) * (v1 - q2) * (v1 - q2));
}

TEST_CASE("newline and semicolon both separate statements", "[model]") {
    Model a = parse_model("dim 1; L = v1^2");
    Model b = parse_model("dim 1\nL = v1^2");
    Model c = parse_model("\n\ndim 1\n\nL = v1^2;\n");
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("unary minus and mixed terms", "[model]") {
    Model m = parse_model("dim 2; L = -v1 + 2*q1*v2 - 3/4*q2^2");
    VarTable t = m.table();
    Expr expect = -Expr::variable(t, Role::v, 1) +
                  Expr::constant(2, t) * Expr::variable(t, Role::q, 1) *
                      Expr::variable(t, Role::v, 2) -
                  Expr::constant(Rational(3, 4), t) * Expr::variable(t, Role::q, 2) *
                      Expr::variable(t, Role::q, 2);
    CHECK(m.lagrangian == expect);
}

TEST_CASE("diagnostics carry line and column", "[model]") {
    auto check_pos = [](const std::string& src, int line, int col, const std::string& frag) {
        try {
            parse_model(src);
            FAIL("expected ParseError for: " << src);
        } catch (const ParseError& e) {
            CHECK(e.line == line);
            CHECK(e.col == col);
            CHECK(std::string(e.what()).find(frag) != std::string::npos);
        }
    };
    check_pos("dim 2; L = p1", 1, 12, "undeclared variable 'p1'");
    check_pos("dim 2; L = q3", 1, 12, "undeclared variable 'q3'");
    check_pos("dim 2\nL = v1^3", 2, 1, "velocity degree > 2");
    check_pos("dim 2; L = v1*v1*v2", 1, 8, "velocity degree > 2");
    check_pos("L = v1; dim 2", 1, 1, "dim must be declared before L");
    check_pos("dim 0; L = 1", 1, 5, "dimension must be >= 1");
    check_pos("dim 2; L = q1/2", 1, 14, "'/' is only allowed inside rational literals");
    check_pos("dim 2; L = 1/0 + v1", 1, 14, "zero denominator");
    check_pos("dim 2; L = v1 - v1", 1, 8, "empty Lagrangian");
    check_pos("dim 2", 1, 1, "empty Lagrangian");
    check_pos("dim 2; dim 3; L = v1", 1, 8, "duplicate dim");
    check_pos("dim 2; L = v1 L = v2", 1, 15, "expected ';' or newline");
    check_pos("dim 2; K = v1", 1, 8, "expected 'dim' or 'L'");
}

TEST_CASE("print emits canonical form", "[model]") {
    Model m = parse_model("dim 2; L = q2*v1");
    CHECK(print_model(m) == "dim 2\nL = q2*v1\n");
    Model h = parse_model("dim 2; L = 1/2*(v1 - q2)^2");
    CHECK(print_model(h) == "dim 2\nL = 1/2*v1^2 - q2*v1 + 1/2*q2^2\n");
}

TEST_CASE("print then parse round-trips", "[model][property]") {
    std::mt19937 rng(777001);
    std::uniform_int_distribution<int> dd(1, 3), nt(1, 5), coef(-4, 4), den(1, 4), deg(0, 2);
    for (int rep = 0; rep < 60; ++rep) {
        int d = dd(rng);
        VarTable tab(d);
        Expr L = Expr::zero(tab);
        std::uniform_int_distribution<int> lab(1, d);
        int n = nt(rng);
        for (int t = 0; t < n; ++t) {
            int c = coef(rng);
            if (c == 0) c = 1;
            Expr term = Expr::constant(Rational(c, den(rng)), tab);
            int vdeg = deg(rng);
            for (int s = 0; s < vdeg; ++s) term *= Expr::variable(tab, Role::v, lab(rng));
            int qdeg = deg(rng);
            for (int s = 0; s < qdeg; ++s) term *= Expr::variable(tab, Role::q, lab(rng));
            L += term;
        }
        if (L.is_zero()) continue;
        Model m;
        m.dim = d;
        m.lagrangian = L;
        Model back = parse_model(print_model(m));
        REQUIRE(back == m);
    }
}
