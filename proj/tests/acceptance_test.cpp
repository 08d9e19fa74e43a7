#include <diracq/corpus.hpp>
#include <diracq/gauge.hpp>
#include <diracq/quantize.hpp>

#include "testutil.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace diracq;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CorpusEntry& entry(const std::string& name) {
    for (const CorpusEntry& e : corpus())
        if (e.name == name) return e;
    throw AlgorithmError("no bundled model named " + name);
}

ConstraintAnalysis analyze(const std::string& src) { return run_algorithm(parse_model(src)); }

Expr qv(const VarTable& tab, int a) { return Expr::variable(tab, Role::q, a); }
Expr pv(const VarTable& tab, int a) { return Expr::variable(tab, Role::p, a); }

// 1. Antisymmetry, Jacobi, and Leibniz on random polynomials, exactly.
bool bracket_laws(std::string& note) {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(20260817);
    for (int t = 0; t < 200; ++t) {
        VarTable tab(1 + t % 3);
        Expr f = testutil::random_qp_expr(rng, tab);
        Expr g = testutil::random_qp_expr(rng, tab);
        Expr h = testutil::random_qp_expr(rng, tab);
        if (!(poisson_bracket(f, g) + poisson_bracket(g, f)).is_zero()) {
            note = "antisymmetry failed at trial " + std::to_string(t);
            return false;
        }
        Expr jac = poisson_bracket(f, poisson_bracket(g, h)) +
                   poisson_bracket(g, poisson_bracket(h, f)) +
                   poisson_bracket(h, poisson_bracket(f, g));
        if (!jac.is_zero()) {
            note = "jacobi failed at trial " + std::to_string(t);
            return false;
        }
        Expr leib = poisson_bracket(f, g * h) - poisson_bracket(f, g) * h -
                    g * poisson_bracket(f, h);
        if (!leib.is_zero()) {
            note = "leibniz failed at trial " + std::to_string(t);
            return false;
        }
    }
    double secs = seconds_since(t0);
    if (secs >= 10.0) {
        note = "200 triples took " + std::to_string(secs) + "s, budget is 10s";
        return false;
    }
    return true;
}

// 2. Positive-definite kinetic terms pass the Legendre map with no
// constraints, and the canonical Hamiltonian is the exact inverse-mass form.
bool regular_legendre(std::string& note) {
    std::mt19937 rng(771);
    std::uniform_int_distribution<int> ent(-2, 2);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> expo(1, 3);
    for (int t = 0; t < 20; ++t) {
        int d = 2 + t % 3;
        std::vector<std::vector<long>> a(d, std::vector<long>(d));
        for (auto& row : a)
            for (long& x : row) x = ent(rng);
        RatMat mass(d, RatVec(d, 0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                long s = i == j ? 1 : 0;
                for (int k = 0; k < d; ++k) s += a[k][i] * a[k][j];
                mass[i][j] = s;
            }
        VarTable tab(d);
        Expr kin = Expr::zero(tab);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                kin += Rational(1, 2) * mass[i][j] *
                       (Expr::variable(tab, Role::v, i + 1) * Expr::variable(tab, Role::v, j + 1));
        Expr pot = Expr::zero(tab);
        std::uniform_int_distribution<int> slot(1, d);
        for (int s = 0; s < 1 + t % 3; ++s) {
            Expr pw = Expr::constant(1, tab);
            Expr q = qv(tab, slot(rng));
            int e = expo(rng);
            for (int r = 0; r < e; ++r) pw = pw * q;
            pot += Rational(coef(rng)) * pw;
        }
        Model m;
        m.dim = d;
        m.lagrangian = kin - pot;
        LegendreResult lr = legendre_transform(m);
        if (lr.rank != d || !lr.primaries.empty()) {
            note = "trial " + std::to_string(t) + ": unexpected degeneracy";
            return false;
        }
        RatMat inv(d, RatVec(d, 0));
        for (int j = 0; j < d; ++j) {
            RatVec e(d, 0);
            e[static_cast<size_t>(j)] = 1;
            auto col = linalg::rat_solve(mass, e);
            if (!col) {
                note = "trial " + std::to_string(t) + ": mass matrix not invertible";
                return false;
            }
            for (int i = 0; i < d; ++i) inv[i][j] = (*col)[static_cast<size_t>(i)];
        }
        Expr expect = pot;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                expect += Rational(1, 2) * inv[i][j] * (pv(tab, i + 1) * pv(tab, j + 1));
        if (!(expect - lr.h_canonical).is_zero()) {
            note = "trial " + std::to_string(t) + ": canonical hamiltonian mismatch";
            return false;
        }
        ConstraintAnalysis an = run_algorithm(m);
        if (!an.constraints.empty() || an.dof != d) {
            note = "trial " + std::to_string(t) + ": full analysis disagrees";
            return false;
        }
    }
    return true;
}

// 3. Every bundled model reproduces its recorded counts and hand-traced facts.
bool golden_corpus(std::string& note) {
    for (const CorpusEntry& e : corpus()) {
        ConstraintAnalysis an = analyze(e.source);
        bool ok = static_cast<int>(an.constraints.size()) == e.constraints &&
                  static_cast<int>(an.legendre.primaries.size()) == e.primaries &&
                  static_cast<int>(an.first_class_basis.size()) == e.first_class &&
                  static_cast<int>(an.second_class_basis.size()) == e.second_class &&
                  an.multipliers.free_count == e.free_count &&
                  static_cast<int>(an.iteration_log.size()) == e.generations &&
                  rational_str(an.dof) == e.dof;
        if (!ok) {
            note = e.name + ": counts drifted from the recorded analysis";
            return false;
        }
    }
    {
        ConstraintAnalysis an = analyze(entry("linear-velocity").source);
        for (const ResidualRecord& r : an.iteration_log.at(0).entries)
            if (r.kase != 'b') {
                note = "linear-velocity: expected every generation-1 residual to fix a multiplier";
                return false;
            }
        for (const Expr& u : an.multipliers.particular)
            if (!u.is_zero()) {
                note = "linear-velocity: multipliers should be pinned to zero";
                return false;
            }
    }
    {
        ConstraintAnalysis an = analyze(entry("gauge-kinetic").source);
        if (an.legendre.h_canonical.str() != "1/2*p1^2 + q2*p1") {
            note = "gauge-kinetic: canonical hamiltonian drifted";
            return false;
        }
        bool saw_new = false;
        for (const ResidualRecord& r : an.iteration_log.at(0).entries)
            saw_new = saw_new || r.kase == 'c';
        if (!saw_new || an.constraints.at(1).generation != 1) {
            note = "gauge-kinetic: missing the secondary constraint";
            return false;
        }
    }
    {
        ConstraintAnalysis an = analyze(entry("driven-linear").source);
        VarTable tab = an.model.table();
        if (!an.multipliers.particular.at(0).is_zero() ||
            an.multipliers.particular.at(1) != Expr::constant(1, tab)) {
            note = "driven-linear: expected multipliers (0, 1)";
            return false;
        }
    }
    {
        ConstraintAnalysis an = analyze(entry("mixed-class").source);
        VarTable tab = an.model.table();
        bool dir_ok = an.multipliers.free_directions.size() == 1 &&
                      an.multipliers.free_directions.at(0).at(0).is_zero() &&
                      an.multipliers.free_directions.at(0).at(1).is_zero() &&
                      an.multipliers.free_directions.at(0).at(2) == Expr::constant(1, tab);
        if (!dir_ok || an.second_class_labels != std::vector<int>{1, 2}) {
            note = "mixed-class: classification details drifted";
            return false;
        }
    }
    return true;
}

// 4. The count of free multiplier directions equals the count of first-class
// primaries, model by model.
bool free_matches_first_class(std::string& note) {
    for (const CorpusEntry& e : corpus()) {
        ConstraintAnalysis an = analyze(e.source);
        if (an.multipliers.free_count != an.primary_first_class_count) {
            note = e.name + ": " + std::to_string(an.multipliers.free_count) + " free vs " +
                   std::to_string(an.primary_first_class_count) + " first-class primaries";
            return false;
        }
    }
    return true;
}

// 5. Dirac brackets against any second-class constraint vanish weakly.
bool second_class_degenerate(std::string& note) {
    std::mt19937 rng(4242);
    for (const char* name : {"linear-velocity", "mixed-class", "driven-linear"}) {
        ConstraintAnalysis an = analyze(entry(name).source);
        VarTable tab = an.model.table();
        for (const Expr& chi : an.second_class_basis)
            for (int t = 0; t < 50; ++t) {
                Expr f = testutil::random_qp_expr(rng, tab, 4, 3);
                if (!an.ideal.reduce(dirac_bracket(chi, f, an)).is_zero()) {
                    note = std::string(name) + ": trial " + std::to_string(t) +
                           " left a nonzero bracket";
                    return false;
                }
            }
    }
    return true;
}

// 6. The linear reduction has dimension 2*dof, its induced brackets agree
// with the Dirac brackets of its coordinates, and the induced form's kernel
// is exactly the gauge span.
bool reduction_consistent(std::string& note) {
    for (const CorpusEntry& e : corpus()) {
        ConstraintAnalysis an = analyze(e.source);
        ReducedSpace red = linear_reduction(an);
        VarTable tab = an.model.table();
        if (Rational(red.dimension) != an.dof * 2) {
            note = e.name + ": reduced dimension is not twice the dof count";
            return false;
        }
        for (size_t i = 0; i < red.basis.size(); ++i)
            for (size_t j = 0; j < red.basis.size(); ++j)
                if (dirac_bracket(red.basis[i], red.basis[j], an) !=
                    Expr::constant(red.induced_brackets[i][j], tab)) {
                    note = e.name + ": induced bracket disagrees with the dirac bracket";
                    return false;
                }
        size_t nb = red.sigma_directions.size();
        RatMat gram(nb, RatVec(nb));
        for (size_t i = 0; i < nb; ++i)
            for (size_t j = 0; j < nb; ++j)
                gram[i][j] = detail::symplectic_product(red.sigma_directions[i],
                                                        red.sigma_directions[j]);
        std::vector<RatVec> kernel;
        for (const RatVec& coeff : linalg::rat_nullspace(gram)) {
            RatVec v(red.sigma_directions.empty() ? 0 : red.sigma_directions[0].size(), 0);
            for (size_t i = 0; i < nb; ++i)
                for (size_t k = 0; k < v.size(); ++k)
                    v[k] += coeff[i] * red.sigma_directions[i][k];
            kernel.push_back(std::move(v));
        }
        int rank_kernel = kernel.empty() ? 0 : linalg::rat_rank(kernel);
        int rank_gauge =
            red.gauge_directions.empty() ? 0 : linalg::rat_rank(red.gauge_directions);
        RatMat joint = kernel;
        for (const RatVec& x : red.gauge_directions) joint.push_back(x);
        int rank_joint = joint.empty() ? 0 : linalg::rat_rank(joint);
        if (rank_kernel != rank_gauge || rank_joint != rank_gauge) {
            note = e.name + ": form kernel and gauge span differ";
            return false;
        }
    }
    return true;
}

// 7. Windowed commutator residuals: machine-small for the elementary pair,
// shrinking like hbar^2 for quadratic ones, while the global defect stays
// order one.
bool correspondence_scaling(std::string& note) {
    auto t0 = std::chrono::steady_clock::now();
    VarTable tab(1);
    Expr q1 = qv(tab, 1), p1 = pv(tab, 1);
    Representation rep = build_rep(1, 31, 1.0);
    CommutatorResidual qp = commutator_check(q1, p1, rep);
    if (qp.bulk > 1e-10) {
        note = "elementary pair bulk residual " + std::to_string(qp.bulk);
        return false;
    }
    if (qp.global < 0.99) {
        note = "elementary pair global defect collapsed to " + std::to_string(qp.global);
        return false;
    }
    double r1 = commutator_check(q1 * p1, p1 * p1, rep).bulk;
    double r001 = commutator_check(q1 * p1, p1 * p1, build_rep(1, 31, 0.01)).bulk;
    double slope = std::log10(r1 / r001) / 2.0;
    if (!(slope >= 1.8)) {
        note = "hbar scaling slope " + std::to_string(slope) + ", expected >= 1.8";
        return false;
    }
    double c1 = commutator_check(q1 * q1, p1 * p1, rep).bulk;
    double c01 = commutator_check(q1 * q1, p1 * p1, build_rep(1, 31, 0.1)).bulk;
    if (!(c01 < c1)) {
        note = "quadratic pair residual did not shrink with hbar";
        return false;
    }
    double secs = seconds_since(t0);
    if (secs >= 30.0) {
        note = "scaling block took " + std::to_string(secs) + "s, budget is 30s";
        return false;
    }
    return true;
}

// 8. Constraint kernels: one momentum constraint leaves a one-dimensional
// kernel at every lattice size, and the gauge pair jointly does the same.
bool kernel_dimensions(std::string& note) {
    VarTable tab(1);
    for (int n : {5, 15, 31}) {
        Representation rep = build_rep(1, n, 1.0);
        std::vector<CMat> ops = {quantize_poly(pv(tab, 1), rep)};
        int dim = physical_states(ops).dimension;
        if (dim != 1) {
            note = "momentum kernel at " + std::to_string(n) + " sites has dimension " +
                   std::to_string(dim);
            return false;
        }
    }
    ConstraintAnalysis an = analyze(entry("gauge-kinetic").source);
    Representation rep = build_rep(2, 31, 1.0);
    int dim = physical_states(an, rep).dimension;
    if (dim != 1) {
        note = "gauge pair kernel has dimension " + std::to_string(dim);
        return false;
    }
    return true;
}

// 9. First-class algebras quantize without anomaly at two lattice sizes.
bool anomaly_free(std::string& note) {
    ConstraintAnalysis gk = analyze(entry("gauge-kinetic").source);
    std::vector<AnomalyEntry> table = anomaly_residual(gk, build_rep(2, 9, 1.0));
    if (table.size() != 1 || !table[0].supported || table[0].norm > 1e-10) {
        note = "gauge-kinetic residual table is off";
        return false;
    }
    AnomalyVerdict v = anomaly_verdict(gk, 5, 9, 1.0);
    if (v.anomalous || !v.supported) {
        note = "gauge-kinetic flagged anomalous";
        return false;
    }
    ConstraintAnalysis mc = analyze(entry("mixed-class").source);
    for (const AnomalyEntry& e : anomaly_residual(mc, build_rep(4, 5, 1.0)))
        if (e.norm > 1e-10) {
            note = "mixed-class pair (" + std::to_string(e.n) + "," + std::to_string(e.m) +
                   ") residual " + std::to_string(e.norm);
            return false;
        }
    AnomalyVerdict v2 = anomaly_verdict(mc, 3, 5, 1.0);
    if (v2.anomalous) {
        note = "mixed-class flagged anomalous";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        const char* desc;
        bool (*body)(std::string&);
    };
    const Criterion table[] = {
        {"poisson brackets obey antisymmetry, jacobi, leibniz", bracket_laws},
        {"regular lagrangians invert cleanly through the legendre map", regular_legendre},
        {"bundled models reproduce their recorded analyses", golden_corpus},
        {"free multipliers match first-class primaries", free_matches_first_class},
        {"second-class constraints drop out of every dirac bracket", second_class_degenerate},
        {"linear reduction agrees with dirac brackets and the gauge span", reduction_consistent},
        {"quantized brackets track classical ones to hbar^2 order", correspondence_scaling},
        {"constraint kernels have the expected dimensions", kernel_dimensions},
        {"first-class closure survives quantization without anomaly", anomaly_free},
    };
    int failures = 0;
    int k = 0;
    for (const Criterion& c : table) {
        ++k;
        std::string note;
        bool ok = false;
        try {
            ok = c.body(note);
        } catch (const std::exception& e) {
            note = e.what();
        }
        if (!ok) ++failures;
        std::printf("%s  %d  %s%s%s\n", ok ? "PASS" : "FAIL", k, c.desc,
                    note.empty() ? "" : ": ", note.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
