#pragma once

#include "gauge.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

namespace diracq {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Periodic position lattice with spectral momentum: N sites per dimension on
// a circle of circumference 2*pi, wave numbers -(N-1)/2 .. (N-1)/2.
struct Representation {
    int dims = 1;
    int sites = 31;
    double hbar = 1.0;
    std::vector<CMat> q;  // one per dimension, N^dims square
    std::vector<CMat> p;
    Eigen::Index total = 0;
};

namespace detail {

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMat fourier_matrix(int n) {
    CMat f(n, n);
    int half = (n - 1) / 2;
    for (int kr = 0; kr < n; ++kr) {
        double k = kr - half;
        for (int j = 0; j < n; ++j) {
            double x = 2.0 * M_PI * (j - half) / n;
            f(kr, j) = std::exp(std::complex<double>(0.0, -k * x)) / std::sqrt(double(n));
        }
    }
    return f;
}

inline CMat embed(const CMat& single, int slot, int dims, int n) {
    CMat out = CMat::Identity(1, 1);
    for (int a = 1; a <= dims; ++a)
        out = kron(out, a == slot ? single : CMat::Identity(n, n));
    return out;
}

// Deterministic power iteration for the largest singular value, given the
// actions of M and its adjoint. Never forms a dense product.
template <class Apply, class ApplyAdjoint>
double power_norm(Eigen::Index n, Apply mv, ApplyAdjoint mvh) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    CVec b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = std::complex<double>(unit(rng), unit(rng));
    b.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < 200; ++it) {
        CVec next = mvh(mv(b));
        sigma2 = next.norm();
        if (sigma2 == 0.0) return 0.0;
        b = next / sigma2;
    }
    return std::sqrt(sigma2);
}

// Largest singular value. Exact SVD at small sizes, power iteration above.
inline double operator_norm(const CMat& m) {
    if (m.rows() <= 200) return m.jacobiSvd().singularValues()(0);
    return power_norm(
        m.cols(), [&](const CVec& x) { return CVec(m * x); },
        [&](const CVec& x) { return CVec(m.adjoint() * x); });
}

// True when no lattice dimension carries variables of both expressions; the
// slot embeddings then commute exactly and every cross residual is zero.
inline bool share_dimension(const Expr& f, const Expr& g) {
    if (f.is_constant() || g.is_constant()) return false;
    auto used = [](const Expr& e) {
        const VarTable& tab = e.table();
        std::vector<bool> out(static_cast<size_t>(tab.dim()) + 1, false);
        for (const auto& [mono, c] : e.terms())
            for (int a = 1; a <= tab.dim(); ++a)
                if (mono[static_cast<size_t>(tab.index(Role::q, a))] > 0 ||
                    mono[static_cast<size_t>(tab.index(Role::p, a))] > 0)
                    out[static_cast<size_t>(a)] = true;
        return out;
    };
    std::vector<bool> uf = used(f), ug = used(g);
    for (size_t a = 1; a < uf.size() && a < ug.size(); ++a)
        if (uf[a] && ug[a]) return true;
    return false;
}

}  // namespace detail

inline Representation build_rep(int dims, int sites, double hbar) {
    if (sites < 3) throw AlgorithmError("quantize: lattice needs at least 3 sites");
    if (sites % 2 == 0) throw AlgorithmError("quantize: site count must be odd");
    if (dims < 1) throw AlgorithmError("quantize: dimension must be positive");
    if (!(hbar > 0)) throw AlgorithmError("quantize: hbar must be positive");
    long long cap = 1;
    for (int a = 0; a < dims; ++a) {
        cap *= sites;
        if (cap > 2048)
            throw AlgorithmError("quantize: lattice exceeds 2048 total sites; lower --sites");
    }
    Representation rep;
    rep.dims = dims;
    rep.sites = sites;
    rep.hbar = hbar;
    int half = (sites - 1) / 2;
    CMat q1 = CMat::Zero(sites, sites);
    CMat k1 = CMat::Zero(sites, sites);
    for (int j = 0; j < sites; ++j) {
        q1(j, j) = 2.0 * M_PI * (j - half) / sites;
        k1(j, j) = double(j - half);
    }
    CMat f = detail::fourier_matrix(sites);
    CMat p1 = hbar * f.adjoint() * k1 * f;
    for (int a = 1; a <= dims; ++a) {
        rep.q.push_back(detail::embed(q1, a, dims, sites));
        rep.p.push_back(detail::embed(p1, a, dims, sites));
    }
    rep.total = rep.q[0].rows();
    return rep;
}

// Weyl quantization: every monomial is averaged over all factor orders. The
// average factorizes across dimensions since their operators commute.
inline CMat quantize_poly(const Expr& f, const Representation& rep) {
    if (f.is_constant()) {
        Rational c = f.is_zero() ? Rational(0) : f.terms().begin()->second;
        return rational_double(c) * CMat::Identity(rep.total, rep.total);
    }
    if (f.table().dim() != rep.dims)
        throw AlgorithmError("quantize: expression dimension does not match the representation");
    if (f.uses(Role::v) || f.uses(Role::u))
        throw UnsupportedError("quantize: expression must be in (q, p) only");
    if (f.degree_in(Role::p) > 2)
        throw UnsupportedError("quantize: momentum degree above 2 is unsupported");
    VarTable tab = f.table();
    CMat out = CMat::Zero(rep.total, rep.total);
    for (const auto& [mono, coeff] : f.terms()) {
        CMat term;
        bool have_term = false;
        for (int a = 1; a <= rep.dims; ++a) {
            int alpha = mono[static_cast<size_t>(tab.index(Role::q, a))];
            int beta = mono[static_cast<size_t>(tab.index(Role::p, a))];
            if (alpha == 0 && beta == 0) continue;
            const CMat& qa = rep.q[static_cast<size_t>(a - 1)];
            const CMat& pa = rep.p[static_cast<size_t>(a - 1)];
            std::vector<CMat> qpow{CMat()};  // slot 0 unused: exponent 0 is skipped
            for (int i = 1; i <= alpha; ++i)
                qpow.push_back(i == 1 ? qa : CMat(qpow.back() * qa));
            auto lmul = [&](int e, const CMat& m) { return e == 0 ? m : CMat(qpow[static_cast<size_t>(e)] * m); };
            auto rmul = [&](const CMat& m, int e) { return e == 0 ? m : CMat(m * qpow[static_cast<size_t>(e)]); };
            CMat sym;
            if (beta == 0) {
                sym = qpow[static_cast<size_t>(alpha)];
            } else if (beta == 1) {
                sym = CMat::Zero(rep.total, rep.total);
                for (int i = 0; i <= alpha; ++i) sym += lmul(i, rmul(pa, alpha - i));
                sym /= double(alpha + 1);
            } else {
                sym = CMat::Zero(rep.total, rep.total);
                for (int i = 0; i <= alpha; ++i)
                    for (int j = 0; i + j <= alpha; ++j)
                        sym += lmul(i, rmul(CMat(rmul(pa, j) * pa), alpha - i - j));
                sym /= double((alpha + 2) * (alpha + 1) / 2);
            }
            term = have_term ? CMat(term * sym) : sym;
            have_term = true;
        }
        if (!have_term) term = CMat::Identity(rep.total, rep.total);
        out += rational_double(coeff) * term;
    }
    return out;
}

// Gaussian phase-space window used for the bulk residual measure: positions
// and wave numbers are damped at the lattice edges where the finite Fourier
// commutator differs from the canonical one.
inline CMat bulk_window(const Representation& rep) {
    int n = rep.sites;
    int half = (n - 1) / 2;
    double sigma_x2 = M_PI / double(half);
    double sigma_k2 = double(half) / M_PI;
    CMat gx1 = CMat::Zero(n, n), gk1 = CMat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double x = 2.0 * M_PI * (j - half) / n;
        double k = double(j - half);
        gx1(j, j) = std::exp(-x * x / (2.0 * sigma_x2));
        gk1(j, j) = std::exp(-k * k / (2.0 * sigma_k2));
    }
    CMat f = detail::fourier_matrix(n);
    CMat w1 = gx1 * (f.adjoint() * gk1 * f);
    CMat w = CMat::Identity(1, 1);
    for (int a = 0; a < rep.dims; ++a) w = detail::kron(w, w1);
    return w;
}

struct CommutatorResidual {
    double bulk = 0.0;    // window-sandwiched operator norm
    double global = 0.0;  // plain operator norm, edge modes included
};

// Residual of the correspondence iota({f,g}) = (1/(i hbar)) [iota(f), iota(g)].
inline CommutatorResidual commutator_check(const Expr& f, const Expr& g,
                                           const Representation& rep) {
    CommutatorResidual out;
    if (!detail::share_dimension(f, g)) return out;
    CMat of = quantize_poly(f, rep);
    CMat og = quantize_poly(g, rep);
    CMat obr = quantize_poly(poisson_bracket(f, g), rep);
    std::complex<double> scale(0.0, -1.0 / rep.hbar);  // 1/(i hbar)
    CMat w = bulk_window(rep);
    if (rep.total <= 200) {
        CMat r = obr - scale * (of * og - og * of);
        out.global = detail::operator_norm(r);
        out.bulk = detail::operator_norm(w.adjoint() * r * w);
        return out;
    }
    auto rx = [&](const CVec& x) { return CVec(obr * x - scale * (of * (og * x) - og * (of * x))); };
    auto rhx = [&](const CVec& x) {
        return CVec(obr.adjoint() * x -
                    std::conj(scale) * (og.adjoint() * (of.adjoint() * x) -
                                        of.adjoint() * (og.adjoint() * x)));
    };
    out.global = detail::power_norm(rep.total, rx, rhx);
    out.bulk = detail::power_norm(
        rep.total, [&](const CVec& x) { return CVec(w.adjoint() * rx(CVec(w * x))); },
        [&](const CVec& x) { return CVec(w.adjoint() * rhx(CVec(w * x))); });
    return out;
}

struct PhysicalStates {
    int dimension = 0;
    CMat basis;  // orthonormal columns spanning the joint numerical kernel
};

inline PhysicalStates physical_states(const std::vector<CMat>& ops, double tol = 1e-8) {
    if (ops.empty()) throw AlgorithmError("quantize: no constraint operators given");
    PhysicalStates out;
    Eigen::Index n = ops[0].cols();
    CMat stacked(static_cast<Eigen::Index>(ops.size()) * n, n);
    for (size_t i = 0; i < ops.size(); ++i)
        stacked.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = ops[i];
    Eigen::BDCSVD<CMat> svd(stacked, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? sv(0) * tol : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    out.dimension = static_cast<int>(n - rank);
    out.basis = svd.matrixV().rightCols(n - rank);
    return out;
}

// Joint kernel of all quantized constraints; with no constraints every state
// is physical.
inline PhysicalStates physical_states(const ConstraintAnalysis& an, const Representation& rep,
                                      double tol = 1e-8) {
    if (an.constraints.empty()) {
        PhysicalStates out;
        out.dimension = static_cast<int>(rep.total);
        out.basis = CMat::Identity(rep.total, rep.total);
        return out;
    }
    std::vector<CMat> ops;
    for (const Constraint& c : an.constraints) ops.push_back(quantize_poly(c.expr, rep));
    return physical_states(ops, tol);
}

struct AnomalyEntry {
    int n = 0, m = 0;  // 1-based first-class basis indices, n < m
    double norm = 0.0;
    bool supported = true;
};

// D_nm = ([iota(G_n), iota(G_m)] - i hbar sum_p iota(f^p_nm) iota(G_p)) / hbar^2.
inline std::vector<AnomalyEntry> anomaly_residual(const ConstraintAnalysis& an,
                                                  const Representation& rep) {
    std::vector<AnomalyEntry> out;
    const ExprVec& gs = an.first_class_basis;
    if (gs.size() < 2) return out;
    ClosureTable closure = closure_coefficients(an);
    std::vector<CMat> ops;
    bool ops_ok = true;
    try {
        for (const Expr& g : gs) ops.push_back(quantize_poly(g, rep));
    } catch (const UnsupportedError&) {
        ops_ok = false;
    }
    for (const ClosurePair& pr : closure) {
        AnomalyEntry e;
        e.n = pr.n;
        e.m = pr.m;
        if (!ops_ok) {
            e.supported = false;
            out.push_back(e);
            continue;
        }
        bool coeffs_zero = true;
        for (const Expr& c : pr.coefficients) coeffs_zero = coeffs_zero && c.is_zero();
        if (coeffs_zero && !detail::share_dimension(gs[static_cast<size_t>(pr.n - 1)],
                                                    gs[static_cast<size_t>(pr.m - 1)])) {
            out.push_back(e);  // slot-disjoint abelian pair: exactly zero
            continue;
        }
        try {
            const CMat& a = ops[static_cast<size_t>(pr.n - 1)];
            const CMat& b = ops[static_cast<size_t>(pr.m - 1)];
            CMat d = a * b - b * a;
            std::complex<double> ih(0.0, rep.hbar);
            for (size_t p = 0; p < gs.size(); ++p)
                if (!pr.coefficients[p].is_zero())
                    d -= ih * (quantize_poly(pr.coefficients[p], rep) * ops[p]);
            d /= rep.hbar * rep.hbar;
            e.norm = detail::operator_norm(d);
        } catch (const UnsupportedError&) {
            e.supported = false;
        }
        out.push_back(e);
    }
    return out;
}

struct AnomalyVerdict {
    double norm_small = 0.0;
    double norm_large = 0.0;
    bool anomalous = false;
    bool supported = true;
};

// A genuine anomaly persists as the basis grows; truncation noise does not.
inline AnomalyVerdict anomaly_verdict(const ConstraintAnalysis& an, int sites_small,
                                      int sites_large, double hbar) {
    AnomalyVerdict out;
    Representation small = build_rep(an.model.dim, sites_small, hbar);
    Representation large = build_rep(an.model.dim, sites_large, hbar);
    for (const AnomalyEntry& e : anomaly_residual(an, small)) {
        out.supported = out.supported && e.supported;
        out.norm_small = std::max(out.norm_small, e.norm);
    }
    for (const AnomalyEntry& e : anomaly_residual(an, large)) {
        out.supported = out.supported && e.supported;
        out.norm_large = std::max(out.norm_large, e.norm);
    }
    out.anomalous = out.supported && out.norm_large > 1e-8 && out.norm_large > 0.5 * out.norm_small;
    return out;
}

}  // namespace diracq
