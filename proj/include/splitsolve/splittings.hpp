/// @file splittings.hpp
/// @brief The matrix-splitting methods for A = W1 - W2 + iT with W1, W2, T
///        symmetric positive definite.
///
/// Each scheme is available two ways: as a stationary two-half-step sweep and
/// as the induced preconditioner v -> M^{-1} v, where
///
///   Method I:   M = -(1/i) (W1 + iT) T^{-1} (W2 - iT)
///   Method II:  M = -(1/i) (T - iW1) T^{-1} (T + iW2)
///   Method III: M = 1/((1-2a)i) (aT + iW2) T^{-1} (aT - iW1),  a >= 1
///   SNSS:       M = 1/(a - ib) (aT + W2) T^{-1} (i(b+1)T + W1), a, b > 0
///
/// Complex subsystems are solved by PRESB-preconditioned Chebyshev; the one
/// real SPD subsystem (SNSS, first half-step) takes a direct factorization.

#ifndef SPLITSOLVE_SPLITTINGS_HPP
#define SPLITSOLVE_SPLITTINGS_HPP

#include "chebyshev.hpp"
#include "cholesky.hpp"
#include "complex_vector.hpp"
#include "presb.hpp"
#include "problems.hpp"
#include "report.hpp"

#include <chrono>
#include <stdexcept>
#include <string>
#include <utility>

namespace splitsolve {

enum class SplittingKind { MethodI, MethodII, MethodIII, SNSS };

struct SplittingScheme {
    SplittingKind kind = SplittingKind::MethodI;
    double alpha = 1.0;  // Method III (>= 1) and SNSS (> 0)
    double beta = 1.0;   // SNSS (> 0)

    static SplittingScheme method1() { return {SplittingKind::MethodI, 1.0, 1.0}; }
    static SplittingScheme method2() { return {SplittingKind::MethodII, 1.0, 1.0}; }
    static SplittingScheme method3(double a) { return {SplittingKind::MethodIII, a, 1.0}; }
    static SplittingScheme snss(double a, double b) { return {SplittingKind::SNSS, a, b}; }

    void validate() const {
        if (kind == SplittingKind::MethodIII && !(alpha >= 1.0))
            throw std::invalid_argument("Method III requires alpha >= 1");
        if (kind == SplittingKind::SNSS && !(alpha > 0.0 && beta > 0.0))
            throw std::invalid_argument("SNSS requires alpha > 0 and beta > 0");
    }

    std::string label() const {
        switch (kind) {
            case SplittingKind::MethodI: return "Method-I";
            case SplittingKind::MethodII: return "Method-II";
            case SplittingKind::MethodIII: return "Method-III(alpha=" + format_param(alpha) + ")";
            case SplittingKind::SNSS:
                return "SNSS(alpha=" + format_param(alpha) + ";beta=" + format_param(beta) + ")";
        }
        return "?";
    }

private:
    static std::string format_param(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return buf;
    }
};

struct SubsystemStats {
    long long cheb_iters = 0;
    long long solves = 0;

    double mean() const { return solves == 0 ? 0.0 : static_cast<double>(cheb_iters) / static_cast<double>(solves); }
};

/// One half-step subsystem: target matrix re + i*im and its solver.
struct Subsystem {
    SparseReal re;
    SparseReal im;               // signed imaginary part (may be -T)
    bool direct = false;         // real SPD system, single Cholesky
    PresbOperator presb;         // when !direct
    CholeskyFactor real_factor;  // when direct
};

/// All operators of one (scheme, problem) pair, built once. Applies mutate
/// only the iteration statistics, so run one solve at a time per object;
/// independent problems may solve concurrently on separate objects.
struct SplittingOperators {
    SplittingScheme scheme;
    const ProblemInstance* problem = nullptr;
    ChebyshevConfig inner_cfg;

    Subsystem sub1, sub2;

    // RHS operators of the two half-steps: rhs_k = (hs_re + i hs_im) x + c_k b
    SparseReal hs1_re, hs1_im, hs2_re, hs2_im;
    cdouble c1{0.0, 0.0}, c2{0.0, 0.0};

    cdouble m_scale{1.0, 0.0};  // M = m_scale * Left * T^{-1} * Right

    mutable SubsystemStats stats1, stats2;

    index_t size() const { return problem->n; }
    void reset_stats() const { stats1 = {}; stats2 = {}; }
};

namespace detail {

inline ComplexVector solve_subsystem(const Subsystem& sub, SubsystemStats& stats,
                                     const ChebyshevConfig& cfg, const ComplexVector& rhs) {
    ++stats.solves;
    if (sub.direct) {
        ComplexVector y(rhs.size());
        std::vector<double> work;
        sub.real_factor.solve_into(rhs.re, y.re, work);
        sub.real_factor.solve_into(rhs.im, y.im, work);
        return y;
    }
    ChebyshevResult r = cheb_solve(sub.re, sub.im, sub.presb, rhs, cfg, ComplexVector(rhs.size()));
    stats.cheb_iters += r.iters;
    return r.x;
}

} // namespace detail

inline SplittingOperators build_operators(const ProblemInstance& p, SplittingScheme s,
                                          ChebyshevConfig inner_cfg) {
    s.validate();
    inner_cfg.validate();
    SplittingOperators ops;
    ops.scheme = s;
    ops.problem = &p;
    ops.inner_cfg = inner_cfg;
    const SparseReal zero = zero_matrix(p.n);

    switch (s.kind) {
        case SplittingKind::MethodI:
            ops.sub1.re = p.W1;
            ops.sub1.im = p.T;
            ops.sub1.presb = presb_build(p.W1, p.T, false);
            ops.sub2.re = p.W2;
            ops.sub2.im = scale(p.T, -1.0);
            ops.sub2.presb = presb_build(p.W2, p.T, true);
            ops.hs1_re = p.W2;
            ops.hs1_im = zero;
            ops.c1 = {1.0, 0.0};
            ops.hs2_re = p.W1;
            ops.hs2_im = zero;
            ops.c2 = {-1.0, 0.0};
            ops.m_scale = {0.0, 1.0};  // -(1/i) = i
            break;
        case SplittingKind::MethodII:
            ops.sub1.re = p.T;
            ops.sub1.im = scale(p.W1, -1.0);
            ops.sub1.presb = presb_build(p.T, p.W1, true);
            ops.sub2.re = p.T;
            ops.sub2.im = p.W2;
            ops.sub2.presb = presb_build(p.T, p.W2, false);
            ops.hs1_re = zero;
            ops.hs1_im = scale(p.W2, -1.0);
            ops.c1 = {0.0, -1.0};
            ops.hs2_re = zero;
            ops.hs2_im = p.W1;
            ops.c2 = {0.0, -1.0};
            ops.m_scale = {0.0, 1.0};
            break;
        case SplittingKind::MethodIII: {
            const SparseReal aT = scale(p.T, s.alpha);
            const SparseReal am1T = scale(p.T, s.alpha - 1.0);
            ops.sub1.re = aT;
            ops.sub1.im = p.W2;
            ops.sub1.presb = presb_build(aT, p.W2, false);
            ops.sub2.re = aT;
            ops.sub2.im = scale(p.W1, -1.0);
            ops.sub2.presb = presb_build(aT, p.W1, true);
            ops.hs1_re = am1T;
            ops.hs1_im = p.W1;
            ops.c1 = {0.0, -1.0};
            ops.hs2_re = am1T;
            ops.hs2_im = scale(p.W2, -1.0);
            ops.c2 = {0.0, -1.0};
            // M = 1/((1-2a)i) * Left T^{-1} Right
            ops.m_scale = cdouble(1.0, 0.0) / (cdouble(1.0 - 2.0 * s.alpha, 0.0) * cdouble(0.0, 1.0));
            break;
        }
        case SplittingKind::SNSS: {
            ops.sub1.re = add_scaled(s.alpha, p.T, 1.0, p.W2);
            ops.sub1.im = zero;
            ops.sub1.direct = true;
            ops.sub1.real_factor = factor(ops.sub1.re);
            const SparseReal b1T = scale(p.T, s.beta + 1.0);
            ops.sub2.re = p.W1;
            ops.sub2.im = b1T;
            ops.sub2.presb = presb_build(p.W1, b1T, false);
            ops.hs1_re = add_scaled(s.alpha, p.T, 1.0, p.W1);
            ops.hs1_im = p.T;
            ops.c1 = {-1.0, 0.0};
            ops.hs2_re = p.W2;
            ops.hs2_im = scale(p.T, s.beta);
            ops.c2 = {1.0, 0.0};
            ops.m_scale = cdouble(1.0, 0.0) / cdouble(s.alpha, -s.beta);
            break;
        }
    }
    return ops;
}

/// One full two-half-step sweep of the chosen method from iterate x.
inline ComplexVector stationary_step(const SplittingOperators& ops, const ComplexVector& x,
                                     const ComplexVector& b) {
    ComplexVector rhs = complex_spmv(ops.hs1_re, ops.hs1_im, x);
    axpy(ops.c1, b, rhs);
    const ComplexVector y = detail::solve_subsystem(ops.sub1, ops.stats1, ops.inner_cfg, rhs);
    rhs = complex_spmv(ops.hs2_re, ops.hs2_im, y);
    axpy(ops.c2, b, rhs);
    return detail::solve_subsystem(ops.sub2, ops.stats2, ops.inner_cfg, rhs);
}

/// Apply the induced preconditioner: out = M^{-1} v, realized as a solve with
/// the left factor, a multiply with T, a solve with the right factor, and the
/// inverse scalar.
inline ComplexVector precond_apply(const SplittingOperators& ops, const ComplexVector& v) {
    if (v.size() != ops.size()) throw std::invalid_argument("precond_apply: dimension mismatch");
    const ComplexVector u = detail::solve_subsystem(ops.sub1, ops.stats1, ops.inner_cfg, v);
    ComplexVector w = complex_spmv(ops.problem->T, zero_matrix(ops.size()), u);
    ComplexVector out = detail::solve_subsystem(ops.sub2, ops.stats2, ops.inner_cfg, w);
    scal(cdouble(1.0, 0.0) / ops.m_scale, out);
    return out;
}

/// Run the stationary iteration from the zero vector until the relative
/// residual drops below tol or max_sweeps is reached (reported, not thrown).
inline std::pair<ComplexVector, SolveReport> stationary_solve(const SplittingOperators& ops,
                                                              const ComplexVector& b, double tol,
                                                              index_t max_sweeps) {
    if (!(tol > 0.0)) throw std::invalid_argument("stationary_solve: tol must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    ops.reset_stats();
    const ProblemInstance& p = *ops.problem;
    SolveReport rep;
    ComplexVector x(b.size());
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.residual_history = {0.0};
        rep.R_k = 0.0;
        return {x, rep};
    }
    auto rel_res = [&](const ComplexVector& xk) {
        return norm2(sub(b, complex_spmv(p.A_re, p.T, xk))) / bnorm;
    };
    double r = rel_res(x);
    rep.residual_history.push_back(r);
    while (r > tol && rep.iters < max_sweeps) {
        x = stationary_step(ops, x, b);
        ++rep.iters;
        r = rel_res(x);
        rep.residual_history.push_back(r);
    }
    rep.converged = r <= tol;
    rep.R_k = r;
    if (p.x_exact) {
        rep.E_k = norm2(sub(*p.x_exact, x)) / norm2(*p.x_exact);
    }
    rep.inner_mean_sub1 = ops.stats1.mean();
    rep.inner_mean_sub2 = ops.stats2.mean();
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {x, rep};
}

} // namespace splitsolve

#endif // SPLITSOLVE_SPLITTINGS_HPP
