/// @file spectral.hpp
/// @brief Norm and spectral-radius estimators for the convergence bounds.
///
/// The hatted norm ||T^{-1/2} W T^{-1/2}|| is computed as the extreme
/// generalized eigenvalue of W x = lambda T x by power iteration with
/// T-solves; T^{1/2} is never formed.

#ifndef SPLITSOLVE_SPECTRAL_HPP
#define SPLITSOLVE_SPECTRAL_HPP

#include "cholesky.hpp"
#include "splittings.hpp"

#include <cmath>
#include <optional>
#include <random>

namespace splitsolve {

struct SpectralEstimates {
    double what_norm_1 = 0.0;  // ||W1hat||
    double what_norm_2 = 0.0;  // ||W2hat||
    std::optional<double> rho_B_estimate;
    double bound_method12 = 0.0;
    double alpha = 1.0;        // alpha the Method III bound was evaluated at
    double bound_method3 = 0.0;
    double alpha_opt = 1.0;
};

/// ||T^{-1/2} W T^{-1/2}||_2 for symmetric W and SPD T: the largest
/// generalized eigenvalue magnitude of W x = lambda T x. Each power step is
/// one solve with T and one multiply with W; convergence is relative change
/// of the T-inner-product Rayleigh quotient below tol.
inline double hatted_norm(const SparseReal& W, const SparseReal& T, double tol,
                          index_t max_iters = 5000, unsigned seed = 20240811u) {
    const index_t n = W.rows;
    const CholeskyFactor FT = factor(T);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = dist(rng);

    std::vector<double> wx(static_cast<std::size_t>(n)), tx(static_cast<std::size_t>(n)), work;
    double lambda = 0.0;
    for (index_t it = 0; it < max_iters; ++it) {
        spmv_into(W, x, wx);
        double wx_norm = 0.0;
        for (double v : wx) wx_norm += v * v;
        if (wx_norm == 0.0) return 0.0;  // W annihilates the iterate (e.g. W = 0)
        spmv_into(T, x, tx);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            num += x[j] * wx[j];
            den += x[j] * tx[j];
        }
        const double lambda_new = num / den;
        FT.solve_into(wx, x, work);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
        if (it > 0 && std::abs(lambda_new - lambda) <= tol * std::abs(lambda_new)) {
            return std::abs(lambda_new);
        }
        lambda = lambda_new;
    }
    return std::abs(lambda);
}

/// Iteration-matrix norm bound shared by Methods I and II:
/// sqrt( (1+nw1^{-2})^{-1} (1+nw2^{-2})^{-1} ), written division-free.
inline double bound_method12(double nw1, double nw2) {
    const double f1 = nw1 * nw1 / (1.0 + nw1 * nw1);
    const double f2 = nw2 * nw2 / (1.0 + nw2 * nw2);
    return std::sqrt(f1 * f2);
}

/// Method III iteration-matrix norm bound, product of the two factors.
inline double bound_method3(double nw1, double nw2, double alpha) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("bound_method3: alpha must be >= 1");
    const double am1 = alpha - 1.0;
    const double f2 = (am1 * am1 + nw2 * nw2) / (alpha * alpha + nw2 * nw2);
    const double f1 = (am1 * am1 + nw1 * nw1) / (alpha * alpha + nw1 * nw1);
    return std::sqrt(f2 * f1);
}

/// Squared single-factor bound ((alpha-1)^2 + nw^2)/(alpha^2 + nw^2), equal to
/// 1 - (2 alpha - 1)/(alpha^2 + nw^2); the quantity alpha_opt minimizes.
inline double method3_single_factor_sq(double nw, double alpha) {
    const double am1 = alpha - 1.0;
    return (am1 * am1 + nw * nw) / (alpha * alpha + nw * nw);
}

/// Minimizer of the single-factor bound: 1/2 + sqrt(1/2 + nw2^2).
inline double alpha_opt(double nw2) {
    if (nw2 < 0.0) throw std::invalid_argument("alpha_opt: nw2 must be nonnegative");
    return 0.5 + std::sqrt(0.5 + nw2 * nw2);
}

/// Estimate of the spectral radius of the iteration matrix B by power
/// iteration on the homogeneous sweep x -> step(x, b=0), exact inner solves.
/// Returns the maximum over `restarts` random starts; each estimate is the
/// geometric mean of the norm ratios over the trailing half of the run.
inline double contraction_estimate(const SplittingOperators& ops, index_t restarts, index_t iters,
                                   unsigned seed = 20240811u) {
    ChebyshevConfig exact = ops.inner_cfg;
    exact.reduction = 1e-14;
    exact.max_iters = 64;

    const index_t n = ops.size();
    const ComplexVector zero_b(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    auto sweep = [&](const ComplexVector& x) {
        ComplexVector rhs = complex_spmv(ops.hs1_re, ops.hs1_im, x);
        const ComplexVector y = detail::solve_subsystem(ops.sub1, ops.stats1, exact, rhs);
        rhs = complex_spmv(ops.hs2_re, ops.hs2_im, y);
        return detail::solve_subsystem(ops.sub2, ops.stats2, exact, rhs);
    };

    double best = 0.0;
    for (index_t r = 0; r < restarts; ++r) {
        ComplexVector x(n);
        for (index_t i = 0; i < n; ++i) x.set(i, {dist(rng), dist(rng)});
        scal(cdouble(1.0 / norm2(x), 0.0), x);
        double log_sum = 0.0;
        index_t counted = 0;
        for (index_t it = 0; it < iters; ++it) {
            ComplexVector y = sweep(x);
            const double ratio = norm2(y);
            if (ratio == 0.0) return 0.0;
            if (2 * it >= iters) {
                log_sum += std::log(ratio);
                ++counted;
            }
            scal(cdouble(1.0 / ratio, 0.0), y);
            x = std::move(y);
        }
        best = std::max(best, std::exp(log_sum / static_cast<double>(counted)));
    }
    return best;
}

/// Bundle of everything the spectrum report prints for one problem.
inline SpectralEstimates spectral_estimates(const ProblemInstance& p, double alpha,
                                            std::optional<double> rho_estimate = std::nullopt,
                                            double tol = 1e-10) {
    SpectralEstimates est;
    est.what_norm_1 = hatted_norm(p.W1, p.T, tol);
    est.what_norm_2 = hatted_norm(p.W2, p.T, tol);
    est.bound_method12 = bound_method12(est.what_norm_1, est.what_norm_2);
    est.alpha_opt = alpha_opt(est.what_norm_2);
    est.alpha = alpha;
    est.bound_method3 = bound_method3(est.what_norm_1, est.what_norm_2, std::max(alpha, 1.0));
    est.rho_B_estimate = rho_estimate;
    return est;
}

} // namespace splitsolve

#endif // SPLITSOLVE_SPECTRAL_HPP
