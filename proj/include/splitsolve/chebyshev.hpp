/// @file chebyshev.hpp
/// @brief Chebyshev semi-iteration for the PRESB-preconditioned inner solves.
///
/// The three-term recurrence assumes the preconditioned spectrum lies in
/// [interval_lo, interval_hi]; the PRESB guarantee fixes that to [1/2, 1].
/// The stopping rule monitors the residual of the un-preconditioned system,
/// recomputed every step.

#ifndef SPLITSOLVE_CHEBYSHEV_HPP
#define SPLITSOLVE_CHEBYSHEV_HPP

#include "complex_vector.hpp"
#include "presb.hpp"

#include <stdexcept>

namespace splitsolve {

struct ChebyshevConfig {
    double interval_lo = 0.5;
    double interval_hi = 1.0;
    double reduction = 1e-2;
    index_t max_iters = 20;

    void validate() const {
        if (!(0.0 < interval_lo && interval_lo < interval_hi))
            throw std::invalid_argument("ChebyshevConfig: need 0 < interval_lo < interval_hi");
        if (!(0.0 < reduction && reduction < 1.0))
            throw std::invalid_argument("ChebyshevConfig: need 0 < reduction < 1");
        if (max_iters < 1) throw std::invalid_argument("ChebyshevConfig: need max_iters >= 1");
    }
};

struct ChebyshevResult {
    ComplexVector x;
    index_t iters = 0;
    bool converged = false;  // truncation at max_iters is a normal return
};

/// Solve (A_re + i A_im) x = c with the PRESB-preconditioned Chebyshev
/// recurrence, starting from x0. Returns as soon as
/// ||c - A x|| <= reduction * ||c - A x0||.
///
/// Counting convention: the initial scaled-residual step produces iterate
/// zero; iters is the number of three-term accelerated steps after it, which
/// is how the semi-iteration's iterates are indexed. max_iters caps iters.
inline ChebyshevResult cheb_solve(const SparseReal& A_re, const SparseReal& A_im,
                                  const PresbOperator& P, const ComplexVector& c,
                                  const ChebyshevConfig& cfg, const ComplexVector& x0) {
    cfg.validate();
    if (c.size() != A_re.rows || x0.size() != A_re.cols)
        throw std::invalid_argument("cheb_solve: dimension mismatch");

    const double theta = 0.5 * (cfg.interval_hi + cfg.interval_lo);
    const double delta = 0.5 * (cfg.interval_hi - cfg.interval_lo);
    const double sigma1 = theta / delta;

    ChebyshevResult out;
    out.x = x0;

    std::vector<double> scratch;
    ComplexVector ax(c.size()), r(c.size()), z(c.size()), d(c.size());
    PresbWorkspace ws;

    auto true_residual = [&]() {
        complex_spmv_into(A_re, A_im, out.x, ax, scratch);
        for (std::size_t j = 0; j < r.re.size(); ++j) {
            r.re[j] = c.re[j] - ax.re[j];
            r.im[j] = c.im[j] - ax.im[j];
        }
        return norm2(r);
    };

    const double rnorm0 = true_residual();
    if (rnorm0 == 0.0) {
        out.converged = true;
        return out;
    }

    presb_apply_into(P, r, z, ws);
    d = z;
    scal(cdouble(1.0 / theta, 0.0), d);
    double rho = 1.0 / sigma1;

    // iterate zero
    axpy(cdouble(1.0, 0.0), d, out.x);
    if (true_residual() <= cfg.reduction * rnorm0) {
        out.converged = true;
        return out;
    }

    for (index_t k = 1; k <= cfg.max_iters; ++k) {
        presb_apply_into(P, r, z, ws);
        const double rho_next = 1.0 / (2.0 * sigma1 - rho);
        scal(cdouble(rho_next * rho, 0.0), d);
        axpy(cdouble(2.0 * rho_next / delta, 0.0), z, d);
        rho = rho_next;
        axpy(cdouble(1.0, 0.0), d, out.x);
        out.iters = k;
        if (true_residual() <= cfg.reduction * rnorm0) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

} // namespace splitsolve

#endif // SPLITSOLVE_CHEBYSHEV_HPP
