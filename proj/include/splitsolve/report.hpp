#ifndef SPLITSOLVE_REPORT_HPP
#define SPLITSOLVE_REPORT_HPP

#include "types.hpp"

#include <optional>
#include <vector>

namespace splitsolve {

/// Outcome of an outer solve (Krylov or stationary).
/// residual_history holds relative residuals, entry 0 for the initial guess.
struct SolveReport {
    index_t iters = 0;
    bool converged = false;
    std::vector<double> residual_history;
    double R_k = 0.0;                   // ||b - A x|| / ||b||
    std::optional<double> E_k;          // ||x* - x|| / ||x*|| when x* is known
    double wall_seconds = 0.0;
    double inner_mean_sub1 = 0.0;       // mean Chebyshev iterations per inner solve
    double inner_mean_sub2 = 0.0;
};

} // namespace splitsolve

#endif // SPLITSOLVE_REPORT_HPP
