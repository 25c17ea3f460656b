/// @file problems.hpp
/// @brief Test-problem generators and Matrix Market problem ingestion.
///
/// All generated systems have the form A x = (W1 - W2 + i T) x = b on an
/// m x m interior grid of the unit square, unknowns ordered lexicographically
/// with the x index fastest (the fast Kronecker index).

#ifndef SPLITSOLVE_PROBLEMS_HPP
#define SPLITSOLVE_PROBLEMS_HPP

#include "cholesky.hpp"
#include "complex_vector.hpp"
#include "matrix_market.hpp"
#include "sparse.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace splitsolve {

struct ProblemInstance {
    std::string name;
    index_t n = 0;
    SparseReal W1;   // SPD
    SparseReal W2;   // SPD or positive semidefinite diagonal
    SparseReal T;    // SPD
    SparseReal A_re; // W1 - W2, assembled once
    ComplexVector b;
    std::optional<ComplexVector> x_exact;
    std::map<std::string, double> params;

    const SparseReal& A_im() const { return T; }
};

inline double relative_residual(const ProblemInstance& p, const ComplexVector& x) {
    const ComplexVector ax = complex_spmv(p.A_re, p.T, x);
    return norm2(sub(p.b, ax)) / norm2(p.b);
}

namespace detail {

inline void validate_instance(const ProblemInstance& p) {
    for (const SparseReal* M : {&p.W1, &p.W2, &p.T}) {
        if (M->rows != p.n || M->cols != p.n)
            throw std::invalid_argument("problem '" + p.name + "': matrix order mismatch");
    }
    if (p.b.size() != p.n)
        throw std::invalid_argument("problem '" + p.name + "': right-hand side length mismatch");
    if (!is_spd(p.T))
        throw NonPositivePivot(-1);
    // positive-semidefinite probe for W2: diagonal nonnegativity, which covers
    // the generated families (W2 is a nonnegative multiple of the identity)
    for (index_t i = 0; i < p.n; ++i) {
        if (p.W2.at(i, i) < 0.0)
            throw std::invalid_argument("problem '" + p.name + "': W2 has a negative diagonal entry");
    }
    if (p.x_exact && relative_residual(p, *p.x_exact) > 1e-12)
        throw std::logic_error("problem '" + p.name + "': exact solution fails residual check");
}

inline ComplexVector ones_times_1pi(index_t n) {
    ComplexVector e(n);
    std::fill(e.re.begin(), e.re.end(), 1.0);
    std::fill(e.im.begin(), e.im.end(), 1.0);
    return e;
}

} // namespace detail

/// Damped time-harmonic problem: W1 = K (h^{-2}-scaled 5-point Laplacian),
/// W2 = omega^2 I, T = omega (5 omega I + 0.02 K). The right-hand side makes
/// (1+i)e the exact solution.
inline ProblemInstance example1(index_t m, double omega) {
    if (m < 1 || !(omega > 0.0)) throw std::invalid_argument("example1: need m >= 1, omega > 0");
    ProblemInstance p;
    const double h = 1.0 / static_cast<double>(m + 1);
    p.name = "example1";
    p.n = m * m;
    const SparseReal K = kron_sum(tridiag(m, -1.0, 2.0, -1.0, 1.0 / (h * h)), m);
    p.W1 = K;
    p.W2 = scaled_identity(p.n, omega * omega);
    p.T = add_scaled(5.0 * omega * omega, identity(p.n), 0.02 * omega, K);
    p.A_re = add_scaled(1.0, p.W1, -1.0, p.W2);
    p.x_exact = detail::ones_times_1pi(p.n);
    p.b = complex_spmv(p.A_re, p.T, *p.x_exact);
    p.params = {{"omega", omega}, {"mu", 0.02}, {"h", h}, {"m", static_cast<double>(m)}};
    detail::validate_instance(p);
    return p;
}

/// Complex Helmholtz problem: W1 = K (unscaled 5-point stencil),
/// W2 = sigma1 h^2 I, T = sigma2 h^2 I. The right-hand side makes (1+i)e the
/// exact solution. sigma1 = 0 gives the definite special case.
inline ProblemInstance example2(index_t m, double sigma1, double sigma2) {
    if (m < 1 || sigma1 < 0.0 || !(sigma2 > 0.0))
        throw std::invalid_argument("example2: need m >= 1, sigma1 >= 0, sigma2 > 0");
    ProblemInstance p;
    const double h = 1.0 / static_cast<double>(m + 1);
    p.name = "example2";
    p.n = m * m;
    p.W1 = kron_sum(tridiag(m, -1.0, 2.0, -1.0), m);
    p.W2 = scaled_identity(p.n, sigma1 * h * h);
    p.T = scaled_identity(p.n, sigma2 * h * h);
    p.A_re = add_scaled(1.0, p.W1, -1.0, p.W2);
    p.x_exact = detail::ones_times_1pi(p.n);
    p.b = complex_spmv(p.A_re, p.T, *p.x_exact);
    p.params = {{"sigma1", sigma1}, {"sigma2", sigma2}, {"h", h}, {"m", static_cast<double>(m)}};
    detail::validate_instance(p);
    return p;
}

/// Same matrices as example2(m, 100, 10) with the source term
/// f(x, y) = e^{x+iy}, discretized as b_{jk} = h^2 e^{x_j}(cos y_k + i sin y_k)
/// at the interior nodes. No exact solution is known.
inline ProblemInstance example3(index_t m) {
    ProblemInstance p = example2(m, 100.0, 10.0);
    p.name = "example3";
    p.x_exact.reset();
    const double h = p.params.at("h");
    for (index_t k = 0; k < m; ++k) {
        const double y = static_cast<double>(k + 1) * h;
        for (index_t j = 0; j < m; ++j) {
            const double x = static_cast<double>(j + 1) * h;
            const double w = h * h * std::exp(x);
            const std::size_t idx = static_cast<std::size_t>(k * m + j);
            p.b.re[idx] = w * std::cos(y);
            p.b.im[idx] = w * std::sin(y);
        }
    }
    detail::validate_instance(p);
    return p;
}

struct ProblemPaths {
    std::string w1, w2, t, b;
};

/// Load and validate a problem from Matrix Market files. The T factorization
/// doubles as the SPD acceptance probe; failures reject the input.
inline ProblemInstance load_problem(const ProblemPaths& paths, std::string name = "loaded") {
    ProblemInstance p;
    p.name = std::move(name);
    p.W1 = read_matrix_market(paths.w1);
    p.W2 = read_matrix_market(paths.w2);
    p.T = read_matrix_market(paths.t);
    p.b = read_vector_market(paths.b);
    p.n = p.W1.rows;
    if (p.W1.rows != p.W1.cols) throw std::invalid_argument("load_problem: W1 not square");
    detail::validate_instance(p);
    p.A_re = add_scaled(1.0, p.W1, -1.0, p.W2);
    return p;
}

/// Write W1/W2/T/b plus a key=value metadata file into a directory.
inline void save_problem(const ProblemInstance& p, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_matrix_market(dir + "/W1.mtx", p.W1, true);
    write_matrix_market(dir + "/W2.mtx", p.W2, true);
    write_matrix_market(dir + "/T.mtx", p.T, true);
    write_vector_market(dir + "/b.mtx", p.b);
    std::ofstream meta(dir + "/meta.txt");
    if (!meta) throw std::runtime_error("save_problem: cannot write metadata in " + dir);
    meta << "name=" << p.name << "\n";
    meta << "n=" << p.n << "\n";
    if (p.params.count("m")) meta << "m=" << static_cast<index_t>(p.params.at("m")) << "\n";
    for (const auto& [key, value] : p.params) {
        if (key == "m") continue;
        meta << key << "=" << detail::fmt_value(value) << "\n";
    }
}

} // namespace splitsolve

#endif // SPLITSOLVE_PROBLEMS_HPP
