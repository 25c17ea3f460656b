/// @file sparse.hpp
/// @brief Compressed-row real sparse matrices and the kernels built on them.

#ifndef SPLITSOLVE_SPARSE_HPP
#define SPLITSOLVE_SPARSE_HPP

#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace splitsolve {

/// Sparse real matrix in CSR format with owned storage.
/// Within each row the column indices are strictly increasing.
struct SparseReal {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<index_t> row_ptr;  // length rows+1, nondecreasing
    std::vector<index_t> col_idx;
    std::vector<double> values;

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    double at(index_t i, index_t j) const {
        const auto first = col_idx.begin() + row_ptr[i];
        const auto last = col_idx.begin() + row_ptr[i + 1];
        const auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return 0.0;
        return values[static_cast<std::size_t>(it - col_idx.begin())];
    }
};

/// Row-major dense real matrix, used for desk-scale oracles and probes.
struct DenseReal {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<double> values;  // length rows*cols, row-major

    DenseReal() = default;
    DenseReal(index_t r, index_t c)
        : rows(r), cols(c), values(static_cast<std::size_t>(r * c), 0.0) {}

    double& at(index_t i, index_t j) { return values[static_cast<std::size_t>(i * cols + j)]; }
    double at(index_t i, index_t j) const { return values[static_cast<std::size_t>(i * cols + j)]; }
};

namespace detail {

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Build a CSR matrix from (row, col, value) triplets, merging duplicates by addition.
inline SparseReal from_triplets(index_t rows, index_t cols, std::vector<Triplet> trips) {
    std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseReal A;
    A.rows = rows;
    A.cols = cols;
    A.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
    std::size_t k = 0;
    while (k < trips.size()) {
        std::size_t j = k + 1;
        double sum = trips[k].value;
        while (j < trips.size() && trips[j].row == trips[k].row && trips[j].col == trips[k].col) {
            sum += trips[j].value;
            ++j;
        }
        A.col_idx.push_back(trips[k].col);
        A.values.push_back(sum);
        A.row_ptr[static_cast<std::size_t>(trips[k].row) + 1]++;
        k = j;
    }
    for (index_t i = 0; i < rows; ++i) A.row_ptr[static_cast<std::size_t>(i) + 1] += A.row_ptr[static_cast<std::size_t>(i)];
    return A;
}

} // namespace detail

inline SparseReal identity(index_t n) {
    SparseReal A;
    A.rows = A.cols = n;
    A.row_ptr.resize(static_cast<std::size_t>(n) + 1);
    A.col_idx.resize(static_cast<std::size_t>(n));
    A.values.assign(static_cast<std::size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) A.row_ptr[static_cast<std::size_t>(i)] = i;
    for (index_t i = 0; i < n; ++i) A.col_idx[static_cast<std::size_t>(i)] = i;
    return A;
}

inline SparseReal scaled_identity(index_t n, double s) {
    SparseReal A = identity(n);
    for (double& v : A.values) v = s;
    return A;
}

inline SparseReal diagonal(std::span<const double> d) {
    SparseReal A = identity(static_cast<index_t>(d.size()));
    std::copy(d.begin(), d.end(), A.values.begin());
    return A;
}

/// n x n matrix with all-zero pattern.
inline SparseReal zero_matrix(index_t n) {
    SparseReal A;
    A.rows = A.cols = n;
    A.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    return A;
}

/// Symmetric tridiagonal stencil scale*(sub, diag, sub) of order n.
inline SparseReal tridiag(index_t n, double sub, double diag, double sup, double scale = 1.0) {
    std::vector<detail::Triplet> t;
    t.reserve(static_cast<std::size_t>(3 * n));
    for (index_t i = 0; i < n; ++i) {
        if (i > 0) t.push_back({i, i - 1, scale * sub});
        t.push_back({i, i, scale * diag});
        if (i + 1 < n) t.push_back({i, i + 1, scale * sup});
    }
    return detail::from_triplets(n, n, std::move(t));
}

/// a*A + b*B for equally sized matrices, merging the two patterns.
inline SparseReal add_scaled(double a, const SparseReal& A, double b, const SparseReal& B) {
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("add_scaled: dimension mismatch");
    SparseReal C;
    C.rows = A.rows;
    C.cols = A.cols;
    C.row_ptr.assign(static_cast<std::size_t>(A.rows) + 1, 0);
    C.col_idx.reserve(static_cast<std::size_t>(A.nnz() + B.nnz()));
    C.values.reserve(static_cast<std::size_t>(A.nnz() + B.nnz()));
    for (index_t i = 0; i < A.rows; ++i) {
        index_t pa = A.row_ptr[static_cast<std::size_t>(i)];
        index_t pb = B.row_ptr[static_cast<std::size_t>(i)];
        const index_t ea = A.row_ptr[static_cast<std::size_t>(i) + 1];
        const index_t eb = B.row_ptr[static_cast<std::size_t>(i) + 1];
        while (pa < ea || pb < eb) {
            index_t ca = pa < ea ? A.col_idx[static_cast<std::size_t>(pa)] : C.cols;
            index_t cb = pb < eb ? B.col_idx[static_cast<std::size_t>(pb)] : C.cols;
            if (ca == cb) {
                C.col_idx.push_back(ca);
                C.values.push_back(a * A.values[static_cast<std::size_t>(pa++)] +
                                   b * B.values[static_cast<std::size_t>(pb++)]);
            } else if (ca < cb) {
                C.col_idx.push_back(ca);
                C.values.push_back(a * A.values[static_cast<std::size_t>(pa++)]);
            } else {
                C.col_idx.push_back(cb);
                C.values.push_back(b * B.values[static_cast<std::size_t>(pb++)]);
            }
        }
        C.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(C.col_idx.size());
    }
    return C;
}

inline SparseReal scale(const SparseReal& A, double s) {
    SparseReal B = A;
    for (double& v : B.values) v *= s;
    return B;
}

inline SparseReal transpose(const SparseReal& A) {
    SparseReal B;
    B.rows = A.cols;
    B.cols = A.rows;
    B.row_ptr.assign(static_cast<std::size_t>(B.rows) + 1, 0);
    B.col_idx.resize(static_cast<std::size_t>(A.nnz()));
    B.values.resize(static_cast<std::size_t>(A.nnz()));
    for (index_t k = 0; k < A.nnz(); ++k) B.row_ptr[static_cast<std::size_t>(A.col_idx[static_cast<std::size_t>(k)]) + 1]++;
    for (index_t i = 0; i < B.rows; ++i) B.row_ptr[static_cast<std::size_t>(i) + 1] += B.row_ptr[static_cast<std::size_t>(i)];
    std::vector<index_t> next(B.row_ptr.begin(), B.row_ptr.end() - 1);
    for (index_t i = 0; i < A.rows; ++i) {
        for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = A.col_idx[static_cast<std::size_t>(k)];
            const index_t p = next[static_cast<std::size_t>(j)]++;
            B.col_idx[static_cast<std::size_t>(p)] = i;
            B.values[static_cast<std::size_t>(p)] = A.values[static_cast<std::size_t>(k)];
        }
    }
    return B;
}

inline bool is_symmetric(const SparseReal& A, double tol = 0.0) {
    if (A.rows != A.cols) return false;
    const SparseReal At = transpose(A);
    if (At.col_idx != A.col_idx || At.row_ptr != A.row_ptr) return false;
    for (std::size_t k = 0; k < A.values.size(); ++k) {
        if (std::abs(A.values[k] - At.values[k]) > tol) return false;
    }
    return true;
}

/// I_m (x) V + V (x) I_m for a square m x m matrix V. The result acts on
/// vectors indexed lexicographically with the first Kronecker index fast.
inline SparseReal kron_sum(const SparseReal& V, index_t m) {
    if (V.rows != m || V.cols != m)
        throw std::invalid_argument("kron_sum: V must be m x m");
    const index_t n = m * m;
    std::vector<detail::Triplet> t;
    t.reserve(static_cast<std::size_t>(2 * m * V.nnz()));
    for (index_t block = 0; block < m; ++block) {
        for (index_t r = 0; r < m; ++r) {
            for (index_t k = V.row_ptr[static_cast<std::size_t>(r)]; k < V.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
                const index_t c = V.col_idx[static_cast<std::size_t>(k)];
                const double v = V.values[static_cast<std::size_t>(k)];
                // I (x) V: V within the block (fast index)
                t.push_back({block * m + r, block * m + c, v});
                // V (x) I: V across blocks (slow index)
                t.push_back({r * m + block, c * m + block, v});
            }
        }
    }
    return detail::from_triplets(n, n, std::move(t));
}

inline void spmv_into(const SparseReal& A, std::span<const double> x, std::span<double> y) {
    if (A.cols != static_cast<index_t>(x.size()) || A.rows != static_cast<index_t>(y.size()))
        throw std::invalid_argument("spmv: dimension mismatch");
    for (index_t i = 0; i < A.rows; ++i) {
        double sum = 0.0;
        for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            sum += A.values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(A.col_idx[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(i)] = sum;
    }
}

inline std::vector<double> spmv(const SparseReal& A, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(A.rows));
    spmv_into(A, x, y);
    return y;
}

inline DenseReal to_dense(const SparseReal& A) {
    DenseReal D(A.rows, A.cols);
    for (index_t i = 0; i < A.rows; ++i) {
        for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            D.at(i, A.col_idx[static_cast<std::size_t>(k)]) = A.values[static_cast<std::size_t>(k)];
        }
    }
    return D;
}

/// Compress a dense matrix, dropping exact zeros.
inline SparseReal from_dense(const DenseReal& D, double drop_tol = 0.0) {
    std::vector<detail::Triplet> t;
    for (index_t i = 0; i < D.rows; ++i) {
        for (index_t j = 0; j < D.cols; ++j) {
            if (std::abs(D.at(i, j)) > drop_tol) t.push_back({i, j, D.at(i, j)});
        }
    }
    return detail::from_triplets(D.rows, D.cols, std::move(t));
}

} // namespace splitsolve

#endif // SPLITSOLVE_SPARSE_HPP
