/// @file cholesky.hpp
/// @brief Sparse Cholesky with a fill-reducing ordering.
///
/// factor() permutes with an approximate-minimum-degree ordering, builds the
/// elimination tree, and runs an up-looking numeric factorization storing L
/// by columns. Matrices below a small cutoff take a dense path. A
/// nonpositive pivot aborts with NonPositivePivot, which doubles as the SPD
/// probe used by the rest of the library.

#ifndef SPLITSOLVE_CHOLESKY_HPP
#define SPLITSOLVE_CHOLESKY_HPP

#include "sparse.hpp"

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitsolve {

struct NonPositivePivot : std::runtime_error {
    index_t row;
    explicit NonPositivePivot(index_t r)
        : std::runtime_error("Cholesky pivot <= 0 at row " + std::to_string(r) +
                             " (matrix not positive definite)"),
          row(r) {}
};

/// Approximate minimum degree ordering on the symmetric pattern of A.
/// Quotient-graph model: eliminated pivots become elements, adjacent elements
/// are absorbed, and degrees are the usual one-pass approximation.
/// Returns perm with perm[k] = original index eliminated k-th.
inline std::vector<index_t> fill_reducing_order(const SparseReal& A) {
    const index_t n = A.rows;
    std::vector<std::vector<index_t>> adj_var(static_cast<std::size_t>(n));
    std::vector<std::vector<index_t>> adj_elem(static_cast<std::size_t>(n));
    std::vector<std::vector<index_t>> elem_nodes(static_cast<std::size_t>(n));

    // symmetrized adjacency, diagonal dropped
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = A.col_idx[static_cast<std::size_t>(k)];
            if (j == i) continue;
            adj_var[static_cast<std::size_t>(i)].push_back(j);
            adj_var[static_cast<std::size_t>(j)].push_back(i);
        }
    }
    for (auto& a : adj_var) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    enum class State : unsigned char { Alive, Eliminated };
    std::vector<State> state(static_cast<std::size_t>(n), State::Alive);
    std::vector<bool> elem_alive(static_cast<std::size_t>(n), false);

    // doubly linked degree buckets
    std::vector<index_t> degree(static_cast<std::size_t>(n));
    std::vector<index_t> head(static_cast<std::size_t>(n) + 1, -1);
    std::vector<index_t> nxt(static_cast<std::size_t>(n), -1), prv(static_cast<std::size_t>(n), -1);
    auto bucket_insert = [&](index_t i, index_t d) {
        degree[static_cast<std::size_t>(i)] = d;
        nxt[static_cast<std::size_t>(i)] = head[static_cast<std::size_t>(d)];
        prv[static_cast<std::size_t>(i)] = -1;
        if (head[static_cast<std::size_t>(d)] != -1) prv[static_cast<std::size_t>(head[static_cast<std::size_t>(d)])] = i;
        head[static_cast<std::size_t>(d)] = i;
    };
    auto bucket_remove = [&](index_t i) {
        const index_t d = degree[static_cast<std::size_t>(i)];
        if (prv[static_cast<std::size_t>(i)] != -1)
            nxt[static_cast<std::size_t>(prv[static_cast<std::size_t>(i)])] = nxt[static_cast<std::size_t>(i)];
        else
            head[static_cast<std::size_t>(d)] = nxt[static_cast<std::size_t>(i)];
        if (nxt[static_cast<std::size_t>(i)] != -1)
            prv[static_cast<std::size_t>(nxt[static_cast<std::size_t>(i)])] = prv[static_cast<std::size_t>(i)];
    };
    for (index_t i = 0; i < n; ++i)
        bucket_insert(i, std::min<index_t>(static_cast<index_t>(adj_var[static_cast<std::size_t>(i)].size()), n - 1));

    std::vector<index_t> mark(static_cast<std::size_t>(n), 0);
    std::vector<index_t> estamp(static_cast<std::size_t>(n), 0);
    std::vector<index_t> w(static_cast<std::size_t>(n), 0);
    index_t stamp = 0;

    std::vector<index_t> perm;
    perm.reserve(static_cast<std::size_t>(n));
    index_t mindeg = 0;
    std::vector<index_t> lp;

    for (index_t k = 0; k < n; ++k) {
        while (head[static_cast<std::size_t>(mindeg)] == -1) ++mindeg;
        const index_t p = head[static_cast<std::size_t>(mindeg)];
        bucket_remove(p);
        perm.push_back(p);
        state[static_cast<std::size_t>(p)] = State::Eliminated;

        // Lp = alive neighbors of p, direct or through p's elements
        ++stamp;
        mark[static_cast<std::size_t>(p)] = stamp;
        lp.clear();
        for (index_t v : adj_var[static_cast<std::size_t>(p)]) {
            if (state[static_cast<std::size_t>(v)] == State::Alive && mark[static_cast<std::size_t>(v)] != stamp) {
                mark[static_cast<std::size_t>(v)] = stamp;
                lp.push_back(v);
            }
        }
        for (index_t e : adj_elem[static_cast<std::size_t>(p)]) {
            if (!elem_alive[static_cast<std::size_t>(e)]) continue;
            for (index_t v : elem_nodes[static_cast<std::size_t>(e)]) {
                if (state[static_cast<std::size_t>(v)] == State::Alive && mark[static_cast<std::size_t>(v)] != stamp) {
                    mark[static_cast<std::size_t>(v)] = stamp;
                    lp.push_back(v);
                }
            }
            elem_alive[static_cast<std::size_t>(e)] = false;  // absorbed into p
            elem_nodes[static_cast<std::size_t>(e)].clear();
            elem_nodes[static_cast<std::size_t>(e)].shrink_to_fit();
        }
        adj_var[static_cast<std::size_t>(p)].clear();
        adj_var[static_cast<std::size_t>(p)].shrink_to_fit();
        adj_elem[static_cast<std::size_t>(p)].clear();
        adj_elem[static_cast<std::size_t>(p)].shrink_to_fit();
        if (lp.empty()) continue;
        elem_nodes[static_cast<std::size_t>(p)] = lp;
        elem_alive[static_cast<std::size_t>(p)] = true;

        // prune member lists: variable edges inside Lp are now covered by element p
        for (index_t i : lp) {
            auto& av = adj_var[static_cast<std::size_t>(i)];
            std::size_t out = 0;
            for (index_t v : av) {
                if (state[static_cast<std::size_t>(v)] == State::Alive && mark[static_cast<std::size_t>(v)] != stamp)
                    av[out++] = v;
            }
            av.resize(out);
            auto& ae = adj_elem[static_cast<std::size_t>(i)];
            out = 0;
            for (index_t e : ae) {
                if (elem_alive[static_cast<std::size_t>(e)]) ae[out++] = e;
            }
            ae.resize(out);
            ae.push_back(p);
        }

        // |Le \ Lp| for every element touching Lp, in one pass
        for (index_t i : lp) {
            for (index_t e : adj_elem[static_cast<std::size_t>(i)]) {
                if (e == p) continue;
                if (estamp[static_cast<std::size_t>(e)] != stamp) {
                    estamp[static_cast<std::size_t>(e)] = stamp;
                    w[static_cast<std::size_t>(e)] = static_cast<index_t>(elem_nodes[static_cast<std::size_t>(e)].size());
                }
                --w[static_cast<std::size_t>(e)];
            }
        }

        const index_t lp_size = static_cast<index_t>(lp.size());
        for (index_t i : lp) {
            index_t d = static_cast<index_t>(adj_var[static_cast<std::size_t>(i)].size()) + (lp_size - 1);
            auto& ae = adj_elem[static_cast<std::size_t>(i)];
            std::size_t out = 0;
            for (index_t e : ae) {
                if (e == p) {
                    ae[out++] = e;
                    continue;
                }
                if (w[static_cast<std::size_t>(e)] == 0 && estamp[static_cast<std::size_t>(e)] == stamp) {
                    // element entirely inside Lp: absorb
                    elem_alive[static_cast<std::size_t>(e)] = false;
                    elem_nodes[static_cast<std::size_t>(e)].clear();
                    continue;
                }
                if (!elem_alive[static_cast<std::size_t>(e)]) continue;
                d += w[static_cast<std::size_t>(e)];
                ae[out++] = e;
            }
            ae.resize(out);
            d = std::min<index_t>(d, n - 1);
            bucket_remove(i);
            bucket_insert(i, d);
            if (d < mindeg) mindeg = d;
        }
    }
    return perm;
}

namespace detail {

/// Elimination tree of the permuted matrix (CSR, full symmetric storage).
inline std::vector<index_t> etree(const SparseReal& A) {
    const index_t n = A.rows;
    std::vector<index_t> parent(static_cast<std::size_t>(n), -1);
    std::vector<index_t> ancestor(static_cast<std::size_t>(n), -1);
    for (index_t k = 0; k < n; ++k) {
        for (index_t p = A.row_ptr[static_cast<std::size_t>(k)]; p < A.row_ptr[static_cast<std::size_t>(k) + 1]; ++p) {
            index_t i = A.col_idx[static_cast<std::size_t>(p)];
            while (i != -1 && i < k) {
                const index_t next = ancestor[static_cast<std::size_t>(i)];
                ancestor[static_cast<std::size_t>(i)] = k;
                if (next == -1) parent[static_cast<std::size_t>(i)] = k;
                i = next;
            }
        }
    }
    return parent;
}

/// Nonzero pattern of L(k, :) in topological order; returns the stack top.
/// s has length n; visited flags reset before returning.
inline index_t ereach(const SparseReal& A, index_t k, const std::vector<index_t>& parent,
                      std::vector<index_t>& s, std::vector<bool>& visited) {
    index_t top = A.rows;
    visited[static_cast<std::size_t>(k)] = true;
    for (index_t p = A.row_ptr[static_cast<std::size_t>(k)]; p < A.row_ptr[static_cast<std::size_t>(k) + 1]; ++p) {
        index_t i = A.col_idx[static_cast<std::size_t>(p)];
        if (i >= k) continue;
        index_t len = 0;
        for (; !visited[static_cast<std::size_t>(i)]; i = parent[static_cast<std::size_t>(i)]) {
            s[static_cast<std::size_t>(len++)] = i;
            visited[static_cast<std::size_t>(i)] = true;
        }
        while (len > 0) s[static_cast<std::size_t>(--top)] = s[static_cast<std::size_t>(--len)];
    }
    return top;
}

inline SparseReal permute_symmetric(const SparseReal& A, const std::vector<index_t>& perm) {
    const index_t n = A.rows;
    std::vector<index_t> pinv(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) pinv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(A.nnz()));
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            t.push_back({pinv[static_cast<std::size_t>(i)],
                         pinv[static_cast<std::size_t>(A.col_idx[static_cast<std::size_t>(k)])],
                         A.values[static_cast<std::size_t>(k)]});
        }
    }
    return from_triplets(n, n, std::move(t));
}

} // namespace detail

/// nnz(L) of the Cholesky factor of P*A*P^T under the given ordering
/// (symbolic only, no numeric work).
inline index_t symbolic_fill(const SparseReal& A, const std::vector<index_t>& perm) {
    const SparseReal Ap = detail::permute_symmetric(A, perm);
    const std::vector<index_t> parent = detail::etree(Ap);
    const index_t n = Ap.rows;
    std::vector<index_t> s(static_cast<std::size_t>(n));
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    index_t nnz = 0;
    for (index_t k = 0; k < n; ++k) {
        const index_t top = detail::ereach(Ap, k, parent, s, visited);
        nnz += (n - top) + 1;  // row pattern plus diagonal
        visited[static_cast<std::size_t>(k)] = false;
        for (index_t p = top; p < n; ++p) visited[static_cast<std::size_t>(s[static_cast<std::size_t>(p)])] = false;
    }
    return nnz;
}

/// Cholesky factorization P*A*P^T = L*L^T. L is stored by columns with the
/// diagonal first in each column.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    index_t order() const { return n_; }
    const std::vector<index_t>& perm() const { return perm_; }

    /// L as a CSR lower-triangular matrix (for inspection and tests).
    SparseReal lower() const {
        SparseReal upper;  // CSC of L read as CSR gives L^T
        upper.rows = upper.cols = n_;
        upper.row_ptr = col_ptr_;
        upper.col_idx = row_idx_;
        upper.values = values_;
        return transpose(upper);
    }

    void solve_into(std::span<const double> rhs, std::span<double> out,
                    std::vector<double>& work) const {
        if (static_cast<index_t>(rhs.size()) != n_ || static_cast<index_t>(out.size()) != n_)
            throw std::invalid_argument("CholeskyFactor::solve: dimension mismatch");
        work.resize(static_cast<std::size_t>(n_));
        for (index_t i = 0; i < n_; ++i)
            work[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
        // forward: L z = P rhs
        for (index_t j = 0; j < n_; ++j) {
            const index_t start = col_ptr_[static_cast<std::size_t>(j)];
            const double zj = work[static_cast<std::size_t>(j)] / values_[static_cast<std::size_t>(start)];
            work[static_cast<std::size_t>(j)] = zj;
            for (index_t p = start + 1; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
                work[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)])] -= values_[static_cast<std::size_t>(p)] * zj;
        }
        // backward: L^T y = z
        for (index_t j = n_ - 1; j >= 0; --j) {
            const index_t start = col_ptr_[static_cast<std::size_t>(j)];
            double s = work[static_cast<std::size_t>(j)];
            for (index_t p = start + 1; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
                s -= values_[static_cast<std::size_t>(p)] * work[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)])];
            work[static_cast<std::size_t>(j)] = s / values_[static_cast<std::size_t>(start)];
        }
        for (index_t i = 0; i < n_; ++i)
            out[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = work[static_cast<std::size_t>(i)];
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> out(static_cast<std::size_t>(n_));
        std::vector<double> work;
        solve_into(rhs, out, work);
        return out;
    }

    static CholeskyFactor build(const SparseReal& A, std::vector<index_t> perm);

private:
    index_t n_ = 0;
    std::vector<index_t> perm_;
    std::vector<index_t> col_ptr_, row_idx_;
    std::vector<double> values_;
};

inline CholeskyFactor CholeskyFactor::build(const SparseReal& A, std::vector<index_t> perm) {
    if (A.rows != A.cols) throw std::invalid_argument("factor: matrix must be square");
    CholeskyFactor F;
    F.n_ = A.rows;
    F.perm_ = std::move(perm);
    const index_t n = F.n_;
    const SparseReal Ap = detail::permute_symmetric(A, F.perm_);

    constexpr index_t kDenseCutoff = 64;
    if (n < kDenseCutoff) {
        // dense path, full lower pattern
        DenseReal D = to_dense(Ap);
        for (index_t j = 0; j < n; ++j) {
            double d = D.at(j, j);
            for (index_t t = 0; t < j; ++t) d -= D.at(j, t) * D.at(j, t);
            if (!(d > 0.0)) throw NonPositivePivot(F.perm_[static_cast<std::size_t>(j)]);
            const double ljj = std::sqrt(d);
            D.at(j, j) = ljj;
            for (index_t i = j + 1; i < n; ++i) {
                double s = D.at(i, j);
                for (index_t t = 0; t < j; ++t) s -= D.at(i, t) * D.at(j, t);
                D.at(i, j) = s / ljj;
            }
        }
        F.col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (index_t j = 0; j < n; ++j)
            F.col_ptr_[static_cast<std::size_t>(j) + 1] = F.col_ptr_[static_cast<std::size_t>(j)] + (n - j);
        F.row_idx_.resize(static_cast<std::size_t>(F.col_ptr_[static_cast<std::size_t>(n)]));
        F.values_.resize(F.row_idx_.size());
        for (index_t j = 0; j < n; ++j) {
            index_t p = F.col_ptr_[static_cast<std::size_t>(j)];
            for (index_t i = j; i < n; ++i, ++p) {
                F.row_idx_[static_cast<std::size_t>(p)] = i;
                F.values_[static_cast<std::size_t>(p)] = D.at(i, j);
            }
        }
        return F;
    }

    const std::vector<index_t> parent = detail::etree(Ap);
    std::vector<index_t> s(static_cast<std::size_t>(n));
    std::vector<bool> visited(static_cast<std::size_t>(n), false);

    // symbolic pass: column counts
    std::vector<index_t> colcount(static_cast<std::size_t>(n), 1);
    for (index_t k = 0; k < n; ++k) {
        const index_t top = detail::ereach(Ap, k, parent, s, visited);
        for (index_t p = top; p < n; ++p) ++colcount[static_cast<std::size_t>(s[static_cast<std::size_t>(p)])];
        visited[static_cast<std::size_t>(k)] = false;
        for (index_t p = top; p < n; ++p) visited[static_cast<std::size_t>(s[static_cast<std::size_t>(p)])] = false;
    }
    F.col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (index_t j = 0; j < n; ++j)
        F.col_ptr_[static_cast<std::size_t>(j) + 1] = F.col_ptr_[static_cast<std::size_t>(j)] + colcount[static_cast<std::size_t>(j)];
    F.row_idx_.resize(static_cast<std::size_t>(F.col_ptr_[static_cast<std::size_t>(n)]));
    F.values_.resize(F.row_idx_.size());

    // numeric up-looking pass
    std::vector<index_t> fill_next(F.col_ptr_.begin(), F.col_ptr_.end() - 1);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (index_t k = 0; k < n; ++k) {
        const index_t top = detail::ereach(Ap, k, parent, s, visited);
        double d = 0.0;
        for (index_t p = Ap.row_ptr[static_cast<std::size_t>(k)]; p < Ap.row_ptr[static_cast<std::size_t>(k) + 1]; ++p) {
            const index_t j = Ap.col_idx[static_cast<std::size_t>(p)];
            if (j < k)
                x[static_cast<std::size_t>(j)] = Ap.values[static_cast<std::size_t>(p)];
            else if (j == k)
                d = Ap.values[static_cast<std::size_t>(p)];
        }
        for (index_t t = top; t < n; ++t) {
            const index_t j = s[static_cast<std::size_t>(t)];
            const index_t start = F.col_ptr_[static_cast<std::size_t>(j)];
            const double lkj = x[static_cast<std::size_t>(j)] / F.values_[static_cast<std::size_t>(start)];
            x[static_cast<std::size_t>(j)] = 0.0;
            for (index_t p = start + 1; p < fill_next[static_cast<std::size_t>(j)]; ++p)
                x[static_cast<std::size_t>(F.row_idx_[static_cast<std::size_t>(p)])] -= F.values_[static_cast<std::size_t>(p)] * lkj;
            d -= lkj * lkj;
            const index_t ins = fill_next[static_cast<std::size_t>(j)]++;
            F.row_idx_[static_cast<std::size_t>(ins)] = k;
            F.values_[static_cast<std::size_t>(ins)] = lkj;
        }
        visited[static_cast<std::size_t>(k)] = false;
        for (index_t p = top; p < n; ++p) visited[static_cast<std::size_t>(s[static_cast<std::size_t>(p)])] = false;
        if (!(d > 0.0)) throw NonPositivePivot(F.perm_[static_cast<std::size_t>(k)]);
        const index_t ins = fill_next[static_cast<std::size_t>(k)]++;
        F.row_idx_[static_cast<std::size_t>(ins)] = k;
        F.values_[static_cast<std::size_t>(ins)] = std::sqrt(d);
    }
    return F;
}

inline CholeskyFactor factor(const SparseReal& A) {
    return CholeskyFactor::build(A, fill_reducing_order(A));
}

inline CholeskyFactor factor(const SparseReal& A, std::vector<index_t> perm) {
    return CholeskyFactor::build(A, std::move(perm));
}

inline std::vector<double> solve(const CholeskyFactor& F, std::span<const double> rhs) {
    return F.solve(rhs);
}

/// SPD probe: true when the Cholesky factorization succeeds.
inline bool is_spd(const SparseReal& A) {
    if (A.rows != A.cols || !is_symmetric(A, 0.0)) return false;
    try {
        (void)factor(A);
        return true;
    } catch (const NonPositivePivot&) {
        return false;
    }
}

} // namespace splitsolve

#endif // SPLITSOLVE_CHOLESKY_HPP
