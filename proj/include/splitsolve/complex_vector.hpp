/// @file complex_vector.hpp
/// @brief Split-storage complex vectors and the complex matrix-vector kernel.

#ifndef SPLITSOLVE_COMPLEX_VECTOR_HPP
#define SPLITSOLVE_COMPLEX_VECTOR_HPP

#include "sparse.hpp"
#include "types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace splitsolve {

/// Complex vector stored as two real arrays. The split layout is the block
/// layout (all real parts, then all imaginary parts) used by every inner
/// solve, so no repacking happens anywhere.
struct ComplexVector {
    std::vector<double> re;
    std::vector<double> im;

    ComplexVector() = default;
    explicit ComplexVector(index_t n)
        : re(static_cast<std::size_t>(n), 0.0), im(static_cast<std::size_t>(n), 0.0) {}

    index_t size() const { return static_cast<index_t>(re.size()); }

    cdouble operator[](index_t i) const {
        return {re[static_cast<std::size_t>(i)], im[static_cast<std::size_t>(i)]};
    }

    void set(index_t i, cdouble v) {
        re[static_cast<std::size_t>(i)] = v.real();
        im[static_cast<std::size_t>(i)] = v.imag();
    }

    void fill_zero() {
        std::fill(re.begin(), re.end(), 0.0);
        std::fill(im.begin(), im.end(), 0.0);
    }
};

inline void check_same_size(const ComplexVector& x, const ComplexVector& y, const char* what) {
    if (x.size() != y.size()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

/// Conjugate-symmetric inner product sum conj(x_j) y_j.
inline cdouble dot_h(const ComplexVector& x, const ComplexVector& y) {
    check_same_size(x, y, "dot_h");
    double rr = 0.0, ri = 0.0;
    for (std::size_t j = 0; j < x.re.size(); ++j) {
        // conj(a+bi)(c+di) = (ac+bd) + (ad-bc)i
        rr += x.re[j] * y.re[j] + x.im[j] * y.im[j];
        ri += x.re[j] * y.im[j] - x.im[j] * y.re[j];
    }
    return {rr, ri};
}

inline double norm2(const ComplexVector& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.re.size(); ++j) s += x.re[j] * x.re[j] + x.im[j] * x.im[j];
    return std::sqrt(s);
}

/// y += a*x
inline void axpy(cdouble a, const ComplexVector& x, ComplexVector& y) {
    check_same_size(x, y, "axpy");
    const double ar = a.real(), ai = a.imag();
    for (std::size_t j = 0; j < x.re.size(); ++j) {
        y.re[j] += ar * x.re[j] - ai * x.im[j];
        y.im[j] += ar * x.im[j] + ai * x.re[j];
    }
}

inline void scal(cdouble a, ComplexVector& x) {
    const double ar = a.real(), ai = a.imag();
    for (std::size_t j = 0; j < x.re.size(); ++j) {
        const double r = x.re[j], i = x.im[j];
        x.re[j] = ar * r - ai * i;
        x.im[j] = ar * i + ai * r;
    }
}

inline ComplexVector conj(const ComplexVector& x) {
    ComplexVector y = x;
    for (double& v : y.im) v = -v;
    return y;
}

inline ComplexVector sub(const ComplexVector& x, const ComplexVector& y) {
    check_same_size(x, y, "sub");
    ComplexVector z = x;
    for (std::size_t j = 0; j < z.re.size(); ++j) {
        z.re[j] -= y.re[j];
        z.im[j] -= y.im[j];
    }
    return z;
}

inline ComplexVector add(const ComplexVector& x, const ComplexVector& y) {
    check_same_size(x, y, "add");
    ComplexVector z = x;
    for (std::size_t j = 0; j < z.re.size(); ++j) {
        z.re[j] += y.re[j];
        z.im[j] += y.im[j];
    }
    return z;
}

/// y = (re_mat + i*im_mat)(x.re + i*x.im). A zero-pattern matrix stands in
/// for a vanishing real or imaginary part. t is scratch of length rows.
inline void complex_spmv_into(const SparseReal& re_mat, const SparseReal& im_mat,
                              const ComplexVector& x, ComplexVector& y,
                              std::vector<double>& t) {
    if (re_mat.rows != im_mat.rows || re_mat.cols != im_mat.cols ||
        re_mat.cols != x.size())
        throw std::invalid_argument("complex_spmv: dimension mismatch");
    y.re.resize(static_cast<std::size_t>(re_mat.rows));
    y.im.resize(static_cast<std::size_t>(re_mat.rows));
    t.resize(static_cast<std::size_t>(re_mat.rows));
    spmv_into(re_mat, x.re, y.re);   // Re = R*xr - S*xi
    spmv_into(im_mat, x.im, t);
    for (std::size_t j = 0; j < y.re.size(); ++j) y.re[j] -= t[j];
    spmv_into(re_mat, x.im, y.im);   // Im = R*xi + S*xr
    spmv_into(im_mat, x.re, t);
    for (std::size_t j = 0; j < y.im.size(); ++j) y.im[j] += t[j];
}

inline ComplexVector complex_spmv(const SparseReal& re_mat, const SparseReal& im_mat,
                                  const ComplexVector& x) {
    ComplexVector y(re_mat.rows);
    std::vector<double> t;
    complex_spmv_into(re_mat, im_mat, x, y, t);
    return y;
}

} // namespace splitsolve

#endif // SPLITSOLVE_COMPLEX_VECTOR_HPP
