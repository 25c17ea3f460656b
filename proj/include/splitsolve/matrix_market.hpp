/// @file matrix_market.hpp
/// @brief Matrix Market I/O: coordinate real (general/symmetric) matrices and
///        dense array vectors (real or complex).

#ifndef SPLITSOLVE_MATRIX_MARKET_HPP
#define SPLITSOLVE_MATRIX_MARKET_HPP

#include "complex_vector.hpp"
#include "sparse.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace splitsolve {

struct MatrixMarketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string next_content_line(std::istream& in, const std::string& path) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') return line;
    }
    throw MatrixMarketError("unexpected end of file: " + path);
}

} // namespace detail

/// Write a sparse matrix in coordinate format, 1-based indices. When
/// `symmetric` is set only the lower triangle is stored.
inline void write_matrix_market(const std::string& path, const SparseReal& A, bool symmetric) {
    std::ofstream out(path);
    if (!out) throw MatrixMarketError("cannot open for writing: " + path);
    index_t count = 0;
    if (symmetric) {
        for (index_t i = 0; i < A.rows; ++i)
            for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
                if (A.col_idx[static_cast<std::size_t>(k)] <= i) ++count;
    } else {
        count = A.nnz();
    }
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
    out << A.rows << " " << A.cols << " " << count << "\n";
    for (index_t i = 0; i < A.rows; ++i) {
        for (index_t k = A.row_ptr[static_cast<std::size_t>(i)]; k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = A.col_idx[static_cast<std::size_t>(k)];
            if (symmetric && j > i) continue;
            out << (i + 1) << " " << (j + 1) << " " << detail::fmt_value(A.values[static_cast<std::size_t>(k)]) << "\n";
        }
    }
}

inline SparseReal read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixMarketError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("%%MatrixMarket", 0) != 0)
        throw MatrixMarketError("missing MatrixMarket banner: " + path);
    std::istringstream hs(header);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || field != "real")
        throw MatrixMarketError("unsupported MatrixMarket type (want coordinate real): " + path);
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw MatrixMarketError("unsupported symmetry '" + symmetry + "': " + path);

    std::istringstream sizes(detail::next_content_line(in, path));
    index_t rows = 0, cols = 0, count = 0;
    if (!(sizes >> rows >> cols >> count) || rows < 0 || cols < 0 || count < 0)
        throw MatrixMarketError("bad size line: " + path);

    std::vector<detail::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(symmetric ? 2 * count : count));
    for (index_t k = 0; k < count; ++k) {
        std::istringstream ls(detail::next_content_line(in, path));
        index_t i = 0, j = 0;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) throw MatrixMarketError("bad entry line: " + path);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw MatrixMarketError("index out of range: " + path);
        trips.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) trips.push_back({j - 1, i - 1, v});
    }
    return detail::from_triplets(rows, cols, std::move(trips));
}

/// Write a complex vector as a dense array, one "re im" pair per line.
inline void write_vector_market(const std::string& path, const ComplexVector& b) {
    std::ofstream out(path);
    if (!out) throw MatrixMarketError("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix array complex general\n";
    out << b.size() << " 1\n";
    for (index_t i = 0; i < b.size(); ++i) {
        out << detail::fmt_value(b.re[static_cast<std::size_t>(i)]) << " "
            << detail::fmt_value(b.im[static_cast<std::size_t>(i)]) << "\n";
    }
}

inline ComplexVector read_vector_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixMarketError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("%%MatrixMarket", 0) != 0)
        throw MatrixMarketError("missing MatrixMarket banner: " + path);
    std::istringstream hs(header);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "array" || (field != "complex" && field != "real"))
        throw MatrixMarketError("unsupported MatrixMarket type (want array real/complex): " + path);

    std::istringstream sizes(detail::next_content_line(in, path));
    index_t rows = 0, cols = 0;
    if (!(sizes >> rows >> cols) || cols != 1)
        throw MatrixMarketError("vector files must have one column: " + path);
    ComplexVector b(rows);
    for (index_t i = 0; i < rows; ++i) {
        std::istringstream ls(detail::next_content_line(in, path));
        double re = 0.0, im = 0.0;
        if (field == "complex") {
            if (!(ls >> re >> im)) throw MatrixMarketError("bad entry line: " + path);
        } else {
            if (!(ls >> re)) throw MatrixMarketError("bad entry line: " + path);
        }
        b.re[static_cast<std::size_t>(i)] = re;
        b.im[static_cast<std::size_t>(i)] = im;
    }
    return b;
}

} // namespace splitsolve

#endif // SPLITSOLVE_MATRIX_MARKET_HPP
