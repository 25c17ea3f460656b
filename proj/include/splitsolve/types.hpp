#ifndef SPLITSOLVE_TYPES_HPP
#define SPLITSOLVE_TYPES_HPP

#include <complex>
#include <cstdint>

namespace splitsolve {

using index_t = std::int64_t;
using cdouble = std::complex<double>;

} // namespace splitsolve

#endif // SPLITSOLVE_TYPES_HPP
