#ifndef SPLITSOLVE_SPLITSOLVE_HPP
#define SPLITSOLVE_SPLITSOLVE_HPP

#include "chebyshev.hpp"
#include "cholesky.hpp"
#include "complex_vector.hpp"
#include "gmres.hpp"
#include "harness.hpp"
#include "matrix_market.hpp"
#include "presb.hpp"
#include "problems.hpp"
#include "report.hpp"
#include "sparse.hpp"
#include "spectral.hpp"
#include "splittings.hpp"
#include "types.hpp"

#endif // SPLITSOLVE_SPLITSOLVE_HPP
