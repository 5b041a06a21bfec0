#ifndef SUMSCALE_ORACLE_HPP
#define SUMSCALE_ORACLE_HPP

#include "sumscale/types.hpp"

#include <vector>

namespace sumscale {

// Reference eigensolver for checking optimizer output. Shares no code with
// the solvers module.

struct EigenDecomposition {
    std::vector<double> values;   // ascending
    std::vector<Vector> vectors;  // vectors[k] pairs with values[k], unit length
    int sweeps = 0;
};

/// Cyclic-by-row Jacobi rotations until the off-diagonal Frobenius norm is
/// below `tolerance` (relative to the matrix norm) or `max_sweeps` is hit,
/// in which case NonConvergence is thrown.
EigenDecomposition jacobi_eigen(const SymmetricMatrix& a, double tolerance = 1e-14, int max_sweeps = 100);

/// Inf-norm distance between the normalized, sign-aligned x and v.
double eigvec_error(const Vector& x, const Vector& v);

}  // namespace sumscale

#endif  // SUMSCALE_ORACLE_HPP
