#pragma once

#include <vector>

#include "emspec/matrix.hpp"

namespace emspec {

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // column k pairs with eigenvalues[k]; orthonormal
};

// Full eigendecomposition of a real symmetric matrix: Householder reduction
// to tridiagonal form, then implicit-shift QL. Deterministic — no randomized
// pivoting — so repeated runs and different worker counts agree bitwise.
// Input must be symmetric to 1e-12 (checked). Throws NumericalError if any
// eigenvalue fails to settle within the iteration cap (30), with the residual
// in the message.
EigenDecomposition eig_symmetric(const Matrix& a);

// Eigenvalues only; same algorithm and results, transform accumulation skipped.
std::vector<double> eig_symmetric_values(const Matrix& a);

}  // namespace emspec
