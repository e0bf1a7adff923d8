#pragma once

#include <cstddef>

#include "xlem/numkit/dense.hpp"

namespace xlem::numkit {

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns the top_r eigenpairs, eigenvalues nonincreasing, eigenvectors
// orthonormal with each column's largest-magnitude entry positive.
struct EigResult {
    std::vector<double> values;  // size top_r
    DenseMatrix vectors;         // k x top_r
};
EigResult sym_eig(const DenseMatrix &A, std::size_t top_r);

}  // namespace xlem::numkit
