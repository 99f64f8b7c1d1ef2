#pragma once

// Dense symmetric eigensolvers on operator blocks.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ids/operator.hpp"

namespace ids {

struct BlockEigensystem {
    std::vector<std::size_t> sites;  // operator indices of the block
    Eigen::VectorXd values;          // ascending
    Eigen::MatrixXd vectors;         // columns, rows follow `sites`
};

// Eigenvalues of op with multiplicity, ascending. The operator is split into
// the connected components of its nonzero pattern first; each component is
// reduced to tridiagonal form by Householder reflections and diagonalized by
// implicit-shift QL/QR (LAPACK). SizeError when a component exceeds kDenseThreshold,
// NumericalError (naming a dump file) if the iteration fails to converge.
std::vector<double> eigenvalues(const SymmetricOperator& op);

std::vector<BlockEigensystem> eigensystem(const SymmetricOperator& op);

// "lapack" when the linked LAPACK passed its start-up self-test, else "eigen".
std::string eigensolver_backend();

// max_k ||H v_k - lambda_k v_k|| / max(||H||_1, 1) over all eigenpairs.
double max_relative_residual(const SymmetricOperator& op, const std::vector<BlockEigensystem>& system);

}  // namespace ids
