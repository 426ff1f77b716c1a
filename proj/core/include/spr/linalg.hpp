#pragma once

#include <vector>

#include <Eigen/Core>

#include "spr/rng.hpp"

namespace spr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Rank and span decisions are relative: a singular value counts as nonzero
// when it exceeds kRankTol times the largest singular value.
inline constexpr double kRankTol = 1e-9;

// Gram-Schmidt with a reorthogonalization pass, keeping input order: vector k
// of the result spans the same flag as vectors 0..k of the input. Throws
// DependencyError if some input vector is within tol (relative to its norm)
// of the span of its predecessors.
std::vector<Vector> orthonormalize(const std::vector<Vector>& vs, double tol = kRankTol);

// Number of singular values above tol * sigma_max. Zero matrices have rank 0.
int numeric_rank(const Matrix& m, double tol = kRankTol);

// Orthonormal basis of the right null space {x : m x = 0}, as columns.
// numeric_rank(m, tol) + cols(null_space(m, tol)) == cols(m).
Matrix null_space(const Matrix& m, double tol = kRankTol);

// Uniform unit vector in the orthogonal complement of span(vs) inside R^dim.
// The inputs need not be orthonormal but must be linearly independent; the
// complement must be nonzero (|vs| < dim).
Vector random_unit_in_complement(const std::vector<Vector>& vs, int dim, RngState& rng);

// Largest singular value (0 for empty matrices).
double operator_norm(const Matrix& m);

}  // namespace spr
