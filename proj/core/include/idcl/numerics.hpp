#pragma once

#include <Eigen/Core>

#include <vector>

namespace idcl {

// Row-major throughout: the sample index is always the row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// n x d latent representations Z, one embedded point per row.
using EmbeddedMatrix = Matrix;

// Throws std::invalid_argument naming the first offending row if any entry
// is NaN/Inf, or if the matrix has no rows or no columns.
void validate_embedding(const EmbeddedMatrix& z, const char* what = "matrix");

// Exact symmetric n x n matrix of squared Euclidean distances between rows.
// Zero diagonal, symmetric by construction, bitwise deterministic.
Matrix pairwise_sq_dists(const EmbeddedMatrix& z);

// Value at the 1-based ascending rank ceil(fraction * n), clamped to >= 1.
// fraction must lie in (0, 1]; values must be nonempty.
double rank_select(std::vector<double> values, double fraction);

// out_i = (v_i - min) / (max - min). All ones when max == min, so a
// degenerate score vector selects everything downstream.
std::vector<double> max_min_normalize(const std::vector<double>& values);

}  // namespace idcl
