#pragma once

#include "idcl/numerics.hpp"

#include <vector>

namespace idcl {

// Clustering evaluation summary. confusion(r, c) counts samples with true
// class r and predicted cluster c, padded square; mapping[c] is the true
// class matched to predicted cluster c by the optimal assignment.
struct EvalReport {
  double acc = 0.0;
  double nmi = 0.0;
  std::vector<int> mapping;
  std::vector<std::vector<long>> confusion;
};

// Exact minimum-cost assignment on a square cost matrix, O(K^3) via the
// potentials formulation. Returns assign[row] = column. Rectangular inputs
// must be zero-padded square by the caller; non-finite costs are rejected.
std::vector<int> hungarian(const Matrix& cost);

// max over cluster-to-class mappings of the matched fraction, solved with
// hungarian on the negated confusion counts.
double clustering_accuracy(const std::vector<int>& true_labels,
                           const std::vector<int>& pred_labels);

// I(l; c) / max(H(l), H(c)), natural-log entropies. Equals 1 when both
// partitions are the same single cluster; 0 when either entropy is zero and
// the partitions differ.
double nmi(const std::vector<int>& true_labels, const std::vector<int>& pred_labels);

EvalReport evaluate_labels(const std::vector<int>& true_labels,
                           const std::vector<int>& pred_labels);

}  // namespace idcl
