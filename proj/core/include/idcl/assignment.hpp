#pragma once

#include "idcl/numerics.hpp"

#include <vector>

namespace idcl {

// Hard clustering plus the per-cluster density cores that replace centroids
// during soft assignment.
struct ClusterState {
  int k = 0;
  std::vector<int> labels;              // n cluster ids in [0, k)
  std::vector<std::vector<int>> cores;  // per-cluster core sample ids, ascending
  double lambda2 = 0.05;                // core percentile
};

// Soft assignment Q and its sharpened target P, both n x K row-stochastic.
struct AssignmentPair {
  Matrix q;
  Matrix p;
};

// The max(1, ceil(lambda2 * |C|)) members with the highest density; ties
// broken toward the lower sample index. Result sorted ascending.
std::vector<int> density_core(const std::vector<int>& cluster_members,
                              const std::vector<double>& rho, double lambda2);

// Groups samples by label and selects each cluster's density core.
ClusterState build_cluster_state(const std::vector<int>& labels, int k,
                                 const std::vector<double>& rho, double lambda2);

// Materializes per-cluster core embedding rows. Used to freeze the cores
// while the encoder (and hence z) keeps moving within an epoch.
std::vector<Matrix> extract_cores(const EmbeddedMatrix& z, const ClusterState& state);

// s_ik = sum_{j in core} 1 / (1 + ||z_i - z_j||^2), in (0, |core|].
double core_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& zi,
                       const Matrix& core_z);

// Student-t soft assignment: q_ik = s_ik / sum_k' s_ik'. Every core must be
// nonempty. Rows sum to 1; entries strictly positive.
Matrix soft_assign(const EmbeddedMatrix& z, const ClusterState& state);

// Same kernel, but queries are assigned against an externally frozen core
// snapshot instead of cores indexed into z itself.
Matrix soft_assign_against(const EmbeddedMatrix& queries,
                           const std::vector<Matrix>& cores);

// Self-training target: f_k = sum_i q_ik, p_ik = (q_ik^2 / f_k) normalized
// per row. Q must be strictly positive.
Matrix target_distribution(const Matrix& q);

// Row argmax; ties break toward the lowest cluster id.
std::vector<int> hard_labels(const Matrix& q);

}  // namespace idcl
