#pragma once

#include "idcl/assignment.hpp"
#include "idcl/numerics.hpp"

#include <vector>

namespace idcl {

// total = l_rec + alpha * l_clu. The reconstruction term is a per-sample
// mean, the KL term an unnormalized double sum; the two conventions are kept
// as-is so alpha = 0.1 retains its published meaning.
struct LossBreakdown {
  double l_rec = 0.0;
  double l_clu = 0.0;
  double alpha = 0.0;
  double total = 0.0;
};

// Per-sample kernel sums d_ik and their row totals a_i = sum_k d_ik, so that
// q_ik = d_ik / a_i.
struct CluGradIntermediates {
  Matrix d;  // n x K
  Vector a;  // n
};

// KL(P || Q) = sum_i sum_k p_ik log(p_ik / q_ik). Zero p entries contribute
// zero; a zero q under positive p is rejected (infinite divergence).
double clustering_loss(const Matrix& p, const Matrix& q);

// (1/n) sum_i ||x_i - xhat_i||^2: squared norm over features, mean over
// samples.
double reconstruction_loss(const Matrix& x, const Matrix& xhat);

LossBreakdown total_loss(double l_rec, double l_clu, double alpha);

CluGradIntermediates clu_grad_intermediates(const EmbeddedMatrix& z,
                                            const std::vector<Matrix>& cores);

// Analytic gradient of the clustering loss with respect to each embedded
// point, P held constant and core embeddings treated as constants:
//
//   dL/dz_i = 2 sum_k ((p_ik - q_ik) / d_ik)
//                 * sum_{j in core_k} (z_i - z_j) / (1 + ||z_i - z_j||^2)^2
//
// The second factor is the vector difference (z_i - z_j), which is what the
// chain rule through d_ik yields and what finite differences confirm.
Matrix clu_grad_against(const EmbeddedMatrix& z, const Matrix& p,
                        const std::vector<Matrix>& cores);

// Cores indexed into z itself (snapshot taken internally).
Matrix clu_grad(const EmbeddedMatrix& z, const Matrix& p, const ClusterState& state);

// Central-difference verification of clu_grad: perturbs every coordinate of
// z by +-step, recomputes Q against the frozen core snapshot, and compares
// the numerical clustering-loss derivative against the analytic one.
// Returns the max relative error over all coordinates; a coordinate where
// both derivatives are below 1e-8 in magnitude is compared absolutely.
double grad_check(const EmbeddedMatrix& z, const Matrix& p, const ClusterState& state,
                  double step);

}  // namespace idcl
