#pragma once

#include "idcl/numerics.hpp"
#include "idcl/rng.hpp"

#include <vector>

namespace idcl {

struct KMeansResult {
  std::vector<int> labels;  // n ids in [0, k); no returned cluster is empty
  Matrix centers;           // k x d
  double inertia = 0.0;     // sum_i ||z_i - center_{label_i}||^2
  int iterations = 0;
};

// k-means++: first center uniform over points, each further center sampled
// with probability proportional to the squared distance to the nearest
// already-chosen center. When the remaining mass is zero (duplicate points)
// the next center is drawn uniformly from the non-center points.
Matrix kmeanspp_seed(const EmbeddedMatrix& z, int k, RngStream& rng);

// Lloyd iterations from k-means++ seeds. Assignment ties break toward the
// lowest center id. An emptied cluster is repaired by moving the point
// currently farthest from its center into it. Stops when the largest center
// shift drops below tol or after max_iter rounds; inertia is checked to be
// nonincreasing every iteration.
KMeansResult lloyd(const EmbeddedMatrix& z, int k, RngStream& rng, int max_iter = 100,
                   double tol = 1e-6);

// Lloyd from caller-provided initial centers (warm start).
KMeansResult lloyd_from(const EmbeddedMatrix& z, Matrix centers, int max_iter = 100,
                        double tol = 1e-6);

}  // namespace idcl
