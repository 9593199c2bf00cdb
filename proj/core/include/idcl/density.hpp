#pragma once

#include "idcl/numerics.hpp"

#include <vector>

namespace idcl {

// Per-sample local densities in the embedded space plus the derived
// difficulty scores. Higher delta = denser neighborhood = easier sample,
// scheduled earlier by the curriculum.
struct DensityProfile {
  std::vector<double> rho;    // local densities; rho_i >= 1 (self term)
  double dc = 0.0;            // Gaussian kernel cutoff radius, > 0
  std::vector<double> delta;  // max-min normalized rho, in [0, 1]
  double lambda1 = 0.0;       // percentile used to pick dc
};

// Cutoff radius: the value ranked ceil(lambda1 * n^2) among all n^2 pairwise
// Euclidean distances (self-distances included) sorted ascending. A zero
// pick falls back to the smallest strictly positive distance, and to 1 when
// every distance is zero. Requires n >= 2 and lambda1 in (0, 1].
double select_dc(const EmbeddedMatrix& z, double lambda1);

// rho_i = sum_j exp(-||z_i - z_j||^2 / dc^2), self term included, so each
// rho_i lies in [1, n]. Sequential per-row reduction, deterministic.
std::vector<double> local_density(const EmbeddedMatrix& z, double dc);

// select_dc + local_density + max_min_normalize. Recomputed from scratch on
// the current embeddings every time; nothing is cached across epochs.
DensityProfile difficulty_measurer(const EmbeddedMatrix& z, double lambda1);

}  // namespace idcl
