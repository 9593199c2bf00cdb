#include "idcl/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idcl {

double select_dc(const EmbeddedMatrix& z, double lambda1) {
  validate_embedding(z, "select_dc");
  if (z.rows() < 2) {
    throw std::invalid_argument("select_dc: need at least 2 points");
  }
  if (!(lambda1 > 0.0) || lambda1 > 1.0) {
    throw std::invalid_argument("select_dc: lambda1 must be in (0, 1]");
  }
  const Matrix sq = pairwise_sq_dists(z);
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(sq.size()));
  for (Eigen::Index i = 0; i < sq.rows(); ++i) {
    for (Eigen::Index j = 0; j < sq.cols(); ++j) {
      dists.push_back(std::sqrt(sq(i, j)));
    }
  }
  const double picked = rank_select(dists, lambda1);
  if (picked > 0.0) {
    return picked;
  }
  // The lambda1 rank landed on one of the self (or duplicate) zeros.
  double smallest_positive = std::numeric_limits<double>::infinity();
  for (double d : dists) {
    if (d > 0.0 && d < smallest_positive) {
      smallest_positive = d;
    }
  }
  return std::isfinite(smallest_positive) ? smallest_positive : 1.0;
}

std::vector<double> local_density(const EmbeddedMatrix& z, double dc) {
  validate_embedding(z, "local_density");
  if (!(dc > 0.0)) {
    throw std::invalid_argument("local_density: dc must be > 0");
  }
  const Matrix sq = pairwise_sq_dists(z);
  const double inv_dc2 = 1.0 / (dc * dc);
  const Eigen::Index n = z.rows();
  std::vector<double> rho(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += std::exp(-sq(i, j) * inv_dc2);
    }
    rho[static_cast<std::size_t>(i)] = acc;
  }
  return rho;
}

DensityProfile difficulty_measurer(const EmbeddedMatrix& z, double lambda1) {
  DensityProfile profile;
  profile.lambda1 = lambda1;
  profile.dc = select_dc(z, lambda1);
  profile.rho = local_density(z, profile.dc);
  profile.delta = max_min_normalize(profile.rho);
  return profile;
}

}  // namespace idcl
