#include "idcl/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idcl {

namespace {

double sq_dist_rows(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Nearest center id for one point; ties toward the lower id.
int nearest_center(const EmbeddedMatrix& z, Eigen::Index i, const Matrix& centers,
                   double* dist_out = nullptr) {
  int best = 0;
  double best_d = sq_dist_rows(z, i, centers, 0);
  for (Eigen::Index c = 1; c < centers.rows(); ++c) {
    const double d = sq_dist_rows(z, i, centers, c);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist_out != nullptr) {
    *dist_out = best_d;
  }
  return best;
}

}  // namespace

Matrix kmeanspp_seed(const EmbeddedMatrix& z, int k, RngStream& rng) {
  validate_embedding(z, "kmeanspp_seed");
  const Eigen::Index n = z.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmeanspp_seed: need 1 <= k <= n");
  }
  Matrix centers(k, z.cols());
  std::vector<char> is_center(static_cast<std::size_t>(n), 0);

  const auto first = static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
  centers.row(0) = z.row(first);
  is_center[static_cast<std::size_t>(first)] = 1;

  std::vector<double> nearest_sq(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    nearest_sq[static_cast<std::size_t>(i)] = sq_dist_rows(z, i, centers, 0);
  }

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double w : nearest_sq) {
      total += w;
    }
    Eigen::Index chosen = -1;
    if (total > 0.0) {
      const double target = rng.next_double() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest_sq[static_cast<std::size_t>(i)];
        if (acc >= target && nearest_sq[static_cast<std::size_t>(i)] > 0.0) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (nearest_sq[static_cast<std::size_t>(i)] > 0.0) {
            chosen = i;
            break;
          }
        }
      }
    }
    if (chosen < 0) {
      // Every remaining point coincides with a center; pick uniformly among
      // the points that are not centers yet.
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!is_center[static_cast<std::size_t>(i)]) {
          free.push_back(i);
        }
      }
      chosen = free[rng.uniform_below(free.size())];
    }
    centers.row(c) = z.row(chosen);
    is_center[static_cast<std::size_t>(chosen)] = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = sq_dist_rows(z, i, centers, c);
      nearest_sq[static_cast<std::size_t>(i)] =
          std::min(nearest_sq[static_cast<std::size_t>(i)], d);
    }
  }
  return centers;
}

KMeansResult lloyd_from(const EmbeddedMatrix& z, Matrix centers, int max_iter,
                        double tol) {
  validate_embedding(z, "lloyd");
  const Eigen::Index n = z.rows();
  const Eigen::Index k = centers.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("lloyd: need 1 <= k <= n");
  }
  if (centers.cols() != z.cols()) {
    throw std::invalid_argument("lloyd: center dimensionality mismatch");
  }

  KMeansResult result;
  result.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= max_iter; ++iter) {
    // Assignment.
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      result.labels[static_cast<std::size_t>(i)] =
          nearest_center(z, i, centers, &dist[static_cast<std::size_t>(i)]);
      inertia += dist[static_cast<std::size_t>(i)];
    }

    // Repair empty clusters with the globally worst-fitting point.
    for (Eigen::Index c = 0; c < k; ++c) {
      const bool empty =
          std::none_of(result.labels.begin(), result.labels.end(),
                       [c](int l) { return l == static_cast<int>(c); });
      if (!empty) {
        continue;
      }
      Eigen::Index worst = 0;
      for (Eigen::Index i = 1; i < n; ++i) {
        if (dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(worst)]) {
          worst = i;
        }
      }
      inertia -= dist[static_cast<std::size_t>(worst)];
      result.labels[static_cast<std::size_t>(worst)] = static_cast<int>(c);
      dist[static_cast<std::size_t>(worst)] = 0.0;
      centers.row(c) = z.row(worst);
    }

    if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12) {
      throw std::logic_error("lloyd: inertia increased between iterations");
    }
    prev_inertia = inertia;
    result.inertia = inertia;
    result.iterations = iter;

    // Update means.
    Matrix sums = Matrix::Zero(k, z.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(result.labels[static_cast<std::size_t>(i)]) += z.row(i);
      counts[static_cast<std::size_t>(result.labels[static_cast<std::size_t>(i)])] += 1;
    }
    double max_shift = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const Matrix new_center =
          sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      max_shift = std::max(max_shift, (new_center - centers.row(c)).norm());
      centers.row(c) = new_center;
    }
    if (max_shift < tol) {
      break;
    }
  }

  // Final assignment against the converged centers.
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.labels[static_cast<std::size_t>(i)] =
        nearest_center(z, i, centers, &dist[static_cast<std::size_t>(i)]);
    inertia += dist[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    const bool empty = std::none_of(result.labels.begin(), result.labels.end(),
                                    [c](int l) { return l == static_cast<int>(c); });
    if (empty) {
      Eigen::Index worst = 0;
      for (Eigen::Index i = 1; i < n; ++i) {
        if (dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(worst)]) {
          worst = i;
        }
      }
      inertia -= dist[static_cast<std::size_t>(worst)];
      result.labels[static_cast<std::size_t>(worst)] = static_cast<int>(c);
      dist[static_cast<std::size_t>(worst)] = 0.0;
      centers.row(c) = z.row(worst);
    }
  }
  result.inertia = inertia;
  result.centers = std::move(centers);
  return result;
}

KMeansResult lloyd(const EmbeddedMatrix& z, int k, RngStream& rng, int max_iter,
                   double tol) {
  return lloyd_from(z, kmeanspp_seed(z, k, rng), max_iter, tol);
}

}  // namespace idcl
