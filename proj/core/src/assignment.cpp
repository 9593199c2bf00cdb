#include "idcl/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace idcl {

std::vector<int> density_core(const std::vector<int>& cluster_members,
                              const std::vector<double>& rho, double lambda2) {
  if (cluster_members.empty()) {
    throw std::invalid_argument("density_core: empty cluster");
  }
  if (!(lambda2 > 0.0) || lambda2 > 1.0) {
    throw std::invalid_argument("density_core: lambda2 must be in (0, 1]");
  }
  const auto size = static_cast<std::ptrdiff_t>(cluster_members.size());
  auto core_size =
      static_cast<std::ptrdiff_t>(std::ceil(lambda2 * static_cast<double>(size)));
  core_size = std::clamp<std::ptrdiff_t>(core_size, 1, size);

  std::vector<int> order = cluster_members;
  for (int id : order) {
    if (id < 0 || static_cast<std::size_t>(id) >= rho.size()) {
      throw std::invalid_argument("density_core: member id out of range");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&rho](int a, int b) {
    if (rho[static_cast<std::size_t>(a)] != rho[static_cast<std::size_t>(b)]) {
      return rho[static_cast<std::size_t>(a)] > rho[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  order.resize(static_cast<std::size_t>(core_size));
  std::sort(order.begin(), order.end());
  return order;
}

ClusterState build_cluster_state(const std::vector<int>& labels, int k,
                                 const std::vector<double>& rho, double lambda2) {
  if (labels.size() != rho.size()) {
    throw std::invalid_argument("build_cluster_state: labels/rho size mismatch");
  }
  std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || c >= k) {
      throw std::invalid_argument("build_cluster_state: label out of range at sample " +
                                  std::to_string(i));
    }
    members[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
  }
  ClusterState state;
  state.k = k;
  state.labels = labels;
  state.lambda2 = lambda2;
  state.cores.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    if (members[static_cast<std::size_t>(c)].empty()) {
      throw std::invalid_argument("build_cluster_state: cluster " + std::to_string(c) +
                                  " is empty");
    }
    state.cores[static_cast<std::size_t>(c)] =
        density_core(members[static_cast<std::size_t>(c)], rho, lambda2);
  }
  return state;
}

std::vector<Matrix> extract_cores(const EmbeddedMatrix& z, const ClusterState& state) {
  std::vector<Matrix> cores;
  cores.reserve(state.cores.size());
  for (const auto& ids : state.cores) {
    if (ids.empty()) {
      throw std::invalid_argument("extract_cores: empty core");
    }
    Matrix c(static_cast<Eigen::Index>(ids.size()), z.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (ids[r] < 0 || ids[r] >= z.rows()) {
        throw std::invalid_argument("extract_cores: core id out of range");
      }
      c.row(static_cast<Eigen::Index>(r)) = z.row(ids[r]);
    }
    cores.push_back(std::move(c));
  }
  return cores;
}

double core_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& zi,
                       const Matrix& core_z) {
  if (core_z.rows() == 0) {
    throw std::invalid_argument("core_similarity: empty core");
  }
  double s = 0.0;
  for (Eigen::Index j = 0; j < core_z.rows(); ++j) {
    const double sq = (zi - core_z.row(j)).squaredNorm();
    s += 1.0 / (1.0 + sq);
  }
  return s;
}

Matrix soft_assign_against(const EmbeddedMatrix& queries,
                           const std::vector<Matrix>& cores) {
  validate_embedding(queries, "soft_assign");
  if (cores.empty()) {
    throw std::invalid_argument("soft_assign: no cores");
  }
  const Eigen::Index n = queries.rows();
  const auto k = static_cast<Eigen::Index>(cores.size());
  Matrix q(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double s = core_similarity(queries.row(i), cores[static_cast<std::size_t>(c)]);
      q(i, c) = s;
      total += s;
    }
    q.row(i) /= total;
  }
  return q;
}

Matrix soft_assign(const EmbeddedMatrix& z, const ClusterState& state) {
  return soft_assign_against(z, extract_cores(z, state));
}

Matrix target_distribution(const Matrix& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index k = q.cols();
  Vector f = Vector::Zero(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(q(i, c) > 0.0)) {
        throw std::invalid_argument("target_distribution: Q must be strictly positive");
      }
      f(c) += q(i, c);
    }
  }
  Matrix p(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      p(i, c) = q(i, c) * q(i, c) / f(c);
      total += p(i, c);
    }
    p.row(i) /= total;
  }
  return p;
}

std::vector<int> hard_labels(const Matrix& q) {
  std::vector<int> labels(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < q.cols(); ++c) {
      if (q(i, c) > q(i, best)) {
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

}  // namespace idcl
