#include "idcl/assignment.hpp"

#include "idcl/density.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace idcl;

TEST_CASE("density_core keeps the densest ceil(lambda2*|C|) members") {
  SUBCASE("5 of 100 at lambda2 = 0.05") {
    std::vector<int> members(100);
    std::iota(members.begin(), members.end(), 0);
    std::vector<double> rho(100);
    RngStream rng(17);
    for (auto& r : rho) {
      r = 1.0 + rng.next_double();
    }
    const auto core = density_core(members, rho, 0.05);
    REQUIRE(core.size() == 5);
    // Sorting oracle: every core member at least as dense as every outsider.
    std::vector<double> sorted = rho;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double cutoff = sorted[4];
    for (int id : core) {
      CHECK(rho[static_cast<std::size_t>(id)] >= cutoff);
    }
  }
  SUBCASE("a size-3 cluster keeps exactly its densest member") {
    const auto core = density_core({4, 7, 9}, {0, 0, 0, 0, 0.2, 0, 0, 0.9, 0, 0.5}, 0.05);
    CHECK(core == std::vector<int>{7});
  }
  SUBCASE("ties break toward the lowest sample index") {
    const auto core = density_core({3, 1, 2, 0}, {1.0, 1.0, 1.0, 1.0}, 0.5);
    CHECK(core == std::vector<int>{0, 1});
  }
  CHECK_THROWS_AS(density_core({}, {1.0}, 0.05), std::invalid_argument);
}

TEST_CASE("core_similarity sums Student-t affinities") {
  Matrix core1(1, 2);
  core1 << 1.0, 2.0;
  Eigen::RowVectorXd z(2);
  z << 1.0, 2.0;
  CHECK(core_similarity(z, core1) == doctest::Approx(1.0));

  Matrix core2(1, 2);
  core2 << 2.0, 2.0;  // squared distance 1
  CHECK(core_similarity(z, core2) == doctest::Approx(0.5));

  Matrix both(2, 2);
  both << 1.0, 2.0, 2.0, 2.0;
  CHECK(core_similarity(z, both) == doctest::Approx(1.5));
}

TEST_CASE("soft_assign normalizes core similarities per row") {
  SUBCASE("equidistant cores split evenly") {
    Matrix z(3, 1);
    z << 0.0, -2.0, 2.0;  // sample 0 equidistant from cores at -2 and 2
    ClusterState state;
    state.k = 2;
    state.labels = {0, 0, 1};
    state.cores = {{1}, {2}};
    const Matrix q = soft_assign(z, state);
    CHECK(q(0, 0) == doctest::Approx(0.5));
    CHECK(q(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("a core at the sample dominates a distant one") {
    Matrix z(2, 1);
    z << 0.0, 10.0;  // squared distance 100
    ClusterState state;
    state.k = 2;
    state.labels = {0, 1};
    state.cores = {{0}, {1}};
    const Matrix q = soft_assign(z, state);
    CHECK(q(0, 0) == doctest::Approx(101.0 / 102.0).epsilon(1e-12));
    CHECK(q(0, 1) == doctest::Approx(1.0 / 102.0).epsilon(1e-12));
  }
  SUBCASE("K=1 yields a column of ones") {
    RngStream rng(3);
    const Matrix z = oracle::random_embedding(6, 2, rng);
    ClusterState state;
    state.k = 1;
    state.labels.assign(6, 0);
    state.cores = {{0, 3}};
    const Matrix q = soft_assign(z, state);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      CHECK(q(i, 0) == doctest::Approx(1.0));
    }
  }
  SUBCASE("an empty core is rejected") {
    Matrix z(2, 1);
    z << 0.0, 1.0;
    ClusterState state;
    state.k = 2;
    state.labels = {0, 1};
    state.cores = {{0}, {}};
    CHECK_THROWS_AS(soft_assign(z, state), std::invalid_argument);
  }
}

TEST_CASE("target_distribution sharpens with frequency correction") {
  SUBCASE("uniform Q is a fixpoint") {
    Matrix q(2, 2);
    q.setConstant(0.5);
    const Matrix p = target_distribution(q);
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(p(1, 1) == doctest::Approx(0.5));
  }
  SUBCASE("confident rows stay confident") {
    Matrix q(2, 2);
    q << 1.0 - 1e-9, 1e-9, 1e-9, 1.0 - 1e-9;
    const Matrix p = target_distribution(q);
    CHECK(p(0, 0) == doctest::Approx(1.0));
    CHECK(p(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("hand-evaluated 2x2 case") {
    // f = [1.4, 0.6]; q^2/f rows: [0.64/1.4, 0.04/0.6], [0.36/1.4, 0.16/0.6];
    // row-normalized: [48/55, 7/55] and [27/55, 28/55].
    Matrix q(2, 2);
    q << 0.8, 0.2, 0.6, 0.4;
    const Matrix p = target_distribution(q);
    CHECK(p(0, 0) == doctest::Approx(48.0 / 55.0).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(7.0 / 55.0).epsilon(1e-12));
    CHECK(p(1, 0) == doctest::Approx(27.0 / 55.0).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(28.0 / 55.0).epsilon(1e-12));
  }
  SUBCASE("zero entries are rejected") {
    Matrix q(1, 2);
    q << 1.0, 0.0;
    CHECK_THROWS_AS(target_distribution(q), std::invalid_argument);
  }
}

TEST_CASE("hard_labels takes the row argmax with low-id ties") {
  Matrix q(3, 2);
  q << 0.2, 0.8, 0.5, 0.5, 0.9, 0.1;
  const auto labels = hard_labels(q);
  CHECK(labels == std::vector<int>{1, 0, 0});
}

TEST_CASE("rows of Q and P sum to one") {
  RngStream rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(12));
    const int k = 2 + static_cast<int>(rng.uniform_below(4));
    const Matrix z = oracle::random_embedding(n + k, 3, rng);
    ClusterState state;
    state.k = k;
    state.labels.assign(static_cast<std::size_t>(n + k), 0);
    state.cores.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      state.cores[static_cast<std::size_t>(c)] = {n + c};
    }
    const Matrix q = soft_assign(z, state);
    const Matrix p = target_distribution(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      CHECK(std::abs(q.row(i).sum() - 1.0) < 1e-9);
      CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-9);
      CHECK(q.row(i).minCoeff() > 0.0);
    }
  }
}

TEST_CASE("P sharpens Q when the column masses are equal") {
  // Rows plus all their cyclic shifts make every column mass identical, the
  // regime where squaring provably amplifies the row max.
  RngStream rng(83);
  const int k = 4;
  for (int trial = 0; trial < 25; ++trial) {
    Matrix base = oracle::random_stochastic_matrix(5, k, rng);
    Matrix q(base.rows() * k, k);
    for (Eigen::Index r = 0; r < base.rows(); ++r) {
      for (int shift = 0; shift < k; ++shift) {
        for (int c = 0; c < k; ++c) {
          q(r * k + shift, (c + shift) % k) = base(r, c);
        }
      }
    }
    const Matrix p = target_distribution(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      Eigen::Index argmax;
      const double qmax = q.row(i).maxCoeff(&argmax);
      bool strict = true;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (c != argmax && q(i, c) == qmax) {
          strict = false;
        }
      }
      if (strict) {
        CHECK(p(i, argmax) >= qmax - 1e-12);
      }
    }
  }
}

TEST_CASE("soft_assign is invariant under rigid translation") {
  RngStream rng(97);
  const Matrix z = oracle::random_embedding(10, 3, rng);
  ClusterState state;
  state.k = 2;
  state.labels.assign(10, 0);
  state.cores = {{0, 1}, {2, 3, 4}};
  const Matrix q = soft_assign(z, state);

  Matrix shifted = z;
  Eigen::RowVectorXd offset(3);
  offset << 13.0, -4.5, 0.25;
  shifted.rowwise() += offset;
  const Matrix q_shifted = soft_assign(shifted, state);
  CHECK((q - q_shifted).cwiseAbs().maxCoeff() < 1e-12);
}

// A boundary point closer to the wrong cluster's centroid is still pulled
// to the right cluster by density-core similarity.
TEST_CASE("density cores beat centroids on a skewed two-cluster geometry") {
  // Cluster A: a tight clump at the origin plus a sparse tail at x = -8
  // that drags the centroid away from the boundary. Cluster B: a clump at
  // x = 6. The probe point at x = 2.8 belongs to A.
  const int clump_a = 10, tail_a = 5, clump_b = 15;
  const int n = clump_a + tail_a + clump_b + 1;
  Matrix z(n, 2);
  int row = 0;
  for (int i = 0; i < clump_a; ++i) {
    z.row(row++) << 0.0, 0.01 * i;
  }
  for (int i = 0; i < tail_a; ++i) {
    z.row(row++) << -8.0, 0.3 * i;
  }
  for (int i = 0; i < clump_b; ++i) {
    z.row(row++) << 6.0, 0.01 * i;
  }
  const int probe = row;
  z.row(row++) << 2.8, 0.0;

  std::vector<int> truth(static_cast<std::size_t>(n), 0);
  for (int i = clump_a + tail_a; i < clump_a + tail_a + clump_b; ++i) {
    truth[static_cast<std::size_t>(i)] = 1;
  }
  truth[static_cast<std::size_t>(probe)] = 0;  // ground truth: cluster A

  // Nearest-centroid assignment puts the probe on the wrong side.
  Matrix centroids = Matrix::Zero(2, 2);
  std::vector<int> counts(2, 0);
  for (int i = 0; i < n; ++i) {
    centroids.row(truth[static_cast<std::size_t>(i)]) += z.row(i);
    counts[static_cast<std::size_t>(truth[static_cast<std::size_t>(i)])] += 1;
  }
  centroids.row(0) /= counts[0];
  centroids.row(1) /= counts[1];
  const double dist_a = (z.row(probe) - centroids.row(0)).norm();
  const double dist_b = (z.row(probe) - centroids.row(1)).norm();
  REQUIRE(dist_b < dist_a);  // the geometry actually fools the centroid rule

  // Density cores sit inside the clumps, so core similarity recovers A.
  const DensityProfile profile = difficulty_measurer(z, 0.1);
  ClusterState state = build_cluster_state(truth, 2, profile.rho, 0.2);
  const Matrix q = soft_assign(z, state);
  const auto labels = hard_labels(q);
  CHECK(labels[static_cast<std::size_t>(probe)] == 0);
  CHECK(labels[static_cast<std::size_t>(probe)] ==
        truth[static_cast<std::size_t>(probe)]);
}
