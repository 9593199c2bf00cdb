#include "idcl/autoencoder.hpp"

#include "idcl/objective.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

using namespace idcl;

namespace {

bool params_equal(const NetworkParams& a, const NetworkParams& b) {
  if (a.encoder.size() != b.encoder.size() || a.decoder.size() != b.decoder.size()) {
    return false;
  }
  for (std::size_t l = 0; l < a.encoder.size(); ++l) {
    if (a.encoder[l].w != b.encoder[l].w || a.encoder[l].b != b.encoder[l].b) {
      return false;
    }
  }
  for (std::size_t l = 0; l < a.decoder.size(); ++l) {
    if (a.decoder[l].w != b.decoder[l].w || a.decoder[l].b != b.decoder[l].b) {
      return false;
    }
  }
  return true;
}

// Total loss as a function of the parameters, with P and the core snapshot
// frozen: mean reconstruction plus alpha times the KL sum over the batch.
double eval_total_loss(const NetworkParams& params, const Matrix& x, const Matrix& p,
                       const std::vector<Matrix>& cores, double alpha) {
  const Matrix z = encode(params, x);
  const Matrix xhat = decode(params, z);
  const double l_rec = reconstruction_loss(x, xhat);
  const double l_clu = clustering_loss(p, soft_assign_against(z, cores));
  return total_loss(l_rec, l_clu, alpha).total;
}

// Central finite differences over every parameter coordinate.
double full_network_fd_error(NetworkParams params, const Matrix& x, const Matrix& p,
                             const std::vector<Matrix>& cores, double alpha,
                             double step) {
  const ForwardCache cache = forward(params, x);
  const Matrix residual = cache.output() - x;
  const Matrix grad_recon = (2.0 / static_cast<double>(x.rows())) * residual;
  const Matrix grad_bottleneck =
      alpha * clu_grad_against(cache.bottleneck(), p, cores);
  const GradientSet grads = backward(params, cache, grad_recon, grad_bottleneck);

  double max_err = 0.0;
  auto probe = [&](double& coord, double analytic) {
    const double saved = coord;
    coord = saved + step;
    const double up = eval_total_loss(params, x, p, cores, alpha);
    coord = saved - step;
    const double down = eval_total_loss(params, x, p, cores, alpha);
    coord = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max(std::abs(numeric), std::abs(analytic));
    const double err =
        scale < 1e-7 ? std::abs(numeric - analytic) : std::abs(numeric - analytic) / scale;
    max_err = std::max(max_err, err);
  };

  for (std::size_t l = 0; l < params.encoder.size(); ++l) {
    auto& layer = params.encoder[l];
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        probe(layer.w(r, c), grads.enc_w[l](r, c));
      }
    }
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
      probe(layer.b(i), grads.enc_b[l](i));
    }
  }
  for (std::size_t l = 0; l < params.decoder.size(); ++l) {
    auto& layer = params.decoder[l];
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        probe(layer.w(r, c), grads.dec_w[l](r, c));
      }
    }
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
      probe(layer.b(i), grads.dec_b[l](i));
    }
  }
  return max_err;
}

struct SmallProblem {
  Matrix x;
  Matrix p;
  std::vector<Matrix> cores;
};

SmallProblem small_problem(const NetworkParams& params, int n, int k, RngStream& rng) {
  SmallProblem prob;
  prob.x = oracle::random_embedding(n, params.input_dim(), rng, 0.5);
  prob.p = oracle::random_stochastic_matrix(n, k, rng);
  for (int c = 0; c < k; ++c) {
    prob.cores.push_back(oracle::random_embedding(2, params.bottleneck_dim(), rng));
  }
  return prob;
}

}  // namespace

TEST_CASE("init_params is deterministic and shape-correct") {
  RngStream a(1), b(1);
  const NetworkParams pa = init_params(64, {512, 512, 3072}, 10, a);
  const NetworkParams pb = init_params(64, {512, 512, 3072}, 10, b);
  CHECK(params_equal(pa, pb));

  REQUIRE(pa.encoder.size() == 4);
  CHECK(pa.encoder[0].w.rows() == 64);
  CHECK(pa.encoder[0].w.cols() == 512);
  CHECK(pa.encoder[1].w.rows() == 512);
  CHECK(pa.encoder[1].w.cols() == 512);
  CHECK(pa.encoder[2].w.rows() == 512);
  CHECK(pa.encoder[2].w.cols() == 3072);
  CHECK(pa.encoder[3].w.rows() == 3072);
  CHECK(pa.encoder[3].w.cols() == 10);
  REQUIRE(pa.decoder.size() == 4);
  CHECK(pa.decoder[0].w.rows() == 10);
  CHECK(pa.decoder.back().w.cols() == 64);
  CHECK(pa.encoder.back().act == Activation::kIdentity);
  CHECK(pa.decoder.back().act == Activation::kIdentity);
  CHECK(pa.encoder.front().act == Activation::kRelu);

  RngStream c(2);
  CHECK_THROWS_AS(init_params(4, {0, 3}, 2, c), std::invalid_argument);
}

TEST_CASE("encode runs affine layers with ReLU on hidden layers only") {
  NetworkParams params;
  DenseLayer identity;
  identity.w = Matrix::Identity(3, 3);
  identity.b = Vector::Zero(3);
  identity.act = Activation::kIdentity;
  params.encoder = {identity};
  params.decoder = {identity};

  RngStream rng(5);
  const Matrix x = oracle::random_embedding(4, 3, rng);
  CHECK((encode(params, x) - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((decode(params, encode(params, x)) - x).cwiseAbs().maxCoeff() == 0.0);

  // A ReLU layer clamps negative pre-activations.
  params.encoder[0].act = Activation::kRelu;
  Matrix neg(1, 3);
  neg << -1.0, 2.0, -3.0;
  const Matrix out = encode(params, neg);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == 2.0);
  CHECK(out(0, 2) == 0.0);

  Matrix wrong(2, 4);
  wrong.setZero();
  CHECK_THROWS_AS(encode(params, wrong), std::invalid_argument);
}

TEST_CASE("default bottleneck width flows through encode") {
  RngStream rng(6);
  const NetworkParams params = init_params(20, {8, 8}, 10, rng);
  const Matrix x = oracle::random_embedding(7, 20, rng);
  const Matrix z = encode(params, x);
  CHECK(z.rows() == 7);
  CHECK(z.cols() == 10);
  CHECK(decode(params, z).cols() == 20);
}

TEST_CASE("backward on a one-layer linear encoder is X^T G") {
  NetworkParams params;
  DenseLayer enc;
  enc.w = Matrix::Identity(3, 3);
  enc.b = Vector::Zero(3);
  enc.act = Activation::kIdentity;
  DenseLayer dec = enc;
  params.encoder = {enc};
  params.decoder = {dec};

  RngStream rng(7);
  const Matrix x = oracle::random_embedding(5, 3, rng);
  const ForwardCache cache = forward(params, x);
  const Matrix g = oracle::random_embedding(5, 3, rng);
  const Matrix zero = Matrix::Zero(5, 3);
  const GradientSet grads = backward(params, cache, zero, g);
  CHECK((grads.enc_w[0] - x.transpose() * g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(grads.dec_w[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward with a zero bottleneck gradient is plain reconstruction backprop") {
  RngStream rng(8);
  NetworkParams params = init_params(6, {5}, 3, rng);
  SmallProblem prob = small_problem(params, 4, 2, rng);
  // alpha = 0 removes the clustering path entirely.
  CHECK(full_network_fd_error(params, prob.x, prob.p, prob.cores, 0.0, 1e-6) < 1e-6);
}

TEST_CASE("full-network gradients match finite differences of the total loss") {
  RngStream rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const int input = 3 + static_cast<int>(rng.uniform_below(4));
    const int hidden = 3 + static_cast<int>(rng.uniform_below(5));
    const int bottleneck = 2 + static_cast<int>(rng.uniform_below(3));
    const int n = 2 + static_cast<int>(rng.uniform_below(4));
    const int k = 2 + static_cast<int>(rng.uniform_below(2));
    NetworkParams params = init_params(input, {hidden}, bottleneck, rng);
    SmallProblem prob = small_problem(params, n, k, rng);
    CHECK(full_network_fd_error(params, prob.x, prob.p, prob.cores, 0.1, 1e-6) < 1e-4);
  }
}

TEST_CASE("stale caches are rejected") {
  RngStream rng(10);
  NetworkParams params = init_params(4, {3}, 2, rng);
  NetworkParams other = init_params(4, {5}, 2, rng);
  const Matrix x = oracle::random_embedding(3, 4, rng);
  const ForwardCache cache = forward(params, x);
  const Matrix grad_recon = Matrix::Zero(3, 4);
  const Matrix grad_bottleneck = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(backward(other, cache, grad_recon, grad_bottleneck),
                  std::invalid_argument);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  RngStream rng(11);
  NetworkParams params = init_params(4, {3}, 2, rng);
  const NetworkParams before = params;
  OptimizerState opt = init_optimizer(params, 0.01);
  update_step(params, zeros_like(params), opt);
  CHECK(params_equal(params, before));
  CHECK(opt.step_count == 1);
}

TEST_CASE("adam: the first step moves by about lr") {
  NetworkParams params;
  DenseLayer layer;
  layer.w = Matrix::Zero(1, 1);
  layer.b = Vector::Zero(1);
  params.encoder = {layer};
  params.decoder = {layer};
  OptimizerState opt = init_optimizer(params, 0.01);
  GradientSet grads = zeros_like(params);
  grads.enc_w[0](0, 0) = 0.37;  // any nonzero scalar
  update_step(params, grads, opt);
  CHECK(std::abs(params.encoder[0].w(0, 0)) == doctest::Approx(0.01).epsilon(1e-5));
  CHECK(params.encoder[0].w(0, 0) < 0.0);
}

TEST_CASE("pretrain drives reconstruction loss down") {
  RngStream data_rng(12);
  SUBCASE("a constant dataset is memorized quickly") {
    Matrix x(32, 5);
    x.setConstant(0.3);
    RngStream rng(1);
    NetworkParams params = init_params(5, {8}, 3, rng);
    const auto losses = pretrain(params, x, 60, 8, 0.01, rng);
    CHECK(losses.back() < 1e-3);
  }
  SUBCASE("random blobs become easier to reconstruct") {
    const Matrix x = oracle::random_embedding(64, 16, data_rng, 0.25);
    RngStream rng(2);
    NetworkParams params = init_params(16, {12}, 4, rng);
    const auto losses = pretrain(params, x, 100, 16, 0.003, rng);
    CHECK(losses.back() < losses.front());
    // Nonincreasing in a 10-epoch moving average.
    double prev_avg = 1e300;
    for (std::size_t start = 0; start + 10 <= losses.size(); start += 10) {
      double avg = 0.0;
      for (std::size_t i = start; i < start + 10; ++i) {
        avg += losses[i];
      }
      avg /= 10.0;
      CHECK(avg <= prev_avg * 1.05);
      prev_avg = avg;
    }
  }
  SUBCASE("one epoch with batch >= n is exactly one update") {
    const Matrix x = oracle::random_embedding(6, 4, data_rng, 0.5);
    RngStream rng_a(3), rng_b(3);
    NetworkParams via_pretrain = init_params(4, {3}, 2, rng_a);
    NetworkParams manual = init_params(4, {3}, 2, rng_b);
    pretrain(via_pretrain, x, 1, 16, 0.01, rng_a);

    // Replay by hand: one shuffle draw, one forward/backward/update.
    std::vector<int> order{0, 1, 2, 3, 4, 5};
    rng_b.shuffle(order);
    Matrix batch(6, 4);
    for (int r = 0; r < 6; ++r) {
      batch.row(r) = x.row(order[static_cast<std::size_t>(r)]);
    }
    OptimizerState opt = init_optimizer(manual, 0.01);
    const ForwardCache cache = forward(manual, batch);
    const Matrix grad_recon = (2.0 / 6.0) * (cache.output() - batch);
    update_step(manual, backward(manual, cache, grad_recon, Matrix::Zero(6, 2)), opt);
    CHECK(params_equal(via_pretrain, manual));
  }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  RngStream rng(13);
  NetworkParams params = init_params(7, {6, 5}, 3, rng);
  OptimizerState opt = init_optimizer(params, 0.0123);
  // Touch the moments so the round trip covers nonzero state.
  GradientSet grads = zeros_like(params);
  grads.enc_w[0](0, 0) = 1.5;
  grads.dec_b[1](2) = -0.25;
  update_step(params, grads, opt);

  const std::string path =
      (std::filesystem::temp_directory_path() / "idcl_test_ckpt.bin").string();
  save_checkpoint(path, params, opt);
  const Checkpoint loaded = load_checkpoint(path);
  CHECK(params_equal(loaded.params, params));
  CHECK(loaded.opt.step_count == opt.step_count);
  CHECK(loaded.opt.lr == opt.lr);
  CHECK(loaded.opt.m.enc_w[0] == opt.m.enc_w[0]);
  CHECK(loaded.opt.v.dec_b[1] == opt.v.dec_b[1]);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/idcl.bin"), std::runtime_error);
}
