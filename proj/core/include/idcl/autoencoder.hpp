#pragma once

#include "idcl/numerics.hpp"
#include "idcl/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace idcl {

enum class Activation { kRelu, kIdentity };

struct DenseLayer {
  Matrix w;  // in x out
  Vector b;  // out
  Activation act = Activation::kIdentity;
};

// Fully connected encoder/decoder pair. The decoder mirrors the encoder
// dimensions in reverse; hidden layers are ReLU, the bottleneck and the
// final output are linear.
struct NetworkParams {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;

  int input_dim() const;
  int bottleneck_dim() const;
};

// Weights drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) in layer order,
// row-major within each weight matrix; biases zero. Fully determined by the
// rng seed.
NetworkParams init_params(int input_dim, const std::vector<int>& hidden_widths,
                          int bottleneck, RngStream& rng);

Matrix encode(const NetworkParams& params, const Matrix& x);
Matrix decode(const NetworkParams& params, const Matrix& z);

// Activations cached for one batch, consumed by backward.
struct ForwardCache {
  std::vector<Matrix> enc_pre;  // pre-activation per encoder layer
  std::vector<Matrix> enc_act;  // post-activation per encoder layer
  std::vector<Matrix> dec_pre;
  std::vector<Matrix> dec_act;
  Matrix input;

  const Matrix& bottleneck() const { return enc_act.back(); }
  const Matrix& output() const { return dec_act.back(); }
};

ForwardCache forward(const NetworkParams& params, const Matrix& x);

// Same shapes as the parameters; used for gradients and Adam moments.
struct GradientSet {
  std::vector<Matrix> enc_w;
  std::vector<Vector> enc_b;
  std::vector<Matrix> dec_w;
  std::vector<Vector> dec_b;
};

GradientSet zeros_like(const NetworkParams& params);

// Dense backprop. grad_recon is dL/d(output) (n x M) and flows through the
// decoder and then the encoder; grad_bottleneck (n x d, typically
// alpha * clu_grad rows) is injected at the bottleneck and flows through the
// encoder only. Throws if the cache does not match the parameter shapes.
GradientSet backward(const NetworkParams& params, const ForwardCache& cache,
                     const Matrix& grad_recon, const Matrix& grad_bottleneck);

// Adam state. Moments start at zero; step_count increments once per batch
// update.
struct OptimizerState {
  GradientSet m;
  GradientSet v;
  long step_count = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

OptimizerState init_optimizer(const NetworkParams& params, double lr);

// Bias-corrected Adam update, in place. The first step moves every
// coordinate with a nonzero gradient by ~lr in magnitude.
void update_step(NetworkParams& params, const GradientSet& grads, OptimizerState& opt);

// Optional per-batch input transform (augmentation hook) applied before the
// forward pass.
using BatchTransform = std::function<void(Matrix&)>;

// Reconstruction-only training over shuffled mini-batches. Returns the mean
// per-sample reconstruction loss of each epoch.
std::vector<double> pretrain(NetworkParams& params, const Matrix& x, int epochs,
                             int batch_size, double lr, RngStream& rng,
                             const BatchTransform& transform = nullptr);

// Checkpoint file, bit-exact round trip. Layout (all integers and IEEE-754
// doubles little-endian):
//   magic "IDCL" | u32 version=1 | u32 encoder layer count | u32 decoder
//   layer count | per layer (encoder then decoder): u32 rows, u32 cols,
//   u32 activation, rows*cols f64 row-major weights, cols f64 biases |
//   u64 step_count | f64 lr, beta1, beta2, eps | per layer in the same
//   order: f64 first-moment weights, biases, then second-moment weights,
//   biases.
void save_checkpoint(const std::string& path, const NetworkParams& params,
                     const OptimizerState& opt);

struct Checkpoint {
  NetworkParams params;
  OptimizerState opt;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace idcl
