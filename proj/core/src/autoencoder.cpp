#include "idcl/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace idcl {

namespace {

Matrix apply_activation(const Matrix& pre, Activation act) {
  if (act == Activation::kRelu) {
    return pre.cwiseMax(0.0);
  }
  return pre;
}

Matrix run_stack(const std::vector<DenseLayer>& layers, const Matrix& x,
                 const char* what) {
  Matrix a = x;
  for (const auto& layer : layers) {
    if (a.cols() != layer.w.rows()) {
      throw std::invalid_argument(std::string(what) + ": input width " +
                                  std::to_string(a.cols()) + " does not match layer of " +
                                  std::to_string(layer.w.rows()) + " inputs");
    }
    Matrix pre = a * layer.w;
    pre.rowwise() += layer.b.transpose();
    a = apply_activation(pre, layer.act);
  }
  return a;
}

void forward_stack(const std::vector<DenseLayer>& layers, const Matrix& input,
                   std::vector<Matrix>& pre_out, std::vector<Matrix>& act_out,
                   const char* what) {
  pre_out.clear();
  act_out.clear();
  const Matrix* a = &input;
  for (const auto& layer : layers) {
    if (a->cols() != layer.w.rows()) {
      throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
    Matrix pre = (*a) * layer.w;
    pre.rowwise() += layer.b.transpose();
    act_out.push_back(apply_activation(pre, layer.act));
    pre_out.push_back(std::move(pre));
    a = &act_out.back();
  }
}

// Walks a stack backwards; grad arrives as dL/d(final activation).
void backward_stack(const std::vector<DenseLayer>& layers, const Matrix& input,
                    const std::vector<Matrix>& pre, const std::vector<Matrix>& act,
                    Matrix grad, std::vector<Matrix>& w_grads,
                    std::vector<Vector>& b_grads, Matrix& grad_input) {
  const auto depth = layers.size();
  w_grads.assign(depth, Matrix());
  b_grads.assign(depth, Vector());
  for (std::size_t l = depth; l-- > 0;) {
    if (layers[l].act == Activation::kRelu) {
      grad = ((pre[l].array() > 0.0).cast<double>() * grad.array()).matrix();
    }
    const Matrix& below = (l == 0) ? input : act[l - 1];
    w_grads[l] = below.transpose() * grad;
    b_grads[l] = grad.colwise().sum().transpose();
    grad = grad * layers[l].w.transpose();
  }
  grad_input = std::move(grad);
}

void check_cache(const NetworkParams& params, const ForwardCache& cache) {
  if (cache.enc_pre.size() != params.encoder.size() ||
      cache.dec_pre.size() != params.decoder.size() ||
      cache.enc_act.size() != params.encoder.size() ||
      cache.dec_act.size() != params.decoder.size()) {
    throw std::invalid_argument("backward: stale forward cache (layer count mismatch)");
  }
  for (std::size_t l = 0; l < params.encoder.size(); ++l) {
    if (cache.enc_pre[l].cols() != params.encoder[l].w.cols()) {
      throw std::invalid_argument("backward: stale forward cache (encoder shape)");
    }
  }
  for (std::size_t l = 0; l < params.decoder.size(); ++l) {
    if (cache.dec_pre[l].cols() != params.decoder[l].w.cols()) {
      throw std::invalid_argument("backward: stale forward cache (decoder shape)");
    }
  }
}

}  // namespace

int NetworkParams::input_dim() const {
  return encoder.empty() ? 0 : static_cast<int>(encoder.front().w.rows());
}

int NetworkParams::bottleneck_dim() const {
  return encoder.empty() ? 0 : static_cast<int>(encoder.back().w.cols());
}

NetworkParams init_params(int input_dim, const std::vector<int>& hidden_widths,
                          int bottleneck, RngStream& rng) {
  if (input_dim < 1 || bottleneck < 1) {
    throw std::invalid_argument("init_params: dimensions must be positive");
  }
  for (int w : hidden_widths) {
    if (w < 1) {
      throw std::invalid_argument("init_params: zero-width layer");
    }
  }
  std::vector<int> enc_dims;
  enc_dims.push_back(input_dim);
  enc_dims.insert(enc_dims.end(), hidden_widths.begin(), hidden_widths.end());
  enc_dims.push_back(bottleneck);

  auto make_layer = [&rng](int fan_in, int fan_out, Activation act) {
    DenseLayer layer;
    layer.w.resize(fan_in, fan_out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        layer.w(r, c) = rng.uniform(-scale, scale);
      }
    }
    layer.b = Vector::Zero(fan_out);
    layer.act = act;
    return layer;
  };

  NetworkParams params;
  const auto n_enc = enc_dims.size() - 1;
  for (std::size_t l = 0; l < n_enc; ++l) {
    const bool last = (l + 1 == n_enc);
    params.encoder.push_back(make_layer(enc_dims[l], enc_dims[l + 1],
                                        last ? Activation::kIdentity : Activation::kRelu));
  }
  for (std::size_t l = n_enc; l-- > 0;) {
    const bool last = (l == 0);
    params.decoder.push_back(make_layer(enc_dims[l + 1], enc_dims[l],
                                        last ? Activation::kIdentity : Activation::kRelu));
  }
  return params;
}

Matrix encode(const NetworkParams& params, const Matrix& x) {
  return run_stack(params.encoder, x, "encode");
}

Matrix decode(const NetworkParams& params, const Matrix& z) {
  return run_stack(params.decoder, z, "decode");
}

ForwardCache forward(const NetworkParams& params, const Matrix& x) {
  ForwardCache cache;
  cache.input = x;
  forward_stack(params.encoder, cache.input, cache.enc_pre, cache.enc_act, "encode");
  forward_stack(params.decoder, cache.enc_act.back(), cache.dec_pre, cache.dec_act,
                "decode");
  return cache;
}

GradientSet zeros_like(const NetworkParams& params) {
  GradientSet g;
  for (const auto& layer : params.encoder) {
    g.enc_w.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    g.enc_b.push_back(Vector::Zero(layer.b.size()));
  }
  for (const auto& layer : params.decoder) {
    g.dec_w.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    g.dec_b.push_back(Vector::Zero(layer.b.size()));
  }
  return g;
}

GradientSet backward(const NetworkParams& params, const ForwardCache& cache,
                     const Matrix& grad_recon, const Matrix& grad_bottleneck) {
  check_cache(params, cache);
  if (grad_recon.rows() != cache.input.rows() ||
      grad_recon.cols() != cache.output().cols()) {
    throw std::invalid_argument("backward: grad_recon shape mismatch");
  }
  if (grad_bottleneck.rows() != cache.input.rows() ||
      grad_bottleneck.cols() != cache.bottleneck().cols()) {
    throw std::invalid_argument("backward: grad_bottleneck shape mismatch");
  }

  GradientSet grads;
  Matrix grad_z;
  backward_stack(params.decoder, cache.bottleneck(), cache.dec_pre, cache.dec_act,
                 grad_recon, grads.dec_w, grads.dec_b, grad_z);
  grad_z += grad_bottleneck;
  Matrix grad_x;
  backward_stack(params.encoder, cache.input, cache.enc_pre, cache.enc_act,
                 std::move(grad_z), grads.enc_w, grads.enc_b, grad_x);
  return grads;
}

OptimizerState init_optimizer(const NetworkParams& params, double lr) {
  OptimizerState opt;
  opt.m = zeros_like(params);
  opt.v = zeros_like(params);
  opt.lr = lr;
  return opt;
}

namespace {

template <typename Tensor>
void adam_update(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v,
                 const OptimizerState& opt, double bc1, double bc2) {
  m = opt.beta1 * m + (1.0 - opt.beta1) * grad;
  v = opt.beta2 * v + (1.0 - opt.beta2) * grad.cwiseProduct(grad);
  param.array() -= opt.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + opt.eps);
}

}  // namespace

void update_step(NetworkParams& params, const GradientSet& grads, OptimizerState& opt) {
  if (grads.enc_w.size() != params.encoder.size() ||
      grads.dec_w.size() != params.decoder.size()) {
    throw std::invalid_argument("update_step: gradient shape mismatch");
  }
  opt.step_count += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
  for (std::size_t l = 0; l < params.encoder.size(); ++l) {
    adam_update(params.encoder[l].w, grads.enc_w[l], opt.m.enc_w[l], opt.v.enc_w[l], opt,
                bc1, bc2);
    adam_update(params.encoder[l].b, grads.enc_b[l], opt.m.enc_b[l], opt.v.enc_b[l], opt,
                bc1, bc2);
  }
  for (std::size_t l = 0; l < params.decoder.size(); ++l) {
    adam_update(params.decoder[l].w, grads.dec_w[l], opt.m.dec_w[l], opt.v.dec_w[l], opt,
                bc1, bc2);
    adam_update(params.decoder[l].b, grads.dec_b[l], opt.m.dec_b[l], opt.v.dec_b[l], opt,
                bc1, bc2);
  }
}

std::vector<double> pretrain(NetworkParams& params, const Matrix& x, int epochs,
                             int batch_size, double lr, RngStream& rng,
                             const BatchTransform& transform) {
  if (epochs < 1) {
    throw std::invalid_argument("pretrain: epochs must be >= 1");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("pretrain: batch_size must be >= 1");
  }
  OptimizerState opt = init_optimizer(params, lr);
  const Eigen::Index n = x.rows();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> epoch_losses;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += batch_size) {
      const Eigen::Index m = std::min<Eigen::Index>(batch_size, n - start);
      Matrix batch(m, x.cols());
      for (Eigen::Index r = 0; r < m; ++r) {
        batch.row(r) = x.row(order[static_cast<std::size_t>(start + r)]);
      }
      if (transform) {
        transform(batch);
      }
      const ForwardCache cache = forward(params, batch);
      const Matrix residual = cache.output() - batch;
      loss_sum += residual.squaredNorm();
      const Matrix grad_recon = (2.0 / static_cast<double>(m)) * residual;
      const Matrix grad_bottleneck =
          Matrix::Zero(m, static_cast<Eigen::Index>(params.bottleneck_dim()));
      const GradientSet grads = backward(params, cache, grad_recon, grad_bottleneck);
      update_step(params, grads, opt);
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(n));
  }
  return epoch_losses;
}

}  // namespace idcl
