#include "idcl/autoencoder.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace idcl {

namespace {

constexpr char kMagic[4] = {'I', 'D', 'C', 'L'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) {
    throw std::runtime_error("checkpoint: truncated file");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  }
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) {
    throw std::runtime_error("checkpoint: truncated file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_matrix_data(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_f64(out, m(r, c));
    }
  }
}

void put_vector_data(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    put_f64(out, v(i));
  }
}

void get_matrix_data(std::istream& in, Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = get_f64(in);
    }
  }
}

void get_vector_data(std::istream& in, Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = get_f64(in);
  }
}

void put_layer(std::ostream& out, const DenseLayer& layer) {
  put_u32(out, static_cast<std::uint32_t>(layer.w.rows()));
  put_u32(out, static_cast<std::uint32_t>(layer.w.cols()));
  put_u32(out, layer.act == Activation::kRelu ? 1u : 0u);
  put_matrix_data(out, layer.w);
  put_vector_data(out, layer.b);
}

DenseLayer get_layer(std::istream& in) {
  DenseLayer layer;
  const auto rows = get_u32(in);
  const auto cols = get_u32(in);
  const auto act = get_u32(in);
  if (rows == 0 || cols == 0 || act > 1) {
    throw std::runtime_error("checkpoint: corrupt layer header");
  }
  layer.w.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  layer.b.resize(static_cast<Eigen::Index>(cols));
  layer.act = act == 1 ? Activation::kRelu : Activation::kIdentity;
  get_matrix_data(in, layer.w);
  get_vector_data(in, layer.b);
  return layer;
}

}  // namespace

void save_checkpoint(const std::string& path, const NetworkParams& params,
                     const OptimizerState& opt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  }
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.encoder.size()));
  put_u32(out, static_cast<std::uint32_t>(params.decoder.size()));
  for (const auto& layer : params.encoder) {
    put_layer(out, layer);
  }
  for (const auto& layer : params.decoder) {
    put_layer(out, layer);
  }
  put_u64(out, static_cast<std::uint64_t>(opt.step_count));
  put_f64(out, opt.lr);
  put_f64(out, opt.beta1);
  put_f64(out, opt.beta2);
  put_f64(out, opt.eps);
  auto put_moments = [&out](const GradientSet& g) {
    for (const auto& m : g.enc_w) {
      put_matrix_data(out, m);
    }
    for (const auto& b : g.enc_b) {
      put_vector_data(out, b);
    }
    for (const auto& m : g.dec_w) {
      put_matrix_data(out, m);
    }
    for (const auto& b : g.dec_b) {
      put_vector_data(out, b);
    }
  };
  put_moments(opt.m);
  put_moments(opt.v);
  if (!out) {
    throw std::runtime_error("checkpoint: write failed for " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("checkpoint: cannot open " + path);
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  const auto version = get_u32(in);
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto n_enc = get_u32(in);
  const auto n_dec = get_u32(in);

  Checkpoint ckpt;
  for (std::uint32_t l = 0; l < n_enc; ++l) {
    ckpt.params.encoder.push_back(get_layer(in));
  }
  for (std::uint32_t l = 0; l < n_dec; ++l) {
    ckpt.params.decoder.push_back(get_layer(in));
  }
  ckpt.opt.step_count = static_cast<long>(get_u64(in));
  ckpt.opt.lr = get_f64(in);
  ckpt.opt.beta1 = get_f64(in);
  ckpt.opt.beta2 = get_f64(in);
  ckpt.opt.eps = get_f64(in);
  ckpt.opt.m = zeros_like(ckpt.params);
  ckpt.opt.v = zeros_like(ckpt.params);
  auto get_moments = [&in](GradientSet& g) {
    for (auto& m : g.enc_w) {
      get_matrix_data(in, m);
    }
    for (auto& b : g.enc_b) {
      get_vector_data(in, b);
    }
    for (auto& m : g.dec_w) {
      get_matrix_data(in, m);
    }
    for (auto& b : g.dec_b) {
      get_vector_data(in, b);
    }
  };
  get_moments(ckpt.opt.m);
  get_moments(ckpt.opt.v);
  return ckpt;
}

}  // namespace idcl
