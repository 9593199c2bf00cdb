#include "idcl/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace idcl {

double clustering_loss(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("clustering_loss: shape mismatch");
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const double pik = p(i, c);
      if (pik == 0.0) {
        continue;
      }
      const double qik = q(i, c);
      if (!(qik > 0.0)) {
        throw std::invalid_argument("clustering_loss: q is zero where p > 0");
      }
      kl += pik * std::log(pik / qik);
    }
  }
  return kl;
}

double reconstruction_loss(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw std::invalid_argument("reconstruction_loss: shape mismatch");
  }
  return (x - xhat).squaredNorm() / static_cast<double>(x.rows());
}

LossBreakdown total_loss(double l_rec, double l_clu, double alpha) {
  if (alpha < 0.0) {
    throw std::invalid_argument("total_loss: alpha must be >= 0");
  }
  LossBreakdown out;
  out.l_rec = l_rec;
  out.l_clu = l_clu;
  out.alpha = alpha;
  out.total = l_rec + alpha * l_clu;
  return out;
}

CluGradIntermediates clu_grad_intermediates(const EmbeddedMatrix& z,
                                            const std::vector<Matrix>& cores) {
  const Eigen::Index n = z.rows();
  const auto k = static_cast<Eigen::Index>(cores.size());
  CluGradIntermediates mid;
  mid.d.resize(n, k);
  mid.a.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double s = core_similarity(z.row(i), cores[static_cast<std::size_t>(c)]);
      mid.d(i, c) = s;
      total += s;
    }
    mid.a(i) = total;
  }
  return mid;
}

Matrix clu_grad_against(const EmbeddedMatrix& z, const Matrix& p,
                        const std::vector<Matrix>& cores) {
  validate_embedding(z, "clu_grad");
  const Eigen::Index n = z.rows();
  const Eigen::Index dim = z.cols();
  const auto k = static_cast<Eigen::Index>(cores.size());
  if (p.rows() != n || p.cols() != k) {
    throw std::invalid_argument("clu_grad: P shape mismatch");
  }
  const CluGradIntermediates mid = clu_grad_intermediates(z, cores);
  Matrix grad = Matrix::Zero(n, dim);
  Eigen::RowVectorXd dir(dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const double qik = mid.d(i, c) / mid.a(i);
      const double coeff = 2.0 * (p(i, c) - qik) / mid.d(i, c);
      const Matrix& core = cores[static_cast<std::size_t>(c)];
      dir.setZero();
      for (Eigen::Index j = 0; j < core.rows(); ++j) {
        const Eigen::RowVectorXd diff = z.row(i) - core.row(j);
        const double denom = 1.0 + diff.squaredNorm();
        dir += diff / (denom * denom);
      }
      grad.row(i) += coeff * dir;
    }
  }
  return grad;
}

Matrix clu_grad(const EmbeddedMatrix& z, const Matrix& p, const ClusterState& state) {
  return clu_grad_against(z, p, extract_cores(z, state));
}

double grad_check(const EmbeddedMatrix& z, const Matrix& p, const ClusterState& state,
                  double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("grad_check: step must be > 0");
  }
  const std::vector<Matrix> cores = extract_cores(z, state);
  const Matrix analytic = clu_grad_against(z, p, cores);

  EmbeddedMatrix work = z;
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      const double saved = work(i, c);
      work(i, c) = saved + step;
      const double up = clustering_loss(p, soft_assign_against(work, cores));
      work(i, c) = saved - step;
      const double down = clustering_loss(p, soft_assign_against(work, cores));
      work(i, c) = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic(i, c);
      const double scale = std::max(std::abs(numeric), std::abs(a));
      const double err = scale < 1e-8 ? std::abs(numeric - a)
                                      : std::abs(numeric - a) / scale;
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace idcl
