#include "idcl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace idcl {

void validate_embedding(const EmbeddedMatrix& z, const char* what) {
  if (z.rows() < 1 || z.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  }
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      if (!std::isfinite(z(i, c))) {
        throw std::invalid_argument(std::string(what) + ": non-finite value in row " +
                                    std::to_string(i));
      }
    }
  }
}

Matrix pairwise_sq_dists(const EmbeddedMatrix& z) {
  validate_embedding(z, "pairwise_sq_dists");
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  Matrix out = Matrix::Zero(n, n);
  // Upper triangle computed directly and mirrored; exact symmetry and a zero
  // diagonal hold by construction rather than by numerical luck.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        const double diff = z(i, c) - z(j, c);
        s += diff * diff;
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

double rank_select(std::vector<double> values, double fraction) {
  if (values.empty()) {
    throw std::invalid_argument("rank_select: empty values");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("rank_select: fraction must be in (0, 1]");
  }
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(fraction * static_cast<double>(n)));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[static_cast<std::size_t>(rank - 1)];
}

std::vector<double> max_min_normalize(const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("max_min_normalize: empty values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("max_min_normalize: non-finite value");
    }
  }
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;
  std::vector<double> out(values.size());
  if (mx == mn) {
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  const double span = mx - mn;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - mn) / span;
  }
  return out;
}

}  // namespace idcl
