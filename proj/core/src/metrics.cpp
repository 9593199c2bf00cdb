#include "idcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idcl {

namespace {

int label_count(const std::vector<int>& labels, const char* what) {
  int k = 0;
  for (int l : labels) {
    if (l < 0) {
      throw std::invalid_argument(std::string(what) + ": negative label");
    }
    k = std::max(k, l + 1);
  }
  return k;
}

std::vector<std::vector<long>> confusion_counts(const std::vector<int>& true_labels,
                                                const std::vector<int>& pred_labels,
                                                int k) {
  std::vector<std::vector<long>> counts(static_cast<std::size_t>(k),
                                        std::vector<long>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    counts[static_cast<std::size_t>(true_labels[i])]
          [static_cast<std::size_t>(pred_labels[i])] += 1;
  }
  return counts;
}

void check_lengths(const std::vector<int>& a, const std::vector<int>& b,
                   const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": label length mismatch");
  }
  if (a.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty labels");
  }
}

}  // namespace

std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1) {
    throw std::invalid_argument("hungarian: cost matrix must be square and nonempty");
  }
  const int n = static_cast<int>(cost.rows());
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (!std::isfinite(cost(i, j))) {
        throw std::invalid_argument("hungarian: non-finite cost");
      }
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          continue;
        }
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    assign[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return assign;
}

double clustering_accuracy(const std::vector<int>& true_labels,
                           const std::vector<int>& pred_labels) {
  check_lengths(true_labels, pred_labels, "clustering_accuracy");
  const int k = std::max(label_count(true_labels, "clustering_accuracy"),
                         label_count(pred_labels, "clustering_accuracy"));
  const auto counts = confusion_counts(true_labels, pred_labels, k);
  Matrix cost(k, k);
  for (int c = 0; c < k; ++c) {
    for (int t = 0; t < k; ++t) {
      cost(c, t) = -static_cast<double>(counts[static_cast<std::size_t>(t)]
                                              [static_cast<std::size_t>(c)]);
    }
  }
  const std::vector<int> mapping = hungarian(cost);  // cluster -> class
  long matched = 0;
  for (std::size_t i = 0; i < pred_labels.size(); ++i) {
    if (mapping[static_cast<std::size_t>(pred_labels[i])] == true_labels[i]) {
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(true_labels.size());
}

double nmi(const std::vector<int>& true_labels, const std::vector<int>& pred_labels) {
  check_lengths(true_labels, pred_labels, "nmi");
  const int k = std::max(label_count(true_labels, "nmi"), label_count(pred_labels, "nmi"));
  const auto counts = confusion_counts(true_labels, pred_labels, k);
  const double n = static_cast<double>(true_labels.size());

  std::vector<long> row(static_cast<std::size_t>(k), 0);
  std::vector<long> col(static_cast<std::size_t>(k), 0);
  for (int t = 0; t < k; ++t) {
    for (int c = 0; c < k; ++c) {
      row[static_cast<std::size_t>(t)] += counts[static_cast<std::size_t>(t)]
                                                [static_cast<std::size_t>(c)];
      col[static_cast<std::size_t>(c)] += counts[static_cast<std::size_t>(t)]
                                                [static_cast<std::size_t>(c)];
    }
  }

  auto entropy = [n](const std::vector<long>& marginal) {
    double h = 0.0;
    for (long m : marginal) {
      if (m > 0) {
        const double pr = static_cast<double>(m) / n;
        h -= pr * std::log(pr);
      }
    }
    return h;
  };
  const double h_true = entropy(row);
  const double h_pred = entropy(col);
  if (h_true == 0.0 && h_pred == 0.0) {
    return 1.0;  // both are the same single cluster
  }
  if (h_true == 0.0 || h_pred == 0.0) {
    return 0.0;  // one side carries no information
  }

  double mi = 0.0;
  for (int t = 0; t < k; ++t) {
    for (int c = 0; c < k; ++c) {
      const long m = counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
      if (m > 0) {
        const double pr = static_cast<double>(m) / n;
        mi += pr * std::log(n * static_cast<double>(m) /
                            (static_cast<double>(row[static_cast<std::size_t>(t)]) *
                             static_cast<double>(col[static_cast<std::size_t>(c)])));
      }
    }
  }
  mi = std::max(mi, 0.0);
  return std::clamp(mi / std::max(h_true, h_pred), 0.0, 1.0);
}

EvalReport evaluate_labels(const std::vector<int>& true_labels,
                           const std::vector<int>& pred_labels) {
  check_lengths(true_labels, pred_labels, "evaluate_labels");
  const int k = std::max(label_count(true_labels, "evaluate_labels"),
                         label_count(pred_labels, "evaluate_labels"));
  EvalReport report;
  report.confusion = confusion_counts(true_labels, pred_labels, k);
  Matrix cost(k, k);
  for (int c = 0; c < k; ++c) {
    for (int t = 0; t < k; ++t) {
      cost(c, t) = -static_cast<double>(report.confusion[static_cast<std::size_t>(t)]
                                                        [static_cast<std::size_t>(c)]);
    }
  }
  report.mapping = hungarian(cost);
  long matched = 0;
  for (std::size_t i = 0; i < pred_labels.size(); ++i) {
    if (report.mapping[static_cast<std::size_t>(pred_labels[i])] == true_labels[i]) {
      ++matched;
    }
  }
  report.acc = static_cast<double>(matched) / static_cast<double>(true_labels.size());
  report.nmi = nmi(true_labels, pred_labels);
  return report;
}

}  // namespace idcl
