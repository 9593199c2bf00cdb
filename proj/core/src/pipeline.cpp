#include "idcl/pipeline.hpp"

#include "idcl/assignment.hpp"
#include "idcl/curriculum.hpp"
#include "idcl/density.hpp"
#include "idcl/kmeans.hpp"
#include "idcl/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace idcl {

void RunConfig::validate() const {
  if (k < 1) {
    throw std::invalid_argument("config: k must be >= 1");
  }
  if (alpha < 0.0) {
    throw std::invalid_argument("config: alpha must be >= 0");
  }
  if (!(lambda1 > 0.0) || lambda1 > 1.0 || !(lambda2 > 0.0) || lambda2 > 1.0) {
    throw std::invalid_argument("config: lambda1 and lambda2 must be in (0, 1]");
  }
  PaceSchedule{zeta0, zeta_max, t_grow}.validate();
  if (!(mu > 0.0) || mu > 1.0) {
    throw std::invalid_argument("config: mu must be in (0, 1]");
  }
  if (max_iter < 1 || pretrain_epochs < 1 || batch_size < 1) {
    throw std::invalid_argument("config: max_iter, pretrain_epochs and batch_size must be >= 1");
  }
  if (!(lr > 0.0)) {
    throw std::invalid_argument("config: lr must be > 0");
  }
  if (bottleneck < 1) {
    throw std::invalid_argument("config: bottleneck must be >= 1");
  }
  for (int w : hidden_widths) {
    if (w < 1) {
      throw std::invalid_argument("config: layer widths must be >= 1");
    }
  }
  if (kmeans_max_iter < 1 || !(kmeans_tol >= 0.0)) {
    throw std::invalid_argument("config: bad k-means settings");
  }
  if (!(max_rot_deg >= 0.0) || !(max_shift_frac >= 0.0)) {
    throw std::invalid_argument("config: augmentation bounds must be >= 0");
  }
}

namespace {

bool all_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(i, c))) {
        return false;
      }
    }
  }
  return true;
}

void save_if_requested(const RunConfig& config, const NetworkParams& params,
                       const OptimizerState& opt) {
  if (!config.checkpoint_path.empty()) {
    save_checkpoint(config.checkpoint_path, params, opt);
  }
}

RunResult run_loop(const RunConfig& config, const Dataset& data, NetworkParams params,
                   RngStream& rng, bool do_pretrain) {
  config.validate();
  if (config.k > data.n()) {
    throw std::invalid_argument("run_training: k exceeds the sample count");
  }

  BatchTransform augment_fn;
  if (config.augment_pretrain || config.augment_train) {
    augment_fn = [&](Matrix& batch) {
      augment(batch, data.image_shape, config.max_rot_deg, config.max_shift_frac, rng);
    };
  }

  if (do_pretrain) {
    pretrain(params, data.x, config.pretrain_epochs, config.batch_size, config.lr, rng,
             config.augment_pretrain ? augment_fn : BatchTransform());
  }

  OptimizerState opt = init_optimizer(params, config.lr);
  const PaceSchedule sched{config.zeta0, config.zeta_max, config.t_grow};
  const Eigen::Index n = data.x.rows();

  RunResult result;
  std::vector<int> labels;
  Matrix last_centers;

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const EmbeddedMatrix z = encode(params, data.x);
    if (!all_finite(z)) {
      save_if_requested(config, params, opt);
      throw std::runtime_error("run_training: non-finite embeddings at epoch " +
                               std::to_string(iter) + "; aborting");
    }

    const DensityProfile profile = difficulty_measurer(z, config.lambda1);

    KMeansResult km;
    if (config.kmeans_warm_start && last_centers.rows() == config.k) {
      km = lloyd_from(z, last_centers, config.kmeans_max_iter, config.kmeans_tol);
    } else {
      km = lloyd(z, config.k, rng, config.kmeans_max_iter, config.kmeans_tol);
    }
    last_centers = km.centers;

    const ClusterState state =
        build_cluster_state(km.labels, config.k, profile.rho, config.lambda2);
    const std::vector<Matrix> cores = extract_cores(z, state);

    const Matrix q = soft_assign_against(z, cores);
    const Matrix p = target_distribution(q);
    const std::vector<int> new_labels = hard_labels(q);

    EpochRecord rec;
    rec.epoch = iter;
    rec.zeta_t = pace(iter - 1, sched);
    rec.l_rec = reconstruction_loss(data.x, decode(params, z));
    rec.l_clu = clustering_loss(p, q);
    rec.total = total_loss(rec.l_rec, rec.l_clu, config.alpha).total;
    if (!std::isfinite(rec.l_rec) || !std::isfinite(rec.l_clu)) {
      save_if_requested(config, params, opt);
      throw std::runtime_error("run_training: non-finite loss at epoch " +
                               std::to_string(iter) + "; aborting");
    }
    double change_frac = 1.0;
    if (iter >= 2) {
      long changed = 0;
      for (std::size_t i = 0; i < new_labels.size(); ++i) {
        if (new_labels[i] != labels[i]) {
          ++changed;
        }
      }
      change_frac = static_cast<double>(changed) / static_cast<double>(n);
    }
    rec.label_change_frac = change_frac;
    if (data.has_labels()) {
      rec.has_eval = true;
      rec.acc = clustering_accuracy(data.labels, new_labels);
      rec.nmi = nmi(data.labels, new_labels);
    }

    labels = new_labels;

    // The convergence check sits between label update and curriculum
    // generation; the stopping epoch trains nothing.
    if (iter >= 2 && change_frac < config.mu) {
      rec.selected_count = 0;
      result.history.push_back(rec);
      break;
    }

    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(config.k));
    for (std::size_t i = 0; i < km.labels.size(); ++i) {
      clusters[static_cast<std::size_t>(km.labels[i])].push_back(static_cast<int>(i));
    }
    const Curriculum cur = generate_curriculum(clusters, profile, iter - 1, sched);
    rec.selected_count = static_cast<int>(cur.selected.size());
    result.history.push_back(rec);

    // Mini-batch updates over the curriculum; cores and P stay frozen for
    // the whole epoch.
    std::vector<int> order = cur.selected;
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const auto m = static_cast<Eigen::Index>(
          std::min<std::size_t>(config.batch_size, order.size() - start));
      Matrix batch(m, data.x.cols());
      Matrix p_batch(m, config.k);
      for (Eigen::Index r = 0; r < m; ++r) {
        const int id = order[start + static_cast<std::size_t>(r)];
        batch.row(r) = data.x.row(id);
        p_batch.row(r) = p.row(id);
      }
      if (config.augment_train && augment_fn) {
        augment_fn(batch);
      }
      const ForwardCache cache = forward(params, batch);
      const Matrix residual = cache.output() - batch;
      if (!std::isfinite(residual.squaredNorm())) {
        save_if_requested(config, params, opt);
        throw std::runtime_error("run_training: non-finite batch loss at epoch " +
                                 std::to_string(iter) + "; aborting");
      }
      const Matrix grad_recon = (2.0 / static_cast<double>(m)) * residual;
      const Matrix grad_bottleneck =
          config.alpha * clu_grad_against(cache.bottleneck(), p_batch, cores);
      const GradientSet grads = backward(params, cache, grad_recon, grad_bottleneck);
      update_step(params, grads, opt);
    }
  }

  result.labels = std::move(labels);
  result.params = std::move(params);
  result.embeddings = encode(result.params, data.x);
  save_if_requested(config, result.params, opt);
  return result;
}

}  // namespace

RunResult run_training(const RunConfig& config, const Dataset& data) {
  // Single stream for the whole run; draw order is init, pretraining
  // shuffles, then the per-epoch k-means and batch shuffles.
  RngStream rng(config.seed);
  NetworkParams params =
      init_params(data.dim(), config.hidden_widths, config.bottleneck, rng);
  return run_loop(config, data, std::move(params), rng, /*do_pretrain=*/true);
}

RunResult run_training(const RunConfig& config, const Dataset& data,
                       NetworkParams params) {
  if (params.input_dim() != data.dim()) {
    throw std::invalid_argument("run_training: checkpoint input width does not match data");
  }
  RngStream rng(config.seed);
  return run_loop(config, data, std::move(params), rng, /*do_pretrain=*/false);
}

EvalReport evaluate(const std::vector<int>& labels, const Dataset& data) {
  if (!data.has_labels()) {
    throw std::invalid_argument("evaluate: dataset has no ground-truth labels");
  }
  return evaluate_labels(data.labels, labels);
}

}  // namespace idcl
