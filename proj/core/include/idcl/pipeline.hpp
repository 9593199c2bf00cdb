#pragma once

#include "idcl/autoencoder.hpp"
#include "idcl/data_io.hpp"
#include "idcl/epoch_record.hpp"
#include "idcl/metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace idcl {

struct RunConfig {
  int k = 10;
  double alpha = 0.1;
  double lambda1 = 0.02;
  double lambda2 = 0.05;
  double zeta0 = 0.6;
  double zeta_max = 0.95;
  int t_grow = 50;
  double mu = 0.001;
  int max_iter = 200;
  int pretrain_epochs = 100;
  int batch_size = 256;
  double lr = 0.01;
  std::uint64_t seed = 0;
  std::vector<int> hidden_widths = {512, 512, 3072};
  int bottleneck = 10;
  bool augment_pretrain = false;
  bool augment_train = false;
  double max_rot_deg = 10.0;
  double max_shift_frac = 0.1;
  bool kmeans_warm_start = false;  // opt-in deviation from cold re-clustering
  int kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;
  std::string checkpoint_path;  // when set, written at the end and on abort

  void validate() const;
};

struct RunResult {
  std::vector<int> labels;
  std::vector<EpochRecord> history;
  NetworkParams params;
  EmbeddedMatrix embeddings;  // encode(params, x) after the final update
};

// The full training driver: reconstruction-only pretraining, then per epoch
// {encode all -> densities -> k-means -> density cores -> Q, P, labels ->
// convergence check -> curriculum -> mini-batch updates}. Stops at the
// first epoch (>= 2) whose label-change fraction drops below mu. Epoch t
// (1-based) is paced with zeta(t - 1) so the first selection uses zeta0.
RunResult run_training(const RunConfig& config, const Dataset& data);

// Same loop but starting from caller-provided parameters (for example a
// pretraining checkpoint); the internal pretraining phase is skipped.
RunResult run_training(const RunConfig& config, const Dataset& data,
                       NetworkParams params);

// ACC/NMI plus confusion matrix against the dataset ground truth.
EvalReport evaluate(const std::vector<int>& labels, const Dataset& data);

}  // namespace idcl
