#pragma once

namespace idcl {

// One row of training history, mirrored verbatim into the metrics JSONL.
// acc/nmi are meaningful only when has_eval is set (ground truth known).
struct EpochRecord {
  int epoch = 0;
  double zeta_t = 0.0;
  int selected_count = 0;
  double l_rec = 0.0;
  double l_clu = 0.0;
  double total = 0.0;
  bool has_eval = false;
  double acc = 0.0;
  double nmi = 0.0;
  double label_change_frac = 1.0;  // defined as 1 for the first epoch
};

}  // namespace idcl
