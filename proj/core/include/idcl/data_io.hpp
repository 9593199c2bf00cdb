#pragma once

#include "idcl/epoch_record.hpp"
#include "idcl/numerics.hpp"
#include "idcl/rng.hpp"

#include <string>
#include <vector>

namespace idcl {

struct ImageShape {
  int channels = 1;
  int height = 1;
  int width = 1;

  int dim() const { return channels * height * width; }
};

// Flattened sample matrix, values in [0, 1], with optional ground truth.
struct Dataset {
  Matrix x;                 // n x M
  std::vector<int> labels;  // empty when unknown
  ImageShape image_shape;
  std::string name;

  int n() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  bool has_labels() const { return !labels.empty(); }
};

// UCI optdigits CSV: each line 64 comma-separated integers in [0, 16]
// followed by a class id in [0, 9]. Pixels scaled by 1/16, shape 1x8x8.
// Malformed lines are rejected with their 1-based line number.
Dataset load_optdigits(const std::string& path);

// Fixture writer for the loader round trip; expects pixel values that are
// exact multiples of 1/16.
void write_optdigits(const std::string& path, const Dataset& ds);

// IDX pair (images magic 0x00000803, labels magic 0x00000801, big-endian
// headers). Pixels scaled by 1/255.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

void write_idx(const std::string& images_path, const std::string& labels_path,
               const Dataset& ds);

// Generic real-valued CSV, one sample per line, optionally with a trailing
// integer label column. Values must already be in [0, 1]; shape 1x1xM.
Dataset load_csv(const std::string& path, bool labeled = true);

void write_csv(const std::string& path, const Dataset& ds);

// K isotropic Gaussian clusters with centers pairwise >= separation apart
// and near-equal sizes (round-robin). Labels are the generating component;
// values are globally min-max rescaled to [0, 1].
Dataset synth_blobs(int n, int k, int dim, double separation, double sigma,
                    RngStream& rng);

// Deterministic per-image kernels, exposed for direct testing. Both operate
// on one channel-plane of length height*width.
std::vector<double> rotate_nn(const std::vector<double>& plane, int height, int width,
                              double degrees);
std::vector<double> shift_plane(const std::vector<double>& plane, int height, int width,
                                int dy, int dx);

// In-place batch augmentation: each image is rotated by U(-max_rot_deg,
// +max_rot_deg) (nearest neighbor, zero fill) and then shifted by uniform
// integer offsets up to floor(height * max_shift_frac) / floor(width *
// max_shift_frac) per axis, the same transform on every channel. Draw order
// per image: angle, dy, dx. Rejects datasets that are not images
// (height or width < 2).
void augment(Matrix& batch, const ImageShape& shape, double max_rot_deg,
             double max_shift_frac, RngStream& rng);

// Writes <prefix>.metrics.jsonl (one object per epoch; keys epoch, zeta,
// selected, l_rec, l_clu, total, acc, nmi, label_change_frac) and
// <prefix>.embeddings.csv (d coordinates, predicted label, true label when
// known). Both files are written to a temp name and renamed into place.
void export_run(const std::vector<EpochRecord>& history, const Matrix& embeddings,
                const std::vector<int>& pred_labels, const std::vector<int>& true_labels,
                const std::string& path_prefix);

}  // namespace idcl
