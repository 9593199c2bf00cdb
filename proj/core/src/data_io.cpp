#include "idcl/data_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace idcl {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    out.push_back(field);
  }
  return out;
}

long parse_int_field(const std::string& field, std::size_t line_no, const char* what) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(field, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(std::string(what) + ": line " + std::to_string(line_no) +
                             ": not an integer: '" + field + "'");
  }
  if (pos != field.size()) {
    throw std::runtime_error(std::string(what) + ": line " + std::to_string(line_no) +
                             ": trailing characters in '" + field + "'");
  }
  return value;
}

}  // namespace

Dataset load_optdigits(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_optdigits: cannot open " + path);
  }
  constexpr int kPixels = 64;
  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != kPixels + 1) {
      throw std::runtime_error("load_optdigits: line " + std::to_string(line_no) +
                               ": expected 65 fields, got " +
                               std::to_string(fields.size()));
    }
    for (int p = 0; p < kPixels; ++p) {
      const long v = parse_int_field(fields[static_cast<std::size_t>(p)], line_no,
                                     "load_optdigits");
      if (v < 0 || v > 16) {
        throw std::runtime_error("load_optdigits: line " + std::to_string(line_no) +
                                 ": pixel value " + std::to_string(v) +
                                 " outside [0, 16]");
      }
      values.push_back(static_cast<double>(v) / 16.0);
    }
    const long label =
        parse_int_field(fields[kPixels], line_no, "load_optdigits");
    if (label < 0 || label > 9) {
      throw std::runtime_error("load_optdigits: line " + std::to_string(line_no) +
                               ": class id " + std::to_string(label) + " outside [0, 9]");
    }
    labels.push_back(static_cast<int>(label));
  }
  if (labels.empty()) {
    throw std::runtime_error("load_optdigits: no samples in " + path);
  }

  Dataset ds;
  ds.name = "optdigits";
  ds.image_shape = {1, 8, 8};
  ds.labels = std::move(labels);
  ds.x.resize(static_cast<Eigen::Index>(ds.labels.size()), kPixels);
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (int p = 0; p < kPixels; ++p) {
      ds.x(i, p) = values[static_cast<std::size_t>(i) * kPixels +
                          static_cast<std::size_t>(p)];
    }
  }
  return ds;
}

void write_optdigits(const std::string& path, const Dataset& ds) {
  if (ds.dim() != 64 || !ds.has_labels()) {
    throw std::invalid_argument("write_optdigits: need 64 features and labels");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_optdigits: cannot open " + path);
  }
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (Eigen::Index p = 0; p < 64; ++p) {
      const long v = std::lround(ds.x(i, p) * 16.0);
      out << v << ',';
    }
    out << ds.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) {
    throw std::runtime_error(std::string(what) + ": truncated header");
  }
  return (static_cast<std::uint32_t>(buf[0]) << 24) |
         (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char buf[4] = {static_cast<unsigned char>((v >> 24) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>(v & 0xff)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) {
    throw std::runtime_error("load_idx: cannot open " + images_path);
  }
  const auto img_magic = read_be32(img, "load_idx images");
  if (img_magic != kIdxImagesMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%08x", img_magic);
    throw std::runtime_error("load_idx: bad images magic " + std::string(buf) +
                             " (expected 0x00000803)");
  }
  const auto n = read_be32(img, "load_idx images");
  const auto rows = read_be32(img, "load_idx images");
  const auto cols = read_be32(img, "load_idx images");
  if (n == 0 || rows == 0 || cols == 0) {
    throw std::runtime_error("load_idx: empty image file");
  }

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) {
    throw std::runtime_error("load_idx: cannot open " + labels_path);
  }
  const auto lab_magic = read_be32(lab, "load_idx labels");
  if (lab_magic != kIdxLabelsMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%08x", lab_magic);
    throw std::runtime_error("load_idx: bad labels magic " + std::string(buf) +
                             " (expected 0x00000801)");
  }
  const auto n_labels = read_be32(lab, "load_idx labels");
  if (n_labels != n) {
    throw std::runtime_error("load_idx: image/label count mismatch (" + std::to_string(n) +
                             " vs " + std::to_string(n_labels) + ")");
  }

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> pixel_buf(pixels);
  Dataset ds;
  ds.name = "idx";
  ds.image_shape = {1, static_cast<int>(rows), static_cast<int>(cols)};
  ds.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  ds.labels.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(pixel_buf.data()),
             static_cast<std::streamsize>(pixels));
    if (!img) {
      throw std::runtime_error("load_idx: truncated image data at sample " +
                               std::to_string(i));
    }
    for (std::size_t p = 0; p < pixels; ++p) {
      ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          static_cast<double>(pixel_buf[p]) / 255.0;
    }
    char label = 0;
    lab.read(&label, 1);
    if (!lab) {
      throw std::runtime_error("load_idx: truncated label data at sample " +
                               std::to_string(i));
    }
    ds.labels[i] = static_cast<int>(static_cast<unsigned char>(label));
  }
  return ds;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const Dataset& ds) {
  if (!ds.has_labels()) {
    throw std::invalid_argument("write_idx: labels required");
  }
  if (ds.image_shape.channels != 1 || ds.image_shape.dim() != ds.dim()) {
    throw std::invalid_argument("write_idx: need single-channel image shape");
  }
  std::ofstream img(images_path, std::ios::binary | std::ios::trunc);
  std::ofstream lab(labels_path, std::ios::binary | std::ios::trunc);
  if (!img || !lab) {
    throw std::runtime_error("write_idx: cannot open output files");
  }
  write_be32(img, kIdxImagesMagic);
  write_be32(img, static_cast<std::uint32_t>(ds.n()));
  write_be32(img, static_cast<std::uint32_t>(ds.image_shape.height));
  write_be32(img, static_cast<std::uint32_t>(ds.image_shape.width));
  write_be32(lab, kIdxLabelsMagic);
  write_be32(lab, static_cast<std::uint32_t>(ds.n()));
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (Eigen::Index p = 0; p < ds.x.cols(); ++p) {
      const auto byte =
          static_cast<unsigned char>(std::lround(ds.x(i, p) * 255.0));
      img.write(reinterpret_cast<const char*>(&byte), 1);
    }
    const auto label = static_cast<unsigned char>(ds.labels[static_cast<std::size_t>(i)]);
    lab.write(reinterpret_cast<const char*>(&label), 1);
  }
}

Dataset load_csv(const std::string& path, bool labeled) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    const std::size_t n_values = labeled ? fields.size() - 1 : fields.size();
    if (fields.size() < (labeled ? 2u : 1u)) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": too few fields");
    }
    if (width == 0) {
      width = n_values;
    } else if (n_values != width) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": inconsistent field count");
    }
    std::vector<double> row(n_values);
    for (std::size_t i = 0; i < n_values; ++i) {
      try {
        row[i] = std::stod(fields[i]);
      } catch (const std::exception&) {
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                 ": not a number: '" + fields[i] + "'");
      }
      if (!(row[i] >= 0.0 && row[i] <= 1.0)) {
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                 ": value outside [0, 1]");
      }
    }
    rows.push_back(std::move(row));
    if (labeled) {
      const long label = parse_int_field(fields.back(), line_no, "load_csv");
      if (label < 0) {
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                 ": negative label");
      }
      labels.push_back(static_cast<int>(label));
    }
  }
  if (rows.empty()) {
    throw std::runtime_error("load_csv: no samples in " + path);
  }
  Dataset ds;
  ds.name = "csv";
  ds.image_shape = {1, 1, static_cast<int>(width)};
  ds.labels = std::move(labels);
  ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < width; ++c) {
      ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  return ds;
}

void write_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open " + path);
  }
  char buf[40];
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (Eigen::Index c = 0; c < ds.x.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.x(i, c));
      out << buf << ',';
    }
    if (ds.has_labels()) {
      out << ds.labels[static_cast<std::size_t>(i)];
    }
    out << '\n';
  }
}

Dataset synth_blobs(int n, int k, int dim, double separation, double sigma,
                    RngStream& rng) {
  if (n < k || k < 1) {
    throw std::invalid_argument("synth_blobs: need n >= k >= 1");
  }
  if (!(sigma > 0.0) || separation < 0.0) {
    throw std::invalid_argument("synth_blobs: need sigma > 0 and separation >= 0");
  }
  // Rejection-sample centers inside a box wide enough that k separated
  // centers always fit.
  const double side = separation * static_cast<double>(std::max(k, 2));
  Matrix centers(k, dim);
  for (int c = 0; c < k; ++c) {
    for (int attempt = 0;; ++attempt) {
      for (int d = 0; d < dim; ++d) {
        centers(c, d) = rng.uniform(0.0, side);
      }
      bool ok = true;
      for (int prev = 0; prev < c; ++prev) {
        if ((centers.row(c) - centers.row(prev)).norm() < separation) {
          ok = false;
          break;
        }
      }
      if (ok) {
        break;
      }
      if (attempt > 10000) {
        throw std::runtime_error("synth_blobs: could not place separated centers");
      }
    }
  }

  Dataset ds;
  ds.name = "blobs";
  ds.image_shape = {1, 1, dim};
  ds.x.resize(n, dim);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = i % k;  // round-robin: near-equal sizes
    ds.labels[static_cast<std::size_t>(i)] = c;
    for (int d = 0; d < dim; ++d) {
      ds.x(i, d) = centers(c, d) + sigma * rng.normal();
    }
  }
  const double mn = ds.x.minCoeff();
  const double mx = ds.x.maxCoeff();
  if (mx > mn) {
    ds.x = (ds.x.array() - mn) / (mx - mn);
  } else {
    ds.x.setZero();
  }
  return ds;
}

std::vector<double> rotate_nn(const std::vector<double>& plane, int height, int width,
                              double degrees) {
  if (static_cast<std::size_t>(height) * static_cast<std::size_t>(width) !=
      plane.size()) {
    throw std::invalid_argument("rotate_nn: plane size mismatch");
  }
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  const double cy = (height - 1) / 2.0;
  const double cx = (width - 1) / 2.0;
  std::vector<double> out(plane.size(), 0.0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      // Inverse mapping: rotate the output coordinate back into the source.
      const double dy = r - cy;
      const double dx = c - cx;
      const double src_y = cs * dy + sn * dx + cy;
      const double src_x = -sn * dy + cs * dx + cx;
      const int sy = static_cast<int>(std::lround(src_y));
      const int sx = static_cast<int>(std::lround(src_x));
      if (sy >= 0 && sy < height && sx >= 0 && sx < width) {
        out[static_cast<std::size_t>(r) * width + c] =
            plane[static_cast<std::size_t>(sy) * width + sx];
      }
    }
  }
  return out;
}

std::vector<double> shift_plane(const std::vector<double>& plane, int height, int width,
                                int dy, int dx) {
  if (static_cast<std::size_t>(height) * static_cast<std::size_t>(width) !=
      plane.size()) {
    throw std::invalid_argument("shift_plane: plane size mismatch");
  }
  std::vector<double> out(plane.size(), 0.0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int sy = r - dy;
      const int sx = c - dx;
      if (sy >= 0 && sy < height && sx >= 0 && sx < width) {
        out[static_cast<std::size_t>(r) * width + c] =
            plane[static_cast<std::size_t>(sy) * width + sx];
      }
    }
  }
  return out;
}

void augment(Matrix& batch, const ImageShape& shape, double max_rot_deg,
             double max_shift_frac, RngStream& rng) {
  if (shape.height < 2 || shape.width < 2) {
    throw std::invalid_argument("augment: dataset is not image-shaped");
  }
  if (batch.cols() != shape.dim()) {
    throw std::invalid_argument("augment: batch width does not match image shape");
  }
  const int plane_size = shape.height * shape.width;
  const int max_shift = static_cast<int>(std::floor(shape.height * max_shift_frac));
  std::vector<double> plane(static_cast<std::size_t>(plane_size));
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const double angle =
        max_rot_deg > 0.0 ? rng.uniform(-max_rot_deg, max_rot_deg) : 0.0;
    const int dy = max_shift > 0
                       ? static_cast<int>(rng.uniform_below(2 * max_shift + 1)) - max_shift
                       : 0;
    const int dx = max_shift > 0
                       ? static_cast<int>(rng.uniform_below(2 * max_shift + 1)) - max_shift
                       : 0;
    for (int ch = 0; ch < shape.channels; ++ch) {
      const int base = ch * plane_size;
      for (int p = 0; p < plane_size; ++p) {
        plane[static_cast<std::size_t>(p)] = batch(i, base + p);
      }
      std::vector<double> transformed = plane;
      if (angle != 0.0) {
        transformed = rotate_nn(transformed, shape.height, shape.width, angle);
      }
      if (dy != 0 || dx != 0) {
        transformed = shift_plane(transformed, shape.height, shape.width, dy, dx);
      }
      for (int p = 0; p < plane_size; ++p) {
        batch(i, base + p) = transformed[static_cast<std::size_t>(p)];
      }
    }
  }
}

void export_run(const std::vector<EpochRecord>& history, const Matrix& embeddings,
                const std::vector<int>& pred_labels, const std::vector<int>& true_labels,
                const std::string& path_prefix) {
  if (history.empty()) {
    throw std::invalid_argument("export_run: empty history");
  }
  if (static_cast<std::size_t>(embeddings.rows()) != pred_labels.size()) {
    throw std::invalid_argument("export_run: embeddings/labels size mismatch");
  }
  if (!true_labels.empty() && true_labels.size() != pred_labels.size()) {
    throw std::invalid_argument("export_run: true label size mismatch");
  }

  namespace fs = std::filesystem;
  auto atomic_write = [](const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
      if (!out) {
        throw std::runtime_error("export_run: cannot open " + tmp);
      }
      out << content;
      if (!out) {
        throw std::runtime_error("export_run: write failed for " + tmp);
      }
    }
    fs::rename(tmp, path);
  };

  std::string metrics;
  for (const auto& rec : history) {
    nlohmann::json obj;
    obj["epoch"] = rec.epoch;
    obj["zeta"] = rec.zeta_t;
    obj["selected"] = rec.selected_count;
    obj["l_rec"] = rec.l_rec;
    obj["l_clu"] = rec.l_clu;
    obj["total"] = rec.total;
    if (rec.has_eval) {
      obj["acc"] = rec.acc;
      obj["nmi"] = rec.nmi;
    } else {
      obj["acc"] = nullptr;
      obj["nmi"] = nullptr;
    }
    obj["label_change_frac"] = rec.label_change_frac;
    metrics += obj.dump();
    metrics += '\n';
  }
  atomic_write(path_prefix + ".metrics.jsonl", metrics);

  std::string csv;
  char buf[40];
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (Eigen::Index c = 0; c < embeddings.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", embeddings(i, c));
      csv += buf;
      csv += ',';
    }
    csv += std::to_string(pred_labels[static_cast<std::size_t>(i)]);
    if (!true_labels.empty()) {
      csv += ',';
      csv += std::to_string(true_labels[static_cast<std::size_t>(i)]);
    }
    csv += '\n';
  }
  atomic_write(path_prefix + ".embeddings.csv", csv);
}

}  // namespace idcl
