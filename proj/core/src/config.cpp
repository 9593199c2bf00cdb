#include "idcl/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace idcl {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + value + "'");
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
  }
}

long parse_long(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
  }
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string field;
  while (std::getline(ss, field, ',')) {
    out.push_back(static_cast<int>(parse_long(trim(field), key)));
  }
  if (out.empty()) {
    throw std::invalid_argument("config: empty list for " + key);
  }
  return out;
}

}  // namespace

void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "k") {
    config.k = static_cast<int>(parse_long(value, key));
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_long(value, key));
  } else if (key == "alpha") {
    config.alpha = parse_double(value, key);
  } else if (key == "lambda1") {
    config.lambda1 = parse_double(value, key);
  } else if (key == "lambda2") {
    config.lambda2 = parse_double(value, key);
  } else if (key == "zeta0") {
    config.zeta0 = parse_double(value, key);
  } else if (key == "zeta_max") {
    config.zeta_max = parse_double(value, key);
  } else if (key == "t_grow") {
    config.t_grow = static_cast<int>(parse_long(value, key));
  } else if (key == "mu") {
    config.mu = parse_double(value, key);
  } else if (key == "max_iter") {
    config.max_iter = static_cast<int>(parse_long(value, key));
  } else if (key == "pretrain_epochs") {
    config.pretrain_epochs = static_cast<int>(parse_long(value, key));
  } else if (key == "batch_size") {
    config.batch_size = static_cast<int>(parse_long(value, key));
  } else if (key == "lr") {
    config.lr = parse_double(value, key);
  } else if (key == "widths") {
    config.hidden_widths = parse_int_list(value, key);
  } else if (key == "bottleneck") {
    config.bottleneck = static_cast<int>(parse_long(value, key));
  } else if (key == "augment_pretrain") {
    config.augment_pretrain = parse_bool(value, key);
  } else if (key == "augment_train") {
    config.augment_train = parse_bool(value, key);
  } else if (key == "max_rot_deg") {
    config.max_rot_deg = parse_double(value, key);
  } else if (key == "max_shift_frac") {
    config.max_shift_frac = parse_double(value, key);
  } else if (key == "kmeans_warm_start") {
    config.kmeans_warm_start = parse_bool(value, key);
  } else if (key == "kmeans_max_iter") {
    config.kmeans_max_iter = static_cast<int>(parse_long(value, key));
  } else if (key == "kmeans_tol") {
    config.kmeans_tol = parse_double(value, key);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  static const std::set<std::string> known_sections = {"run",   "density", "pace",
                                                       "model", "augment", "kmeans"};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      continue;
    }
    if (stripped.front() == '[') {
      if (stripped.back() != ']') {
        throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                    ": malformed section header");
      }
      const std::string section = trim(stripped.substr(1, stripped.size() - 2));
      if (known_sections.find(section) == known_sections.end()) {
        throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                    ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": empty key or value");
    }
    apply_config_value(config, key, value);
  }
}

}  // namespace idcl
