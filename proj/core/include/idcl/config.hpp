#pragma once

#include "idcl/pipeline.hpp"

#include <string>

namespace idcl {

// Applies one key = value pair onto the config. Throws std::invalid_argument
// for unknown keys or unparsable values.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

// Line-oriented `key = value` file with optional `[section]` headers.
// Recognized sections: run, density, pace, model, augment, kmeans (they are
// organizational; keys are globally unique). Blank lines and lines starting
// with '#' are ignored. Unknown sections or keys are rejected.
void load_config_file(RunConfig& config, const std::string& path);

}  // namespace idcl
