// JSON experiment configuration. Unknown keys are rejected and validation
// failures name the offending key.
#pragma once

#include <string>

#include "avate/experiment.hpp"

namespace avate {

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace avate
