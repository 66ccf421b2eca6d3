// Workbench configuration: a small JSON file selecting seed, trial counts,
// data directory, and the tunable suite parameters.  Unknown keys are
// rejected so a typo cannot silently run with defaults.
#pragma once

#include <cstdint>
#include <string>

#include "wb/primitives.hpp"

namespace wb {

struct WorkbenchConfig {
    std::uint64_t seed = 1;
    std::uint64_t trials = 100;
    std::string data_dir;  // empty selects the built-in data directory
    int cost_z = 5;
    SuiteParams suite;

    std::string resolved_data_dir() const;
};

WorkbenchConfig parse_config_text(const std::string& text, const std::string& origin);
WorkbenchConfig load_config(const std::string& path);

}  // namespace wb
