#pragma once

#include <string>

#include "tw/core.hpp"

namespace tw {

/// One run's worth of configuration, from an INI-style file with sections
/// [potential], [solver], [branch]. Unknown sections or keys are hard errors.
struct RunConfig {
    PotentialSpec spec;
    SolverConfig cfg;
    int k_star = 1;
    double lambda_star = 0.0;
    bool have_branch = false;  // [branch] section present
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace tw
