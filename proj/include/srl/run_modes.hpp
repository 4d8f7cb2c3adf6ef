#pragma once

#include <string>
#include <vector>

#include "srl/config.hpp"

namespace srl {

// Outcome of one CLI invocation.  exit_code: 0 success, 1 config error,
// 2 solver non-convergence, 3 I/O error.
struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> files;  // artifact paths actually written
    std::string error_json;          // machine-readable error on failure
};

// Dispatch on cfg.mode, write CSV + JSON artifacts atomically under
// cfg.output.dir with cfg.output.prefix.
RunOutcome execute_run(const RunConfig& cfg, int jobs);

}  // namespace srl
