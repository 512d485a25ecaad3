#pragma once

#include "config.hpp"
#include "setup.hpp"

namespace hkcli {

enum ExitCode : int {
    kPass = 0,
    kPropertyFailure = 1,
    kConfigError = 2,
    kEquilibriumFailure = 3,
    kSolverFailure = 4,
    kTransportNonConvergence = 5,
};

int cmd_equilibrium(const RunConfig& cfg, const CommandOptions& opts);
int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts);
int cmd_distance(const RunConfig& cfg, const CommandOptions& opts);
int cmd_verify(const RunConfig& cfg, const CommandOptions& opts);

// Maps a library exception to the documented exit code.
int exit_code_for(const std::exception& e);

} // namespace hkcli
