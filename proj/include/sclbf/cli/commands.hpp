#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sclbf/cli/config.hpp"

namespace sclbf::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 2,  // verification or feasibility failure
    kExitConfig = 3,
    kExitNumerical = 4,    // singularity or non-finite state during simulation
};

int exit_code_for(ErrorCode code);

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<int> grid;
    std::optional<std::vector<double>> k_safe;
};

/// Applies command-line overrides and re-validates. Throws ConfigError.
RunConfig apply_overrides(RunConfig config, const Overrides& o);

int cmd_select_params(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests; args exclude argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sclbf::cli
