#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "tdfc/config.hpp"

namespace tdfc {

/// Exit codes shared by the subcommands: 0 success (and converged /
/// certified where that applies), 1 usage or config error, 2 objective not
/// met (diverged or not certified).
struct CommandOptions {
    std::string out_dir = ".";
    std::optional<int> steps_per_delay; // override
    std::optional<double> horizon;      // override
};

int cmd_design(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
               std::ostream& err);
int cmd_certify(const std::string& design_path, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_sweep(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);

/// Shared helper: design straight from a parsed config.
ControllerDesign design_from_config(const ExperimentConfig& cfg);

} // namespace tdfc
