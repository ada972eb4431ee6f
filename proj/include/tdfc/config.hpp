#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tdfc/gain.hpp"
#include "tdfc/systems.hpp"

namespace tdfc {

class ConfigError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Per-mode target as written in a config file; theta_auto means
/// arctan(omega/mu) is resolved at synthesis time.
struct TargetSpec {
    int mode = 0;
    bool is_complex = false;
    double zeta = 0.0;
    double rho = 0.0;
    bool theta_auto = false;
    double theta = 0.0;

    bool operator==(const TargetSpec&) const = default;
};

/// Flat key = value experiment description. Parsed keys carry their line
/// numbers so validation errors can point at the offending line.
struct ExperimentConfig {
    std::string label;
    std::string system; // chua | rossler | linear

    std::optional<double> alpha, beta, gamma, m0, m1; // chua
    std::optional<double> a, b, c;                    // rossler
    std::optional<int> dim;                           // linear
    std::vector<double> matrix;                       // linear, row-major

    std::variant<std::monostate, int, std::vector<double>> equilibrium;
    std::optional<double> tau;
    std::vector<TargetSpec> targets;
    std::optional<double> delta;
    std::vector<double> delta_grid;
    std::vector<double> initial;
    std::optional<double> horizon;
    std::optional<int> steps_per_delay;
    double max_wait = 500.0;
    double settle_tol = 1e-3;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text, const std::string& default_label = "");
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Instantiate the configured system (with parameter overrides applied).
SystemModel build_system(const ExperimentConfig& cfg);

/// Resolve the configured equilibrium (by index or explicit point).
Vector resolve_equilibrium(const ExperimentConfig& cfg, const SystemModel& system);

std::vector<ModeTarget> mode_targets(const ExperimentConfig& cfg);

/// Design file round-trip (JSON, full precision).
std::string design_to_json(const ControllerDesign& design);
ControllerDesign design_from_json(const std::string& text);

} // namespace tdfc
