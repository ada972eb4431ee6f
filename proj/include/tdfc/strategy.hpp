#pragma once

#include <optional>
#include <vector>

#include "tdfc/dde.hpp"
#include "tdfc/gain.hpp"
#include "tdfc/systems.hpp"

namespace tdfc {

/// Two-stage chaos control: run free until the trajectory enters the
/// delta-ball of the target equilibrium (earliest grid time >= 2 tau), then
/// activate the periodic gain with that offset.
struct StrategyConfig {
    ControllerDesign design;
    Vector target;          // x*, an equilibrium of the system
    double delta = 0.0;     // Euclidean activation radius
    double max_wait = 500.0;
    double settle_tol = 1e-3;
};

struct RunMetrics {
    std::optional<double> wait_time;     // t*, none if the ball was never hit
    bool converged = false;              // ||x - x*|| < settle_tol sustained to T
    std::optional<double> settling_time; // first such time
    double max_control_norm = 0.0;
    bool exited_ball_after_activation = false;
    bool diverged = false;
};

struct StrategyRun {
    Trajectory trajectory;
    RunMetrics metrics;
};

StrategyRun run_strategy(const SystemModel& system, const StrategyConfig& cfg,
                         const Vector& initial, double h, double T);

struct SweepRow {
    double delta = 0.0;
    RunMetrics metrics;
};

/// One strategy run per delta on a monotone grid; the free-run prefix is
/// computed once and shared.
std::vector<SweepRow> delta_sweep(const SystemModel& system, const StrategyConfig& base,
                                  const std::vector<double>& deltas, const Vector& initial,
                                  double h, double T);

RunMetrics compute_metrics(const Trajectory& trajectory, const Vector& target,
                           std::optional<double> wait_time, double delta, double settle_tol);

} // namespace tdfc
