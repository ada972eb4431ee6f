#include "tdfc/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdfc {

RunMetrics compute_metrics(const Trajectory& traj, const Vector& target,
                           std::optional<double> wait_time, double delta, double settle_tol) {
    RunMetrics m;
    m.wait_time = wait_time;
    m.diverged = traj.diverged;

    std::vector<double> dist(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) dist[i] = (traj.states[i] - target).norm();
    for (const Vector& u : traj.controls) m.max_control_norm = std::max(m.max_control_norm, u.norm());

    if (wait_time) {
        const std::size_t act = static_cast<std::size_t>(std::lround(*wait_time / traj.h));
        for (std::size_t i = act; i < traj.size(); ++i)
            if (dist[i] > delta) { m.exited_ball_after_activation = true; break; }
    }

    if (!traj.diverged && !traj.states.empty()) {
        std::size_t first_settled = traj.size();
        for (std::size_t i = traj.size(); i-- > 0;) {
            if (dist[i] >= settle_tol) break;
            first_settled = i;
        }
        if (first_settled < traj.size()) {
            m.settling_time = traj.time_at(first_settled);
            m.converged = true;
        }
    }
    return m;
}

namespace {

void validate(const SystemModel& system, const StrategyConfig& cfg, const Vector& initial) {
    if (cfg.target.size() != system.dim || initial.size() != system.dim)
        throw std::invalid_argument("run_strategy: dimension mismatch");
    if (!(cfg.delta > 0.0)) throw std::invalid_argument("run_strategy: delta must be positive");
    if (system.rhs(cfg.target).norm() > 1e-8)
        throw std::invalid_argument("run_strategy: target is not an equilibrium of the system");
}

} // namespace

StrategyRun run_strategy(const SystemModel& system, const StrategyConfig& cfg,
                         const Vector& initial, double h, double T) {
    validate(system, cfg, initial);
    GainSchedule free_schedule{cfg.design.K, cfg.design.tau, GainSchedule::kNever};
    Stepper stepper(system, free_schedule, History{initial}, h);
    const long m = stepper.steps_per_delay();
    const long total = std::lround(T / h);
    const long wait_cap = std::min<long>(total, static_cast<long>(std::floor(cfg.max_wait / h)));
    std::optional<double> wait_time;
    for (long i = 0; i < total; ++i) {
        if (!stepper.step()) break;
        const long idx = static_cast<long>(stepper.index());
        if (!wait_time && idx >= 2 * m && idx <= wait_cap &&
            (stepper.state() - cfg.target).norm() <= cfg.delta) {
            stepper.activate_now();
            wait_time = stepper.time();
        }
    }
    StrategyRun run;
    run.trajectory = stepper.trajectory();
    run.metrics = compute_metrics(run.trajectory, cfg.target, wait_time, cfg.delta,
                                  cfg.settle_tol);
    return run;
}

std::vector<SweepRow> delta_sweep(const SystemModel& system, const StrategyConfig& base,
                                  const std::vector<double>& deltas, const Vector& initial,
                                  double h, double T) {
    if (deltas.empty()) throw std::invalid_argument("delta_sweep: empty delta grid");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0))
            throw std::invalid_argument("delta_sweep: delta values must be positive");
        if (i + 1 < deltas.size() && !(deltas[i] <= deltas[i + 1]))
            throw std::invalid_argument("delta_sweep: delta grid must be monotone increasing");
    }
    StrategyConfig probe = base;
    probe.delta = deltas.front();
    validate(system, probe, initial);

    GainSchedule free_schedule{base.design.K, base.design.tau, GainSchedule::kNever};
    Stepper free_run(system, free_schedule, History{initial}, h);
    const long m = free_run.steps_per_delay();
    const long total = std::lround(T / h);
    const long wait_cap = std::min<long>(total, static_cast<long>(std::floor(base.max_wait / h)));

    std::vector<SweepRow> rows(deltas.size());
    std::vector<bool> pending(deltas.size(), true);
    std::size_t remaining = deltas.size();

    auto finish_run = [&](Stepper runner, double delta, std::optional<double> wait) {
        while (static_cast<long>(runner.index()) < total)
            if (!runner.step()) break;
        const Trajectory traj = runner.trajectory();
        return compute_metrics(traj, base.target, wait, delta, base.settle_tol);
    };

    for (long i = 0; i < total && remaining > 0; ++i) {
        if (!free_run.step()) break;
        const long idx = static_cast<long>(free_run.index());
        if (idx < 2 * m || idx > wait_cap) continue;
        const double dist = (free_run.state() - base.target).norm();
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            if (!pending[d] || dist > deltas[d]) continue;
            pending[d] = false;
            --remaining;
            Stepper branch = free_run; // shared prefix, copied once per delta
            branch.activate_now();
            rows[d].delta = deltas[d];
            rows[d].metrics = finish_run(std::move(branch), deltas[d], free_run.time());
        }
    }
    // never-activated deltas: metrics of the free run
    if (remaining > 0) {
        while (static_cast<long>(free_run.index()) < total)
            if (!free_run.step()) break;
        const Trajectory traj = free_run.trajectory();
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            if (!pending[d]) continue;
            rows[d].delta = deltas[d];
            rows[d].metrics = compute_metrics(traj, base.target, std::nullopt, deltas[d],
                                              base.settle_tol);
            rows[d].metrics.converged = false;
        }
    }
    return rows;
}

} // namespace tdfc
