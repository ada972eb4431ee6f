#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "tdfc/linalg.hpp"
#include "tdfc/systems.hpp"

namespace tdfc {

/// 3tau-periodic on/off gain. With s = t - t*, the gain is 0 for t < t*
/// and for s mod 3tau in [0, 2tau), and K for s mod 3tau in [2tau, 3tau).
struct GainSchedule {
    static constexpr double kNever = std::numeric_limits<double>::infinity();

    Matrix K;
    double tau = 0.0;
    double activation_time = kNever;

    bool never_active() const { return !(activation_time < kNever); }
    /// Right-continuous gain value at time t (display/test helper; the
    /// integrator schedules on grid indices, never through this).
    Matrix gain_at(double t) const;
};

/// Constant pre-history x(t) = x0 on [t0 - 2tau, t0].
struct History {
    Vector x0;
};

struct Trajectory {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<Vector> states;
    std::vector<Vector> controls;
    std::vector<std::uint8_t> active;
    bool diverged = false;

    std::size_t size() const { return states.size(); }
    double time_at(std::size_t i) const { return t0 + h * static_cast<double>(i); }
};

/// Method-of-steps RK4 stepper for xdot = f(x) + K(t) (x(t-2tau) - x(t-tau))
/// on a grid h = tau/m (m >= 10). Gain switches land exactly on grid
/// indices; delayed stage values come from stored samples, with cubic
/// Hermite interpolation at half-steps. Copyable, so a free-run prefix can
/// be shared between strategy runs.
class Stepper {
 public:
    Stepper(const SystemModel& system, GainSchedule schedule, History history, double h);

    /// Advance one grid step. Returns false once the trajectory has
    /// diverged (state norm above the cap or non-finite).
    bool step();

    /// Activate the schedule with t* at the current grid time. Only valid
    /// while the schedule has not yet activated.
    void activate_now();

    std::size_t index() const { return states_.size() - 1; }
    double time() const { return h_ * static_cast<double>(index()); }
    const Vector& state() const { return states_.back(); }
    bool diverged() const { return diverged_; }
    long steps_per_delay() const { return m_; }

    Trajectory trajectory() const;

    static constexpr double kDivergenceCap = 1e6;

 private:
    bool gain_on(long i) const;
    Vector delayed(long j) const;           // grid sample or history
    Vector delayed_mid(long j) const;       // Hermite value at j + 1/2
    Vector control_term(long i) const;      // K (x(i-2m) - x(i-m)) or 0
    Vector control_diff_mid(long i) const;  // x(i-2m+1/2) - x(i-m+1/2)

    const SystemModel* system_;
    Matrix K_;
    double h_;
    long m_;
    long activation_index_;
    bool diverged_ = false;

    std::vector<Vector> states_;
    std::vector<Vector> derivs_;
    std::vector<Vector> controls_;
    std::vector<std::uint8_t> active_;
};

/// Integrate over [0, T] (T a multiple of h) and return the sampled
/// trajectory. Deterministic: identical inputs give identical samples.
Trajectory integrate(const SystemModel& system, const GainSchedule& schedule,
                     const History& history, double h, double T);

struct OrderEstimate {
    double exponent = 0.0;
    bool valid = false;
    std::string note;
};

/// Richardson convergence exponent from runs at h, h/2 and h/4, using the
/// final-state error. Meaningful on problems that are smooth over [0, T].
OrderEstimate order_check(const SystemModel& system, const GainSchedule& schedule,
                          const History& history, double h, double T);

/// CSV export: header t,x1..xn,u1..un,active, 15 significant digits.
void write_csv(const Trajectory& trajectory, std::ostream& out);

} // namespace tdfc
