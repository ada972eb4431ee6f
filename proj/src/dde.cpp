#include "tdfc/dde.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tdfc {

Matrix GainSchedule::gain_at(double t) const {
    Matrix zero = Matrix::Zero(K.rows(), K.cols());
    if (never_active() || t < activation_time) return zero;
    const double s = t - activation_time;
    const double period = 3.0 * tau;
    const double r = s - period * std::floor(s / period);
    return r >= 2.0 * tau ? K : zero;
}

namespace {

long aligned_steps(double value, double h, const char* what) {
    const double ratio = value / h;
    const long steps = std::lround(ratio);
    if (steps < 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-6)
        throw std::invalid_argument(std::string("dde: ") + what +
                                    " is not aligned with the step grid");
    return steps;
}

} // namespace

Stepper::Stepper(const SystemModel& system, GainSchedule schedule, History history, double h)
    : system_(&system), K_(std::move(schedule.K)), h_(h) {
    if (!(h > 0.0)) throw std::invalid_argument("dde: step size must be positive");
    if (!(schedule.tau > 0.0)) throw std::invalid_argument("dde: tau must be positive");
    m_ = aligned_steps(schedule.tau, h, "tau (need h = tau/m)");
    if (m_ < 10) throw std::invalid_argument("dde: need at least 10 steps per delay");
    if (K_.rows() != system.dim || K_.cols() != system.dim)
        throw std::invalid_argument("dde: gain dimension mismatch");
    if (history.x0.size() != system.dim)
        throw std::invalid_argument("dde: history dimension mismatch");
    if (!history.x0.allFinite())
        throw std::invalid_argument("dde: history must be finite");

    activation_index_ = schedule.never_active()
                            ? std::numeric_limits<long>::max()
                            : aligned_steps(schedule.activation_time, h, "activation time");

    states_.push_back(history.x0);
    controls_.push_back(control_term(0));
    derivs_.push_back(system_->rhs(states_[0]) + controls_[0]);
    active_.push_back(gain_on(0) ? 1 : 0);
}

bool Stepper::gain_on(long i) const {
    if (i < activation_index_) return false;
    return (i - activation_index_) % (3 * m_) >= 2 * m_;
}

void Stepper::activate_now() {
    if (activation_index_ != std::numeric_limits<long>::max())
        throw std::logic_error("dde: schedule already activated");
    activation_index_ = static_cast<long>(index());
    // phase 0 starts with the off window, so the stored sample at the
    // activation index is unchanged
}

Vector Stepper::delayed(long j) const {
    if (j <= 0) return states_[0];
    return states_[static_cast<std::size_t>(j)];
}

Vector Stepper::delayed_mid(long j) const {
    if (j + 1 <= 0) return states_[0]; // constant history
    const Vector& xa = states_[static_cast<std::size_t>(j)];
    const Vector& xb = states_[static_cast<std::size_t>(j + 1)];
    const Vector& da = derivs_[static_cast<std::size_t>(j)];
    Vector db = derivs_[static_cast<std::size_t>(j + 1)];
    if (gain_on(j + 1) != gain_on(j)) {
        // right-node derivative consistent with this interval's gain value
        db = system_->rhs(xb);
        if (gain_on(j)) db += K_ * (delayed(j + 1 - 2 * m_) - delayed(j + 1 - m_));
    }
    return 0.5 * (xa + xb) + (h_ / 8.0) * (da - db);
}

Vector Stepper::control_term(long i) const {
    if (!gain_on(i)) return Vector::Zero(system_->dim);
    return K_ * (delayed(i - 2 * m_) - delayed(i - m_));
}

Vector Stepper::control_diff_mid(long i) const {
    return delayed_mid(i - 2 * m_) - delayed_mid(i - m_);
}

bool Stepper::step() {
    if (diverged_) return false;
    const long i = static_cast<long>(index());
    const Vector& x = states_.back();
    const bool on = gain_on(i);

    const Vector& k1 = derivs_.back(); // f(x_i) + u(t_i) with this interval's gain
    Vector u_mid = on ? Vector(K_ * control_diff_mid(i)) : Vector::Zero(system_->dim);
    Vector k2 = system_->rhs(x + 0.5 * h_ * k1) + u_mid;
    Vector k3 = system_->rhs(x + 0.5 * h_ * k2) + u_mid;
    Vector u_end = on ? Vector(K_ * (delayed(i + 1 - 2 * m_) - delayed(i + 1 - m_)))
                      : Vector::Zero(system_->dim);
    Vector k4 = system_->rhs(x + h_ * k3) + u_end;
    Vector next = x + (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceCap) {
        diverged_ = true;
        return false;
    }
    states_.push_back(std::move(next));
    controls_.push_back(control_term(i + 1));
    derivs_.push_back(system_->rhs(states_.back()) + controls_.back());
    active_.push_back(gain_on(i + 1) ? 1 : 0);
    return true;
}

Trajectory Stepper::trajectory() const {
    Trajectory out;
    out.t0 = 0.0;
    out.h = h_;
    out.states = states_;
    out.controls = controls_;
    out.active = active_;
    out.diverged = diverged_;
    return out;
}

Trajectory integrate(const SystemModel& system, const GainSchedule& schedule,
                     const History& history, double h, double T) {
    if (!(T >= 0.0)) throw std::invalid_argument("dde: horizon must be non-negative");
    Stepper stepper(system, schedule, history, h);
    const long steps = aligned_steps(T, h, "horizon (need T multiple of h)");
    for (long i = 0; i < steps; ++i)
        if (!stepper.step()) break;
    return stepper.trajectory();
}

OrderEstimate order_check(const SystemModel& system, const GainSchedule& schedule,
                          const History& history, double h, double T) {
    const Trajectory t1 = integrate(system, schedule, history, h, T);
    const Trajectory t2 = integrate(system, schedule, history, h / 2.0, T);
    const Trajectory t4 = integrate(system, schedule, history, h / 4.0, T);

    OrderEstimate est;
    if (t1.diverged || t2.diverged || t4.diverged) {
        est.note = "trajectory diverged; no order estimate";
        return est;
    }
    const double e1 = (t1.states.back() - t2.states.back()).norm();
    const double e2 = (t2.states.back() - t4.states.back()).norm();
    const double floor_ = 64.0 * std::numeric_limits<double>::epsilon() *
                          (1.0 + t4.states.back().norm());
    if (e2 < floor_ || e1 < floor_) {
        est.note = "refinement error at roundoff floor; exponent check skipped";
        return est;
    }
    est.exponent = std::log2(e1 / e2);
    est.valid = true;
    return est;
}

void write_csv(const Trajectory& trajectory, std::ostream& out) {
    const int n = trajectory.states.empty() ? 0 : static_cast<int>(trajectory.states[0].size());
    out << "t";
    for (int j = 1; j <= n; ++j) out << ",x" << j;
    for (int j = 1; j <= n; ++j) out << ",u" << j;
    out << ",active\n";
    char buf[32];
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.15g", trajectory.time_at(i));
        out << buf;
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.15g", trajectory.states[i](j));
            out << ',' << buf;
        }
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.15g", trajectory.controls[i](j));
            out << ',' << buf;
        }
        out << ',' << (trajectory.active[i] ? 1 : 0) << '\n';
    }
}

} // namespace tdfc
