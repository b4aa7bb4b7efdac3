#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sclbf/manipulator.hpp"
#include "sclbf/safe_fl.hpp"

namespace sclbf {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 10.0;
    int record_stride = 1;

    void validate() const;  // 0 < dt <= 1e-2, horizon > 0, stride >= 1
    long step_count() const;  // ceil(horizon / dt)
};

using StateField = std::function<VecX(double, const VecX&)>;

/// Classical fourth-order Runge-Kutta step. Throws NonFiniteState if any
/// stage or the result is not finite.
VecX rk4_step(const StateField& field, double t, const VecX& x, double dt);

struct TrajectoryPoint {
    double t = 0.0;
    VecX state;
    VecX xbar;  // stacked transformed state
    std::vector<double> w_values;
    bool safe = true;
    // Manipulator quantities; zero for plain subsystem runs.
    Vec2 p = Vec2::Zero(), v = Vec2::Zero();
    Vec2 torque = Vec2::Zero(), force = Vec2::Zero(), force_safe = Vec2::Zero(), phi = Vec2::Zero();
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    VecX constraint_offsets;  // d_i, safe iff xbar_1i > d_i
};

struct SimFailure {
    ErrorCode code;
    double t;
    std::string message;
};

struct SimResult {
    Trajectory trajectory;
    std::optional<SimFailure> failure;

    bool ok() const { return !failure.has_value(); }
};

/// Plant and controller composed into an autonomous vector field.
class ClosedLoop {
public:
    virtual ~ClosedLoop() = default;
    virtual VecX derivative(double t, const VecX& x) const = 0;
    virtual TrajectoryPoint observe(double t, const VecX& x) const = 0;
    virtual VecX constraint_offsets() const = 0;
};

/// Joint-space arm driven by the task-space controller through tau = J^T F.
class ManipulatorLoop : public ClosedLoop {
public:
    explicit ManipulatorLoop(TaskController controller) : ctl_(std::move(controller)) {}

    VecX derivative(double t, const VecX& x) const override;
    TrajectoryPoint observe(double t, const VecX& x) const override;
    VecX constraint_offsets() const override;

    static VecX pack(const JointState& s);
    static JointState unpack(const VecX& x);
    const TaskController& controller() const { return ctl_; }

private:
    TaskController ctl_;
};

/// One decoupled subsystem x1' = x2, x2' = -kp x1 - kd x2 + a_safe.
class SubsystemLoop : public ClosedLoop {
public:
    SubsystemLoop(SubsystemGains gains, std::optional<WeakClbf> clbf, double d);

    VecX derivative(double t, const VecX& x) const override;
    TrajectoryPoint observe(double t, const VecX& x) const override;
    VecX constraint_offsets() const override;

private:
    double aux_input(const Vec2& x) const;

    SubsystemGains gains_;
    std::optional<WeakClbf> clbf_;
    double d_;
};

/// Integrates with fixed-step RK4 and samples the controller at every step.
/// NearSingular / NonFiniteState stop the run and are returned as failure
/// metadata alongside the partial trajectory.
SimResult simulate_closed_loop(const ClosedLoop& loop, const VecX& x0, const SimConfig& config);

/// Runs independent jobs concurrently; results come back in input order.
std::vector<SimResult> run_batch(const std::vector<std::function<SimResult()>>& jobs);

struct MonitorReport {
    double min_margin = 0.0;
    Eigen::VectorXd min_margin_per_constraint;
    std::optional<double> first_violation_time;
    std::vector<std::vector<double>> w_dot;  // [subsystem][sample]
    std::vector<double> phi_norm;
    std::vector<double> force_safe_norm;
};

MonitorReport safety_monitor(const Trajectory& traj);

}  // namespace sclbf
