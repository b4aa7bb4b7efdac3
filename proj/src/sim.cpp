#include "sclbf/sim.hpp"

#include <cmath>
#include <future>
#include <limits>

namespace sclbf {

void SimConfig::validate() const {
    if (!(dt > 0.0) || dt > 1e-2) throw Error(ErrorCode::ConfigError, "dt must lie in (0, 1e-2]");
    if (!(horizon > 0.0)) throw Error(ErrorCode::ConfigError, "horizon must be positive");
    if (record_stride < 1) throw Error(ErrorCode::ConfigError, "record stride must be >= 1");
}

long SimConfig::step_count() const { return static_cast<long>(std::ceil(horizon / dt - 1e-9)); }

VecX rk4_step(const StateField& field, double t, const VecX& x, double dt) {
    auto checked = [](VecX v) {
        if (!v.allFinite()) throw Error(ErrorCode::NonFiniteState, "integrator stage produced a non-finite value");
        return v;
    };
    const VecX k1 = checked(field(t, x));
    const VecX k2 = checked(field(t + 0.5 * dt, x + 0.5 * dt * k1));
    const VecX k3 = checked(field(t + 0.5 * dt, x + 0.5 * dt * k2));
    const VecX k4 = checked(field(t + dt, x + dt * k3));
    return checked(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

namespace {

bool constraints_hold(const VecX& xbar, const VecX& offsets) {
    for (int i = 0; i < offsets.size(); ++i)
        if (!(xbar[i] > offsets[i])) return false;
    return true;
}

}  // namespace

VecX ManipulatorLoop::pack(const JointState& s) {
    VecX x(4);
    x << s.q, s.qdot;
    return x;
}

JointState ManipulatorLoop::unpack(const VecX& x) { return {x.head<2>(), x.tail<2>()}; }

VecX ManipulatorLoop::derivative(double, const VecX& x) const {
    const JointState s = unpack(x);
    const ControlOutput u = safe_task_controller(ctl_, s);
    VecX dx(4);
    dx << s.qdot, joint_acceleration(ctl_.params, s, u.torque);
    return dx;
}

TrajectoryPoint ManipulatorLoop::observe(double t, const VecX& x) const {
    const JointState s = unpack(x);
    const ControlOutput u = safe_task_controller(ctl_, s);
    const TaskState ts = task_state(ctl_.params, s);
    TrajectoryPoint pt;
    pt.t = t;
    pt.state = x;
    pt.xbar = u.xbar;
    pt.w_values = u.w_values;
    pt.safe = constraints_hold(u.xbar, constraint_offsets());
    pt.p = ts.p;
    pt.v = ts.v;
    pt.torque = u.torque;
    pt.force = u.force;
    pt.force_safe = u.force_safe;
    pt.phi = u.phi;
    return pt;
}

VecX ManipulatorLoop::constraint_offsets() const {
    return ctl_.offsets;
}

SubsystemLoop::SubsystemLoop(SubsystemGains gains, std::optional<WeakClbf> clbf, double d)
    : gains_(gains), clbf_(std::move(clbf)), d_(d) {}

double SubsystemLoop::aux_input(const Vec2& x) const {
    if (!clbf_ || gains_.k_safe == 0.0) return 0.0;
    return safe_aux_input(*clbf_, x, gains_.kp, gains_.kd, gains_.k_safe);
}

VecX SubsystemLoop::derivative(double, const VecX& x) const {
    const Vec2 s = x.head<2>();
    VecX dx(2);
    dx << s[1], -gains_.kp * s[0] - gains_.kd * s[1] + aux_input(s);
    return dx;
}

TrajectoryPoint SubsystemLoop::observe(double t, const VecX& x) const {
    TrajectoryPoint pt;
    pt.t = t;
    pt.state = x;
    pt.xbar = x;
    if (clbf_) pt.w_values.push_back(clbf_eval(*clbf_, x.head<2>()));
    pt.safe = x[0] > d_;
    return pt;
}

VecX SubsystemLoop::constraint_offsets() const { return VecX::Constant(1, d_); }

SimResult simulate_closed_loop(const ClosedLoop& loop, const VecX& x0, const SimConfig& config) {
    config.validate();
    SimResult result;
    result.trajectory.constraint_offsets = loop.constraint_offsets();
    const long steps = config.step_count();
    result.trajectory.points.reserve(static_cast<std::size_t>(steps / config.record_stride + 2));

    const StateField field = [&loop](double t, const VecX& x) { return loop.derivative(t, x); };
    VecX x = x0;
    long n = 0;
    try {
        for (; n <= steps; ++n) {
            const double t = static_cast<double>(n) * config.dt;
            if (n % config.record_stride == 0 || n == steps) result.trajectory.points.push_back(loop.observe(t, x));
            if (n == steps) break;
            x = rk4_step(field, t, x, config.dt);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NearSingular && e.code() != ErrorCode::NonFiniteState) throw;
        result.failure = SimFailure{e.code(), static_cast<double>(n) * config.dt, e.what()};
    }
    return result;
}

std::vector<SimResult> run_batch(const std::vector<std::function<SimResult()>>& jobs) {
    std::vector<std::future<SimResult>> futures;
    futures.reserve(jobs.size());
    for (const auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
    std::vector<SimResult> out;
    out.reserve(jobs.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

MonitorReport safety_monitor(const Trajectory& traj) {
    if (traj.points.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    const auto m = traj.constraint_offsets.size();
    MonitorReport r;
    r.min_margin_per_constraint = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    for (const auto& pt : traj.points) {
        for (Eigen::Index i = 0; i < m; ++i)
            r.min_margin_per_constraint[i] =
                std::min(r.min_margin_per_constraint[i], pt.xbar[i] - traj.constraint_offsets[i]);
        if (!pt.safe && !r.first_violation_time) r.first_violation_time = pt.t;
        r.phi_norm.push_back(pt.phi.norm());
        r.force_safe_norm.push_back(pt.force_safe.norm());
    }
    r.min_margin = m > 0 ? r.min_margin_per_constraint.minCoeff() : std::numeric_limits<double>::infinity();

    const auto& pts = traj.points;
    const std::size_t subsystems = pts.front().w_values.size();
    r.w_dot.assign(subsystems, std::vector<double>(pts.size(), 0.0));
    if (pts.size() >= 2) {
        for (std::size_t s = 0; s < subsystems; ++s) {
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const std::size_t lo = k == 0 ? 0 : k - 1;
                const std::size_t hi = k + 1 == pts.size() ? k : k + 1;
                r.w_dot[s][k] = (pts[hi].w_values[s] - pts[lo].w_values[s]) / (pts[hi].t - pts[lo].t);
            }
        }
    }
    return r;
}

}  // namespace sclbf
