#include "sclbf/manipulator.hpp"

#include <cmath>

namespace sclbf {

void ManipulatorParams::validate() const {
    if (!(m1 > 0.0) || !(m2 > 0.0) || !(l1 > 0.0) || !(l2 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "link masses and lengths must be positive");
    if (!(g >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gravity must be non-negative");
}

Mat2 mass_matrix(const ManipulatorParams& prm, const Vec2& q) {
    const double c2 = std::cos(q[1]);
    const double m11 = prm.m1 * prm.l1 * prm.l1 +
                       prm.m2 * (prm.l1 * prm.l1 + 2.0 * prm.l1 * prm.l2 * c2 + prm.l2 * prm.l2);
    const double m12 = prm.m2 * (prm.l1 * prm.l2 * c2 + prm.l2 * prm.l2);
    const double m22 = prm.m2 * prm.l2 * prm.l2;
    Mat2 m;
    m << m11, m12, m12, m22;
    return m;
}

Vec2 coriolis_vector(const ManipulatorParams& prm, const Vec2& q, const Vec2& qdot) {
    const double h = prm.m2 * prm.l1 * prm.l2 * std::sin(q[1]);
    return {-h * (2.0 * qdot[0] * qdot[1] + qdot[1] * qdot[1]), h * qdot[0] * qdot[0]};
}

Vec2 gravity_vector(const ManipulatorParams& prm, const Vec2& q) {
    const double c1 = std::cos(q[0]);
    const double c12 = std::cos(q[0] + q[1]);
    const double second = prm.m2 * prm.g * prm.l2 * c12;
    return {(prm.m1 + prm.m2) * prm.l1 * prm.g * c1 + second, second};
}

Vec2 forward_kinematics(const ManipulatorParams& prm, const Vec2& q) {
    const double a = q[0], b = q[0] + q[1];
    return {prm.l1 * std::cos(a) + prm.l2 * std::cos(b), prm.l1 * std::sin(a) + prm.l2 * std::sin(b)};
}

Mat2 jacobian(const ManipulatorParams& prm, const Vec2& q) {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s12 = std::sin(q[0] + q[1]), c12 = std::cos(q[0] + q[1]);
    Mat2 j;
    j << -prm.l1 * s1 - prm.l2 * s12, -prm.l2 * s12,
          prm.l1 * c1 + prm.l2 * c12,  prm.l2 * c12;
    return j;
}

Mat2 jacobian_dot(const ManipulatorParams& prm, const Vec2& q, const Vec2& qdot) {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s12 = std::sin(q[0] + q[1]), c12 = std::cos(q[0] + q[1]);
    const double w = qdot[0] + qdot[1];
    Mat2 jd;
    jd << -prm.l1 * c1 * qdot[0] - prm.l2 * c12 * w, -prm.l2 * c12 * w,
          -prm.l1 * s1 * qdot[0] - prm.l2 * s12 * w, -prm.l2 * s12 * w;
    return jd;
}

TaskState task_state(const ManipulatorParams& prm, const JointState& s) {
    return {forward_kinematics(prm, s.q), jacobian(prm, s.q) * s.qdot};
}

Vec2 joint_acceleration(const ManipulatorParams& prm, const JointState& s, const Vec2& tau) {
    const Mat2 m = mass_matrix(prm, s.q);
    return m.ldlt().solve(tau - coriolis_vector(prm, s.q, s.qdot) - gravity_vector(prm, s.q));
}

double singularity_threshold(const ManipulatorParams& prm) { return 1e-4 * prm.l1 * prm.l2; }

JointState inverse_kinematics(const ManipulatorParams& prm, const TaskState& t, Elbow elbow) {
    const double r2 = t.p.squaredNorm();
    const double c2 = (r2 - prm.l1 * prm.l1 - prm.l2 * prm.l2) / (2.0 * prm.l1 * prm.l2);
    if (c2 < -1.0 || c2 > 1.0) throw Error(ErrorCode::InvalidArgument, "end-effector position out of reach");
    const double th2 = (elbow == Elbow::Positive ? 1.0 : -1.0) * std::acos(c2);
    const double th1 = std::atan2(t.p[1], t.p[0]) - std::atan2(prm.l2 * std::sin(th2), prm.l1 + prm.l2 * c2);
    const Vec2 q(th1, th2);
    const Mat2 j = jacobian(prm, q);
    if (std::abs(j.determinant()) <= singularity_threshold(prm))
        throw Error(ErrorCode::NearSingular, "initial configuration is kinematically singular");
    return {q, j.partialPivLu().solve(t.v)};
}

TaskSpaceTerms task_space_terms(const ManipulatorParams& prm, const Vec2& q, const Vec2& qdot) {
    const Mat2 j = jacobian(prm, q);
    if (std::abs(j.determinant()) <= singularity_threshold(prm))
        throw Error(ErrorCode::NearSingular, "|det J| = " + std::to_string(std::abs(j.determinant())) +
                                                 " at theta2 = " + std::to_string(q[1]));
    const Mat2 j_inv = j.inverse();
    const Mat2 j_inv_t = j_inv.transpose();
    TaskSpaceTerms out;
    out.mass = j_inv_t * mass_matrix(prm, q) * j_inv;
    out.mass = 0.5 * (out.mass + out.mass.transpose()).eval();
    out.coriolis = -out.mass * jacobian_dot(prm, q, qdot) * qdot + j_inv_t * coriolis_vector(prm, q, qdot);
    out.gravity = j_inv_t * gravity_vector(prm, q);
    return out;
}

Mat2 task_sign_matrix() {
    Mat2 s;
    s << -1.0, 0.0, 0.0, 1.0;
    return s;
}

Vec2 TaskConstraints::offsets(const Vec2& goal) const { return {d_hat[0] + goal[0], d_hat[1] - goal[1]}; }

Vec2 TaskConstraints::margins(const Vec2& p) const { return {-d_hat[0] - p[0], p[1] - d_hat[1]}; }

std::vector<RegionBox> subsystem_regions(const TaskRegion& r, const Vec2& goal) {
    return {RegionBox(goal[0] - r.p1_max, goal[0] - r.p1_min, -r.v1_max, -r.v1_min),
            RegionBox(r.p2_min - goal[1], r.p2_max - goal[1], r.v2_min, r.v2_max)};
}

VecX task_error_state(const TaskState& t, const Vec2& goal) {
    const Mat2 s = task_sign_matrix();
    VecX x(4);
    x.head<2>() = s * (t.p - goal);
    x.tail<2>() = s * t.v;
    return x;
}

TaskController make_task_controller(const ManipulatorParams& params, const Vec2& goal,
                                    const TaskConstraints& constraints, const GainSchedule& gains,
                                    std::vector<WeakClbf> clbfs, DriftSign sign) {
    params.validate();
    if (gains.size() != 2) throw Error(ErrorCode::InvalidArgument, "two-link controller needs two gain pairs");
    if (clbfs.size() > 2) throw Error(ErrorCode::InvalidArgument, "at most two constrained subsystems");
    const ConstraintSet cs{MatX::Identity(2, 2), constraints.offsets(goal)};
    DecouplingTransform t = build_transform(cs);
    MatX k = build_gain_matrix(t, gains);
    return TaskController{params, goal, std::move(t), cs.offsets, std::move(k), gains, std::move(clbfs), sign};
}

ControlOutput safe_task_controller(const TaskController& ctl, const JointState& s) {
    const TaskSpaceTerms terms = task_space_terms(ctl.params, s.q, s.qdot);
    const Mat2 sign = task_sign_matrix();
    const VecX x = task_error_state(task_state(ctl.params, s), ctl.goal);

    // In error coordinates x2' = F(x) + G(x) F with G = S M_p^-1 and
    // F(x) = -S M_p^-1 (c_p + g_p); phi = G^-1 (-F(x) - K x).
    const Mat2 g_at_x = sign * terms.mass.inverse();
    const Vec2 kx = ctl.gain_matrix * x;

    ControlOutput out;
    out.xbar = ctl.transform.apply(x);
    out.phi = terms.mass * sign * (-kx) + terms.coriolis + terms.gravity;
    out.a_safe = safe_aux_inputs(ctl.clbfs, out.xbar, ctl.gains, ctl.drift_sign);
    out.force_safe = assemble_u_safe(ctl.transform, g_at_x, out.a_safe);
    out.force = out.phi + out.force_safe;
    out.torque = jacobian(ctl.params, s.q).transpose() * out.force;
    for (int i = 0; i < static_cast<int>(ctl.clbfs.size()); ++i)
        out.w_values.push_back(clbf_eval(ctl.clbfs[i], subsystem_state(out.xbar, i)));
    return out;
}

}  // namespace sclbf
