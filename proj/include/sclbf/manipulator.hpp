#pragma once

#include <vector>

#include "sclbf/clbf.hpp"
#include "sclbf/safe_fl.hpp"

namespace sclbf {

/// Planar two-link arm. g may be zero (used for conservation checks).
struct ManipulatorParams {
    double m1 = 0.8;
    double m2 = 0.8;
    double l1 = 1.0;
    double l2 = 1.0;
    double g = 9.81;

    void validate() const;
};

struct JointState {
    Vec2 q;     // (theta1, theta2), rad
    Vec2 qdot;  // rad/s
};

struct TaskState {
    Vec2 p;  // end-effector position, m
    Vec2 v;  // m/s
};

Mat2 mass_matrix(const ManipulatorParams& prm, const Vec2& q);
Vec2 coriolis_vector(const ManipulatorParams& prm, const Vec2& q, const Vec2& qdot);
Vec2 gravity_vector(const ManipulatorParams& prm, const Vec2& q);
Vec2 forward_kinematics(const ManipulatorParams& prm, const Vec2& q);
Mat2 jacobian(const ManipulatorParams& prm, const Vec2& q);
Mat2 jacobian_dot(const ManipulatorParams& prm, const Vec2& q, const Vec2& qdot);

TaskState task_state(const ManipulatorParams& prm, const JointState& s);

/// Joint acceleration of M q'' + c + g = tau.
Vec2 joint_acceleration(const ManipulatorParams& prm, const JointState& s, const Vec2& tau);

enum class Elbow { Positive, Negative };  // sign of theta2

/// Closed-form inverse kinematics; throws InvalidArgument when p is out of reach.
JointState inverse_kinematics(const ManipulatorParams& prm, const TaskState& t, Elbow elbow = Elbow::Positive);

struct TaskSpaceTerms {
    Mat2 mass;  // M_p = J^-T M J^-1
    Vec2 coriolis;  // c_p = -M_p Jdot qdot + J^-T c
    Vec2 gravity;   // g_p = J^-T g
};

double singularity_threshold(const ManipulatorParams& prm);

/// Throws NearSingular when |det J| <= 1e-4 L1 L2.
TaskSpaceTerms task_space_terms(const ManipulatorParams& prm, const Vec2& q, const Vec2& qdot);

/// Sign pattern of the regulation error: x1 = S (p - p_d), x2 = S v with
/// S = diag(-1, 1), so both constraints read xbar_1i > d_i.
Mat2 task_sign_matrix();

/// Task constraints p1 < -d_hat1 and p2 > d_hat2 written as xbar_1i > d_i.
struct TaskConstraints {
    Vec2 d_hat;

    Vec2 offsets(const Vec2& goal) const;  // (d_hat1 + p_d1, d_hat2 - p_d2)
    Vec2 margins(const Vec2& p) const;     // (-d_hat1 - p1, p2 - d_hat2), positive when safe
};

struct TaskRegion {
    double p1_min, p1_max;
    double p2_min, p2_max;
    double v1_min, v1_max;
    double v2_min, v2_max;
};

/// Per-subsystem boxes in transformed coordinates.
std::vector<RegionBox> subsystem_regions(const TaskRegion& region, const Vec2& goal);

/// Stacked transformed state (x1_1, x1_2, x2_1, x2_2).
VecX task_error_state(const TaskState& t, const Vec2& goal);

struct TaskController {
    ManipulatorParams params;
    Vec2 goal;
    DecouplingTransform transform;  // identity for the Cartesian constraints
    VecX offsets;                   // d_i of the transformed constraints
    MatX gain_matrix;               // K, 2 x 4
    GainSchedule gains;
    std::vector<WeakClbf> clbfs;
    DriftSign drift_sign = DriftSign::ClosedLoop;
};

TaskController make_task_controller(const ManipulatorParams& params, const Vec2& goal,
                                    const TaskConstraints& constraints, const GainSchedule& gains,
                                    std::vector<WeakClbf> clbfs, DriftSign sign = DriftSign::ClosedLoop);

struct ControlOutput {
    Vec2 force;        // F = phi + F_safe
    Vec2 torque;       // J^T F
    Vec2 phi;          // feedback-linearizing part
    Vec2 force_safe;   // M_p S a_safe
    VecX xbar;
    std::vector<double> w_values;
    VecX a_safe;
};

ControlOutput safe_task_controller(const TaskController& ctl, const JointState& s);

}  // namespace sclbf
