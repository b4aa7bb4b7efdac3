#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sclbf/clbf.hpp"
#include "sclbf/sontag.hpp"

namespace sclbf {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kConditionLimit = 1e8;

/// Safe set {x : C_i x > d_i for all i}; rows of C are the C_i.
struct ConstraintSet {
    MatX rows;  // m x n
    VecX offsets;

    int count() const { return static_cast<int>(rows.rows()); }
    int dimension() const { return static_cast<int>(rows.cols()); }
};

/// x -> xbar = Phi x with Phi = blkdiag(P, P) and P = [C; D].
struct DecouplingTransform {
    MatX p;       // n x n
    MatX p_inv;
    MatX completion;  // D, (n - m) x n with orthonormal rows
    int constrained = 0;  // m
    double condition_number = 1.0;

    int dimension() const { return static_cast<int>(p.rows()); }
    VecX apply(const VecX& x) const;    // Phi x
    VecX inverse(const VecX& xbar) const;  // Phi^-1 xbar
};

DecouplingTransform build_transform(const ConstraintSet& constraints);

struct SubsystemGains {
    double kp;
    double kd;
    double k_safe = 0.0;
};

/// Per-subsystem gains; k_safe is ignored (treated as zero) for i >= m.
struct GainSchedule {
    std::vector<SubsystemGains> subsystems;

    explicit GainSchedule(std::vector<SubsystemGains> s);
    int size() const { return static_cast<int>(subsystems.size()); }
};

/// K such that -P K Phi^-1 = -[diag(kp) diag(kd)], i.e. n decoupled PD loops in
/// transformed coordinates.
MatX build_gain_matrix(const DecouplingTransform& t, const GainSchedule& gains);

/// u_safe = G^-1 P^-1 a_safe. Throws SingularInputMatrix when G or P is
/// numerically singular (condition number above 1e8).
VecX assemble_u_safe(const DecouplingTransform& t, const MatX& g_at_x, const VecX& a_safe);

/// (xbar_1i, xbar_2i) pair of subsystem i from the stacked transformed state.
Vec2 subsystem_state(const VecX& xbar, int i);

/// a_safe for all n subsystems; entries i >= W_list.size() are zero.
VecX safe_aux_inputs(const std::vector<WeakClbf>& w_list, const VecX& xbar, const GainSchedule& gains,
                     DriftSign sign = DriftSign::ClosedLoop);

struct MembershipResult {
    bool member;
    std::vector<double> w_values;
};

MembershipResult initial_set_membership(const DecouplingTransform& t, const std::vector<WeakClbf>& w_list,
                                        const VecX& x0);

double condition_number(const MatX& m);

}  // namespace sclbf
