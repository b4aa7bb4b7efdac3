#pragma once

#include "sclbf/clbf.hpp"

namespace sclbf {

/// Sontag's universal formula for a scalar input:
/// -(a + sqrt(a^2 + b^4)) / b when b != 0, else 0.
/// |b| < 1e-12 (1 + |a|) counts as zero.
double sontag_universal(double a, double b);

/// Sign convention of the drift used for L_F W of a decoupled subsystem.
/// ClosedLoop is (x2, -kp x1 - kd x2), the field the subsystem actually
/// follows; AsPrinted flips the feedback signs and is kept for comparison.
enum class DriftSign { ClosedLoop, AsPrinted };

Vec2 decoupled_drift(double kp, double kd, const Vec2& x, DriftSign sign = DriftSign::ClosedLoop);

struct LieValues {
    double a;  // L_F W
    double b;  // L_G W with G = (0, 1)
};

LieValues subsystem_lie_values(const WeakClbf& w, const Vec2& xbar, double kp, double kd,
                               DriftSign sign = DriftSign::ClosedLoop);

/// Auxiliary safety input k_safe * kappa(L_F W, L_G W) of one constrained
/// subsystem. Unconstrained subsystems use 0 and never call this.
double safe_aux_input(const WeakClbf& w, const Vec2& xbar, double kp, double kd, double k_safe,
                      DriftSign sign = DriftSign::ClosedLoop);

}  // namespace sclbf
