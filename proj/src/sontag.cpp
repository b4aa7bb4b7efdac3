#include "sclbf/sontag.hpp"

#include <cmath>

namespace sclbf {

double sontag_universal(double a, double b) {
    if (std::abs(b) < 1e-12 * (1.0 + std::abs(a))) return 0.0;
    const double b2 = b * b;
    const double root = std::sqrt(a * a + b2 * b2);
    // For a < 0 the numerator cancels; use a + root = b^4 / (root - a).
    if (a < 0.0) return -b2 * b / (root - a);
    return -(a + root) / b;
}

Vec2 decoupled_drift(double kp, double kd, const Vec2& x, DriftSign sign) {
    const double s = sign == DriftSign::ClosedLoop ? -1.0 : 1.0;
    return {x[1], s * (kp * x[0] + kd * x[1])};
}

LieValues subsystem_lie_values(const WeakClbf& w, const Vec2& xbar, double kp, double kd, DriftSign sign) {
    const Vec2 grad = clbf_grad(w, xbar);
    return {grad.dot(decoupled_drift(kp, kd, xbar, sign)), grad[1]};
}

double safe_aux_input(const WeakClbf& w, const Vec2& xbar, double kp, double kd, double k_safe, DriftSign sign) {
    if (k_safe < 0.0) throw Error(ErrorCode::InvalidArgument, "k_safe must be non-negative");
    const LieValues lie = subsystem_lie_values(w, xbar, kp, kd, sign);
    return k_safe * sontag_universal(lie.a, lie.b);
}

}  // namespace sclbf
