#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sclbf/numerics.hpp"

namespace sclbf {

/// Axis-aligned region of interest for a scalar second-order subsystem.
struct RegionBox {
    double x1_min, x1_max;
    double x2_min, x2_max;

    RegionBox(double x1_lo, double x1_hi, double x2_lo, double x2_hi);

    bool contains(const Vec2& x) const;
    double diameter() const;
};

/// Unsafe half-plane {x in X : x1 <= d} with d < 0.
struct HalfPlaneUnsafe {
    double d;

    explicit HalfPlaneUnsafe(double d_);
    bool contains(const Vec2& x) const { return x[0] <= d; }
};

/// sigma(x1) = 1 / (1 + exp(l (x1 - d - delta/2))).
struct SigmoidShape {
    double l;
    double d;
    double delta;
};

double sigmoid_eval(const SigmoidShape& shape, double x1);
double sigmoid_slope(const SigmoidShape& shape, double x1);

struct ClfSample {
    double value;
    Vec2 grad;
};

ClfSample clf_eval_grad(const SpdMat2& p, const Vec2& x);

/// Minimum of V = x^T P x / 2 over the half-plane x1 <= d. Throws
/// InvalidUnsafeSet when d >= 0.
double v1_min_on_unsafe(const SpdMat2& p, double d);
Vec2 v1_minimizer(const SpdMat2& p, double d);

struct LevelParams {
    double v1;
    double v2;
    double sigma1;  // sigma(d)
    double sigma2;  // sigma(d + delta)
    double gamma;   // sup of x1 over the region
};

/// W(x) = (1 + theta sigma(x1)) V(x) - k.
///
/// A plain aggregate: select_parameters() is the only constructor that
/// guarantees the weak-CLBF construction inequalities. Hand-edited copies
/// are legitimate inputs to the verifier.
struct WeakClbf {
    SpdMat2 p;
    SigmoidShape shape;
    double theta;
    double k;
    LevelParams levels;
};

double clbf_eval(const WeakClbf& w, const Vec2& x);
Vec2 clbf_grad(const WeakClbf& w, const Vec2& x);

/// Closed-form dW/dx1 restricted to the line p12 x1 + p22 x2 = 0.
double clbf_grad_x1_on_lgw_line(const WeakClbf& w, double x1);

/// Closed-form bounds for the construction parameters at a given (l, delta).
struct ParameterBounds {
    double v1;
    double v2;
    double gamma;
    double l_max;      // 2 / gamma, or +inf when gamma <= 0
    double delta_min;  // (2 / l) ln(v2 / v1)
    double sigma1;
    double sigma2;
    double denominator;  // sigma1 v1 - sigma2 v2
    double theta_min;    // (v2 - v1) / denominator, +inf when denominator <= 0
};

ParameterBounds compute_bounds(const SpdMat2& p, const RegionBox& region, double d, double v2, double l,
                               double delta);

struct ParameterCheck {
    ParameterBounds bounds;
    bool level_ok;  // v2 > v1, i.e. the sublevel set reaches D
    bool l_ok;
    bool delta_ok;
    bool theta_ok;
    bool k_consistent;
    bool all_ok() const { return level_ok && l_ok && delta_ok && theta_ok && k_consistent; }
};

ParameterCheck check_parameters(const WeakClbf& w, const RegionBox& region);

struct MarginPolicy {
    std::optional<double> l;       // default: 2 / gamma
    double delta_slack = 1.05;     // delta = slack * delta_min
    double theta_slack = 1.05;     // theta = slack * theta_min
    double fallback_l_fraction = 0.1;  // gamma <= 0: l = 2 / (fraction * x1 extent)
};

/// Picks (l, delta, theta, k) for the level v2. Throws LevelTooSmall,
/// MarginInfeasible or InvalidUnsafeSet.
WeakClbf select_parameters(const SpdMat2& p, const RegionBox& region, double d, double v2,
                           const MarginPolicy& policy = {});

/// Builds a WeakClbf from explicitly supplied parameters without enforcing
/// the construction bounds. Exactly one of v2 or k must be given; the other
/// follows from k = (1 + theta sigma2) v2.
WeakClbf make_clbf(const SpdMat2& p, const RegionBox& region, double d, double l, double delta, double theta,
                   std::optional<double> v2, std::optional<double> k);

struct ConditionResult {
    std::string id;
    bool pass = true;
    double worst_margin = 0.0;
    std::optional<Vec2> witness;
    std::size_t samples = 0;
};

struct VerificationReport {
    ConditionResult positive_on_unsafe;    // W > 0 on D
    ConditionResult decrease_on_lgw_zero;  // L_F W < 0 where L_G W = 0
    ConditionResult nonempty_sublevel;     // W(0) < 0
    ConditionResult unique_stationary;     // grad W != 0 on U away from 0
    std::optional<ConditionResult> c_omega_subset;
    int grid = 0;
    double eps_origin = 0.0;
    RegionBox region;

    bool all_pass() const;
};

using DriftField = std::function<Vec2(const Vec2&)>;

inline constexpr int kMinGrid = 50;
inline constexpr int kDefaultGrid = 400;

double default_eps_origin(const RegionBox& region);

/// Grid verification of the weak-CLBF conditions. `drift` is the drift F of
/// the subsystem; the input direction is assumed to be (0, g) with g != 0.
/// Failures are reported as data; only GridTooCoarse and InvalidArgument throw.
VerificationReport verify_weak_clbf(const WeakClbf& w, const DriftField& drift, const RegionBox& region,
                                    const HalfPlaneUnsafe& unsafe, int grid = kDefaultGrid,
                                    std::optional<double> eps_origin = std::nullopt);

/// The two points of the boundary of the sublevel set {V <= v2} on x1 = d + delta.
std::vector<Vec2> c_omega_corners(const WeakClbf& w);

/// Samples {x in X : V(x) <= v2, x1 >= d + delta} and asserts W <= 1e-9.
/// Throws EmptyCOmega when no sample lands in the set.
ConditionResult check_c_omega_subset(const WeakClbf& w, const RegionBox& region, int grid = 200);

enum class UnsafeSide { AtMost, AtLeast };

struct NormalizedConstraint {
    HalfPlaneUnsafe unsafe;
    bool flipped;
};

/// Rewrites an unsafe set x1 <= d_raw or x1 >= d_raw into the canonical form
/// x1 <= d with d < 0, flipping coordinates (x -> -x) for the AtLeast case.
NormalizedConstraint normalize_constraint(UnsafeSide side, double d_raw);

}  // namespace sclbf
