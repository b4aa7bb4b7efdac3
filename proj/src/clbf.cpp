#include "sclbf/clbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sclbf {

namespace {

constexpr double kExponentClamp = 700.0;
constexpr double kCOmegaTol = 1e-9;

double grid_coord(double lo, double hi, int i, int n) {
    if (i == n - 1) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

RegionBox::RegionBox(double x1_lo, double x1_hi, double x2_lo, double x2_hi)
    : x1_min(x1_lo), x1_max(x1_hi), x2_min(x2_lo), x2_max(x2_hi) {
    if (!(x1_lo < x1_hi) || !(x2_lo < x2_hi))
        throw Error(ErrorCode::InvalidArgument, "region bounds must satisfy lower < upper");
    if (!contains(Vec2::Zero())) throw Error(ErrorCode::InvalidArgument, "region must contain the origin");
}

bool RegionBox::contains(const Vec2& x) const {
    return x[0] >= x1_min && x[0] <= x1_max && x[1] >= x2_min && x[1] <= x2_max;
}

double RegionBox::diameter() const { return std::hypot(x1_max - x1_min, x2_max - x2_min); }

HalfPlaneUnsafe::HalfPlaneUnsafe(double d_) : d(d_) {
    if (!(d_ < 0.0)) throw Error(ErrorCode::InvalidUnsafeSet, "unsafe half-plane requires d < 0");
}

double sigmoid_eval(const SigmoidShape& shape, double x1) {
    const double e = std::clamp(shape.l * (x1 - shape.d - 0.5 * shape.delta), -kExponentClamp, kExponentClamp);
    return 1.0 / (1.0 + std::exp(e));
}

double sigmoid_slope(const SigmoidShape& shape, double x1) {
    const double s = sigmoid_eval(shape, x1);
    return -shape.l * s * (1.0 - s);
}

ClfSample clf_eval_grad(const SpdMat2& p, const Vec2& x) {
    const Vec2 px = p.matrix() * x;
    return {0.5 * x.dot(px), px};
}

double v1_min_on_unsafe(const SpdMat2& p, double d) {
    const HalfPlaneUnsafe unsafe(d);
    return p.det() * unsafe.d * unsafe.d / (2.0 * p(1, 1));
}

Vec2 v1_minimizer(const SpdMat2& p, double d) {
    const HalfPlaneUnsafe unsafe(d);
    return {unsafe.d, -(p(0, 1) / p(1, 1)) * unsafe.d};
}

double clbf_eval(const WeakClbf& w, const Vec2& x) {
    const double v = 0.5 * x.dot(w.p.matrix() * x);
    return (1.0 + w.theta * sigmoid_eval(w.shape, x[0])) * v - w.k;
}

Vec2 clbf_grad(const WeakClbf& w, const Vec2& x) {
    const auto [v, gv] = clf_eval_grad(w.p, x);
    const double s = sigmoid_eval(w.shape, x[0]);
    const double scale = 1.0 + w.theta * s;
    const double ds = -w.shape.l * s * (1.0 - s);
    return {w.theta * v * ds + scale * gv[0], scale * gv[1]};
}

double clbf_grad_x1_on_lgw_line(const WeakClbf& w, double x1) {
    const double s = sigmoid_eval(w.shape, x1);
    const double ratio = w.p.det() / w.p(1, 1);
    return ratio * (w.theta * s * (1.0 - 0.5 * w.shape.l * (1.0 - s) * x1) + 1.0) * x1;
}

ParameterBounds compute_bounds(const SpdMat2& p, const RegionBox& region, double d, double v2, double l,
                               double delta) {
    ParameterBounds b{};
    b.v1 = v1_min_on_unsafe(p, d);
    b.v2 = v2;
    b.gamma = region.x1_max;
    b.l_max = b.gamma > 0.0 ? 2.0 / b.gamma : std::numeric_limits<double>::infinity();
    b.delta_min = (2.0 / l) * std::log(v2 / b.v1);
    const SigmoidShape shape{l, d, delta};
    b.sigma1 = sigmoid_eval(shape, d);
    b.sigma2 = sigmoid_eval(shape, d + delta);
    b.denominator = b.sigma1 * b.v1 - b.sigma2 * b.v2;
    b.theta_min = b.denominator > 0.0 ? (b.v2 - b.v1) / b.denominator : std::numeric_limits<double>::infinity();
    return b;
}

ParameterCheck check_parameters(const WeakClbf& w, const RegionBox& region) {
    ParameterCheck c{};
    c.bounds = compute_bounds(w.p, region, w.shape.d, w.levels.v2, w.shape.l, w.shape.delta);
    c.level_ok = w.levels.v2 > c.bounds.v1;
    c.l_ok = w.shape.l > 0.0 && w.shape.l <= c.bounds.l_max * (1.0 + 1e-12);
    c.delta_ok = w.shape.delta > c.bounds.delta_min;
    c.theta_ok = w.theta > c.bounds.theta_min;
    const double k_expected = (1.0 + w.theta * c.bounds.sigma2) * w.levels.v2;
    c.k_consistent = std::abs(w.k - k_expected) <= 1e-9 * std::max(1.0, std::abs(w.k));
    return c;
}

namespace {

LevelParams make_levels(const SpdMat2& p, const RegionBox& region, const SigmoidShape& shape, double v2) {
    return {v1_min_on_unsafe(p, shape.d), v2, sigmoid_eval(shape, shape.d), sigmoid_eval(shape, shape.d + shape.delta),
            region.x1_max};
}

}  // namespace

WeakClbf select_parameters(const SpdMat2& p, const RegionBox& region, double d, double v2,
                           const MarginPolicy& policy) {
    const HalfPlaneUnsafe unsafe(d);
    if (d < region.x1_min || d > region.x1_max)
        throw Error(ErrorCode::InvalidUnsafeSet, "d lies outside the x1 range of the region");

    const double v1 = v1_min_on_unsafe(p, d);
    if (!(v2 > v1))
        throw Error(ErrorCode::LevelTooSmall,
                    "v2 = " + std::to_string(v2) + " must exceed v1 = " + std::to_string(v1));

    const double gamma = region.x1_max;
    double l = 0.0;
    if (policy.l) {
        l = *policy.l;
        if (!(l > 0.0) || (gamma > 0.0 && l > 2.0 / gamma * (1.0 + 1e-12)))
            throw Error(ErrorCode::InvalidArgument, "sigmoid slope outside (0, 2/gamma]");
    } else if (gamma > 0.0) {
        l = 2.0 / gamma;
    } else {
        l = 2.0 / (policy.fallback_l_fraction * (region.x1_max - region.x1_min));
    }

    const double delta = policy.delta_slack * (2.0 / l) * std::log(v2 / v1);
    if (d + delta > region.x1_max)
        throw Error(ErrorCode::MarginInfeasible, "d + delta exceeds the x1 extent of the region");

    const SigmoidShape shape{l, d, delta};
    const LevelParams levels = make_levels(p, region, shape, v2);
    const double denom = levels.sigma1 * v1 - levels.sigma2 * v2;
    if (!(denom > 0.0)) throw Error(ErrorCode::MarginInfeasible, "sigma1 v1 - sigma2 v2 is not positive");
    const double theta = policy.theta_slack * (v2 - v1) / denom;
    const double k = (1.0 + theta * levels.sigma2) * v2;
    return WeakClbf{p, shape, theta, k, levels};
}

WeakClbf make_clbf(const SpdMat2& p, const RegionBox& region, double d, double l, double delta, double theta,
                   std::optional<double> v2, std::optional<double> k) {
    const HalfPlaneUnsafe unsafe(d);
    if (v2.has_value() == k.has_value())
        throw Error(ErrorCode::InvalidArgument, "exactly one of v2 or k must be supplied");
    const SigmoidShape shape{l, d, delta};
    const double sigma2 = sigmoid_eval(shape, d + delta);
    const double level = v2 ? *v2 : *k / (1.0 + theta * sigma2);
    const double offset = k ? *k : (1.0 + theta * sigma2) * *v2;
    return WeakClbf{p, shape, theta, offset, make_levels(p, region, shape, level)};
}

bool VerificationReport::all_pass() const {
    return positive_on_unsafe.pass && decrease_on_lgw_zero.pass && nonempty_sublevel.pass &&
           unique_stationary.pass && (!c_omega_subset || c_omega_subset->pass);
}

double default_eps_origin(const RegionBox& region) { return 1e-3 * region.diameter(); }

VerificationReport verify_weak_clbf(const WeakClbf& w, const DriftField& drift, const RegionBox& region,
                                    const HalfPlaneUnsafe& unsafe, int grid, std::optional<double> eps_origin) {
    if (grid < kMinGrid)
        throw Error(ErrorCode::GridTooCoarse, "grid resolution must be at least " + std::to_string(kMinGrid));
    const double eps = eps_origin.value_or(default_eps_origin(region));
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_origin must be positive");

    constexpr double inf = std::numeric_limits<double>::infinity();
    VerificationReport r{
        .positive_on_unsafe = {"positive_on_unsafe", true, inf, std::nullopt, 0},
        .decrease_on_lgw_zero = {"decrease_on_lgw_zero", true, -inf, std::nullopt, 0},
        .nonempty_sublevel = {"nonempty_sublevel", true, 0.0, std::nullopt, 1},
        .unique_stationary = {"unique_stationary", true, inf, std::nullopt, 0},
        .c_omega_subset = std::nullopt,
        .grid = grid,
        .eps_origin = eps,
        .region = region,
    };

    // Positivity on D and non-vanishing gradient on U share one grid pass.
    Vec2 worst_unsafe = Vec2::Zero(), worst_stationary = Vec2::Zero();
    for (int i = 0; i < grid; ++i) {
        const double x1 = grid_coord(region.x1_min, region.x1_max, i, grid);
        for (int j = 0; j < grid; ++j) {
            const Vec2 x(x1, grid_coord(region.x2_min, region.x2_max, j, grid));
            const double wx = clbf_eval(w, x);
            if (unsafe.contains(x)) {
                ++r.positive_on_unsafe.samples;
                if (wx < r.positive_on_unsafe.worst_margin) {
                    r.positive_on_unsafe.worst_margin = wx;
                    worst_unsafe = x;
                }
            }
            if (wx <= 0.0 && x.norm() > eps) {
                ++r.unique_stationary.samples;
                const double gnorm = clbf_grad(w, x).norm();
                if (gnorm < r.unique_stationary.worst_margin) {
                    r.unique_stationary.worst_margin = gnorm;
                    worst_stationary = x;
                }
            }
        }
    }
    r.positive_on_unsafe.pass = r.positive_on_unsafe.worst_margin > 0.0;
    if (r.positive_on_unsafe.samples == 0) r.positive_on_unsafe.worst_margin = 0.0;
    r.positive_on_unsafe.witness = worst_unsafe;
    r.unique_stationary.pass = r.unique_stationary.worst_margin > 0.0;
    if (r.unique_stationary.samples == 0) r.unique_stationary.worst_margin = 0.0;
    r.unique_stationary.witness = worst_stationary;

    // L_G W vanishes exactly on the line p12 x1 + p22 x2 = 0, so sweep it directly.
    const double slope = -w.p(0, 1) / w.p(1, 1);
    const int line_samples = 20 * grid;
    Vec2 worst_line = Vec2::Zero();
    for (int i = 0; i < line_samples; ++i) {
        const double x1 = grid_coord(region.x1_min, region.x1_max, i, line_samples);
        const Vec2 x(x1, slope * x1);
        if (!region.contains(x) || unsafe.contains(x) || x.norm() <= eps) continue;
        ++r.decrease_on_lgw_zero.samples;
        const double lfw = clbf_grad(w, x).dot(drift(x));
        if (lfw > r.decrease_on_lgw_zero.worst_margin) {
            r.decrease_on_lgw_zero.worst_margin = lfw;
            worst_line = x;
        }
    }
    r.decrease_on_lgw_zero.pass = r.decrease_on_lgw_zero.worst_margin < 0.0;
    if (r.decrease_on_lgw_zero.samples == 0) r.decrease_on_lgw_zero.worst_margin = 0.0;
    r.decrease_on_lgw_zero.witness = worst_line;

    const double w0 = clbf_eval(w, Vec2::Zero());
    r.nonempty_sublevel.worst_margin = w0;
    r.nonempty_sublevel.pass = w0 < 0.0;
    r.nonempty_sublevel.witness = Vec2::Zero();
    return r;
}

std::vector<Vec2> c_omega_corners(const WeakClbf& w) {
    const double x1 = w.shape.d + w.shape.delta;
    const double disc = 2.0 * w.levels.v2 * w.p(1, 1) - w.p.det() * x1 * x1;
    if (disc < 0.0) return {};
    const double root = std::sqrt(disc);
    const double base = -w.p(0, 1) * x1;
    return {Vec2(x1, (base - root) / w.p(1, 1)), Vec2(x1, (base + root) / w.p(1, 1))};
}

ConditionResult check_c_omega_subset(const WeakClbf& w, const RegionBox& region, int grid) {
    if (grid < 2) throw Error(ErrorCode::GridTooCoarse, "C_Omega sampling needs at least 2 points per axis");
    const double det = w.p.det();
    const double x1_ext = std::sqrt(2.0 * w.levels.v2 * w.p(1, 1) / det);
    const double x2_ext = std::sqrt(2.0 * w.levels.v2 * w.p(0, 0) / det);
    const double lo1 = std::max(w.shape.d + w.shape.delta, region.x1_min);
    const double hi1 = std::min(x1_ext, region.x1_max);
    const double lo2 = std::max(-x2_ext, region.x2_min);
    const double hi2 = std::min(x2_ext, region.x2_max);

    ConditionResult res{"c_omega_subset", true, -std::numeric_limits<double>::infinity(), std::nullopt, 0};
    auto visit = [&](const Vec2& x) {
        ++res.samples;
        const double wx = clbf_eval(w, x);
        if (wx > res.worst_margin) {
            res.worst_margin = wx;
            res.witness = x;
        }
    };
    if (lo1 <= hi1 && lo2 <= hi2) {
        for (int i = 0; i < grid; ++i) {
            const double x1 = grid_coord(lo1, hi1, i, grid);
            for (int j = 0; j < grid; ++j) {
                const Vec2 x(x1, grid_coord(lo2, hi2, j, grid));
                if (clf_eval_grad(w.p, x).value <= w.levels.v2) visit(x);
            }
        }
    }
    for (const Vec2& c : c_omega_corners(w))
        if (region.contains(c)) visit(c);

    if (res.samples == 0) throw Error(ErrorCode::EmptyCOmega, "no sample satisfies V <= v2 and x1 >= d + delta");
    res.pass = res.worst_margin <= kCOmegaTol;
    return res;
}

NormalizedConstraint normalize_constraint(UnsafeSide side, double d_raw) {
    if (side == UnsafeSide::AtMost) return {HalfPlaneUnsafe(d_raw), false};
    return {HalfPlaneUnsafe(-d_raw), true};
}

}  // namespace sclbf
