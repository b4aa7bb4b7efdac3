#include "sclbf/safe_fl.hpp"

#include <cmath>
#include <limits>

namespace sclbf {

double condition_number(const MatX& m) {
    Eigen::JacobiSVD<MatX> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double smin = s[s.size() - 1];
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s[0] / smin;
}

VecX DecouplingTransform::apply(const VecX& x) const {
    const int n = dimension();
    VecX out(2 * n);
    out.head(n) = p * x.head(n);
    out.tail(n) = p * x.tail(n);
    return out;
}

VecX DecouplingTransform::inverse(const VecX& xbar) const {
    const int n = dimension();
    VecX out(2 * n);
    out.head(n) = p_inv * xbar.head(n);
    out.tail(n) = p_inv * xbar.tail(n);
    return out;
}

DecouplingTransform build_transform(const ConstraintSet& constraints) {
    const int m = constraints.count();
    const int n = constraints.dimension();
    if (n <= 0 || m > n) throw Error(ErrorCode::InvalidArgument, "need 0 <= m <= n constraints");
    if (constraints.offsets.size() != m) throw Error(ErrorCode::InvalidArgument, "one offset per constraint row");
    for (int i = 0; i < m; ++i)
        if (!(constraints.offsets[i] < 0.0))
            throw Error(ErrorCode::InvalidUnsafeSet, "constraint offsets must be negative (origin strictly safe)");

    // Modified Gram-Schmidt over the constraint rows, then over the standard
    // basis in order to complete an orthonormal basis.
    std::vector<VecX> basis;
    auto orthogonalize = [&basis](VecX v) {
        for (const VecX& q : basis) v -= q.dot(v) * q;
        return v;
    };
    for (int i = 0; i < m; ++i) {
        const VecX row = constraints.rows.row(i).transpose();
        const VecX r = orthogonalize(row);
        if (r.norm() <= 1e-10 * std::max(1.0, row.norm()))
            throw Error(ErrorCode::RankDeficient, "constraint rows are linearly dependent");
        basis.push_back(r / r.norm());
    }

    MatX completion(n - m, n);
    int filled = 0;
    for (int j = 0; j < n && filled < n - m; ++j) {
        VecX r = orthogonalize(VecX::Unit(n, j));
        if (r.norm() <= 1e-8) continue;
        r /= r.norm();
        for (int c = 0; c < n; ++c) {
            if (std::abs(r[c]) > 1e-12) {
                if (r[c] < 0.0) r = -r;
                break;
            }
        }
        basis.push_back(r);
        completion.row(filled++) = r.transpose();
    }

    DecouplingTransform t;
    t.p.resize(n, n);
    t.p.topRows(m) = constraints.rows;
    t.p.bottomRows(n - m) = completion;
    t.completion = completion;
    t.constrained = m;
    t.condition_number = condition_number(t.p);
    if (!(t.condition_number < kConditionLimit))
        throw Error(ErrorCode::RankDeficient, "transform is numerically singular");
    t.p_inv = t.p.inverse();
    return t;
}

GainSchedule::GainSchedule(std::vector<SubsystemGains> s) : subsystems(std::move(s)) {
    for (const auto& g : subsystems) {
        if (!(g.kp > 0.0) || !(g.kd > 0.0)) throw Error(ErrorCode::InvalidArgument, "kp and kd must be positive");
        if (g.k_safe < 0.0) throw Error(ErrorCode::InvalidArgument, "k_safe must be non-negative");
        if (!is_hurwitz(pd_companion(g.kp, g.kd))) throw Error(ErrorCode::NotHurwitz, "subsystem is not Hurwitz");
    }
}

MatX build_gain_matrix(const DecouplingTransform& t, const GainSchedule& gains) {
    const int n = t.dimension();
    if (gains.size() != n) throw Error(ErrorCode::InvalidArgument, "one gain pair per subsystem");
    MatX kbar = MatX::Zero(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        kbar(i, i) = gains.subsystems[i].kp;
        kbar(i, n + i) = gains.subsystems[i].kd;
    }
    MatX phi = MatX::Zero(2 * n, 2 * n);
    phi.topLeftCorner(n, n) = t.p;
    phi.bottomRightCorner(n, n) = t.p;
    return t.p_inv * kbar * phi;
}

VecX assemble_u_safe(const DecouplingTransform& t, const MatX& g_at_x, const VecX& a_safe) {
    if (!(condition_number(g_at_x) < kConditionLimit))
        throw Error(ErrorCode::SingularInputMatrix, "input matrix G(x) is numerically singular");
    if (!(t.condition_number < kConditionLimit))
        throw Error(ErrorCode::SingularInputMatrix, "transform P is numerically singular");
    return g_at_x.partialPivLu().solve(t.p_inv * a_safe);
}

Vec2 subsystem_state(const VecX& xbar, int i) {
    const auto n = xbar.size() / 2;
    return {xbar[i], xbar[n + i]};
}

VecX safe_aux_inputs(const std::vector<WeakClbf>& w_list, const VecX& xbar, const GainSchedule& gains,
                     DriftSign sign) {
    const int n = gains.size();
    VecX a = VecX::Zero(n);
    for (int i = 0; i < static_cast<int>(w_list.size()) && i < n; ++i) {
        const auto& g = gains.subsystems[i];
        a[i] = safe_aux_input(w_list[i], subsystem_state(xbar, i), g.kp, g.kd, g.k_safe, sign);
    }
    return a;
}

MembershipResult initial_set_membership(const DecouplingTransform& t, const std::vector<WeakClbf>& w_list,
                                        const VecX& x0) {
    const VecX xbar = t.apply(x0);
    MembershipResult r{true, {}};
    for (int i = 0; i < static_cast<int>(w_list.size()); ++i) {
        const double w = clbf_eval(w_list[i], subsystem_state(xbar, i));
        r.w_values.push_back(w);
        r.member = r.member && w <= 0.0;
    }
    return r;
}

}  // namespace sclbf
