#include "sclbf/cli/scenario.hpp"

#include <algorithm>

namespace sclbf::cli {

std::vector<WeakClbf> Scenario::clbfs() const {
    std::vector<WeakClbf> out;
    for (const auto& s : subsystems) out.push_back(s.clbf);
    return out;
}

TaskController Scenario::controller(double k_safe) const {
    std::vector<SubsystemGains> g;
    for (const auto& s : subsystems) g.push_back({s.gains.kp, s.gains.kd, k_safe});
    return make_task_controller(config.manipulator, config.goal, TaskConstraints{config.d_hat}, GainSchedule(g),
                                clbfs(), config.drift_sign);
}

Scenario resolve_scenario(const RunConfig& config) {
    const SpdMat2 q(config.lyapunov_q);
    const std::vector<RegionBox> regions = subsystem_regions(config.region, config.goal);
    const Vec2 offsets = TaskConstraints{config.d_hat}.offsets(config.goal);
    const VecX xbar0 = task_error_state(config.initial, config.goal);

    Scenario sc{config, inverse_kinematics(config.manipulator, config.initial, config.elbow), xbar0, {}};
    for (int i = 0; i < 2; ++i) {
        const SubsystemGains& g = config.gains[static_cast<std::size_t>(i)];
        const SpdMat2 p = solve_lyapunov_2x2(pd_companion(g.kp, g.kd), q);
        const HalfPlaneUnsafe unsafe(offsets[i]);
        const Vec2 x0 = subsystem_state(xbar0, i);
        const RegionBox& region = regions[static_cast<std::size_t>(i)];

        WeakClbf w = [&] {
            if (config.clbf.automatic) {
                const double v1 = v1_min_on_unsafe(p, unsafe.d);
                const double v2 = config.clbf.v2[static_cast<std::size_t>(i)].value_or(
                    std::max(clf_eval_grad(p, x0).value, 1.5 * v1));
                MarginPolicy policy;
                policy.delta_slack = config.clbf.delta_slack;
                policy.theta_slack = config.clbf.theta_slack;
                return select_parameters(p, region, unsafe.d, v2, policy);
            }
            const ExplicitClbfParams& e = config.clbf.explicit_params[static_cast<std::size_t>(i)];
            return make_clbf(p, region, unsafe.d, e.l, e.delta, e.theta, e.v2, e.k);
        }();
        const ParameterCheck check = check_parameters(w, region);
        sc.subsystems.push_back(SubsystemSetup{g, p, region, unsafe, x0, std::move(w), check});
    }
    return sc;
}

}  // namespace sclbf::cli
