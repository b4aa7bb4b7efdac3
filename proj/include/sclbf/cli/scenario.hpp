#pragma once

#include <vector>

#include "sclbf/cli/config.hpp"

namespace sclbf::cli {

struct SubsystemSetup {
    SubsystemGains gains;
    SpdMat2 p;
    RegionBox region;
    HalfPlaneUnsafe unsafe;
    Vec2 x0;  // (xbar_1i, xbar_2i) at the initial state
    WeakClbf clbf;
    ParameterCheck check;
};

/// A config with every derived quantity filled in: Lyapunov matrices,
/// per-subsystem regions, CLBF parameters, and the initial joint state.
struct Scenario {
    RunConfig config;
    JointState joint0;
    VecX xbar0;
    std::vector<SubsystemSetup> subsystems;

    std::vector<WeakClbf> clbfs() const;
    TaskController controller(double k_safe) const;
    ManipulatorLoop loop(double k_safe) const { return ManipulatorLoop(controller(k_safe)); }
};

/// Throws LevelTooSmall / MarginInfeasible / InvalidUnsafeSet from parameter
/// selection in auto mode; explicit parameters are taken as given.
Scenario resolve_scenario(const RunConfig& config);

}  // namespace sclbf::cli
