#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sclbf/manipulator.hpp"
#include "sclbf/sim.hpp"

namespace sclbf::cli {

inline constexpr int kSchemaVersion = 1;

struct ExplicitClbfParams {
    double l;
    double delta;
    double theta;
    std::optional<double> v2;
    std::optional<double> k;
};

struct ClbfConfig {
    bool automatic = true;
    std::vector<std::optional<double>> v2;  // auto mode, one per subsystem
    double delta_slack = 1.05;
    double theta_slack = 1.05;
    std::vector<ExplicitClbfParams> explicit_params;
};

struct RunConfig {
    std::string scenario;
    ManipulatorParams manipulator;
    Vec2 goal;
    Vec2 d_hat;
    TaskState initial;
    Elbow elbow = Elbow::Positive;
    TaskRegion region;
    std::vector<SubsystemGains> gains;
    Mat2 lyapunov_q;
    ClbfConfig clbf;
    DriftSign drift_sign = DriftSign::ClosedLoop;
    SimConfig sim;
    std::vector<double> k_safe;
    int grid = kDefaultGrid;
    int c_omega_grid = 200;
    double eps_origin_scale = 1e-3;
    std::vector<double> reference_initial_w;
    std::string output_dir = "out";
};

/// Parses and validates a config document. Throws Error(ConfigError).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// The shipped two-link configuration, compiled into the binary.
const std::string& default_config_text();

}  // namespace sclbf::cli
