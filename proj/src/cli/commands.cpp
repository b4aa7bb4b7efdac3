#include "sclbf/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sclbf/cli/output.hpp"
#include "sclbf/cli/report.hpp"
#include "sclbf/cli/scenario.hpp"

namespace sclbf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::NotSpd:
            return kExitConfig;
        case ErrorCode::NearSingular:
        case ErrorCode::NonFiniteState:
        case ErrorCode::SingularInputMatrix:
            return kExitNumerical;
        default:
            return kExitCheckFailed;
    }
}

RunConfig apply_overrides(RunConfig config, const Overrides& o) {
    if (o.out_dir) config.output_dir = *o.out_dir;
    if (o.dt) config.sim.dt = *o.dt;
    if (o.horizon) config.sim.horizon = *o.horizon;
    if (o.grid) config.grid = *o.grid;
    if (o.k_safe) config.k_safe = *o.k_safe;
    try {
        config.sim.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    for (double k : config.k_safe)
        if (!(k >= 0.0)) throw Error(ErrorCode::ConfigError, "k_safe values must be non-negative");
    if (config.grid < kMinGrid)
        throw Error(ErrorCode::ConfigError, "grid must be at least " + std::to_string(kMinGrid));
    return config;
}

namespace {

fs::path prepare_output_dir(const RunConfig& config) {
    fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::ConfigError, "cannot create output directory '" + dir.string() + "'");
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    f << j.dump(2) << '\n';
}

std::string witness_text(const ConditionResult& c) {
    if (!c.witness) return "-";
    return "(" + format_g9((*c.witness)[0]) + ", " + format_g9((*c.witness)[1]) + ")";
}

}  // namespace

int cmd_select_params(const RunConfig& config, std::ostream& out, std::ostream&) {
    const Scenario sc = resolve_scenario(config);
    const fs::path dir = prepare_output_dir(config);

    json subs = json::array();
    bool ok = true;
    out << "subsystem        l      delta      theta          k         v1         v2  l_max  delta_min  theta_min  ok\n";
    for (std::size_t i = 0; i < sc.subsystems.size(); ++i) {
        const SubsystemSetup& s = sc.subsystems[i];
        const WeakClbf& w = s.clbf;
        const ParameterBounds& b = s.check.bounds;
        ok = ok && s.check.all_ok();
        out << std::setw(9) << i + 1 << ' ' << std::setw(8) << format_g9(w.shape.l) << ' ' << std::setw(10)
            << format_g9(w.shape.delta) << ' ' << std::setw(10) << format_g9(w.theta) << ' ' << std::setw(10)
            << format_g9(w.k) << ' ' << std::setw(10) << format_g9(w.levels.v1) << ' ' << std::setw(10)
            << format_g9(w.levels.v2) << ' ' << std::setw(6) << format_g9(b.l_max) << ' ' << std::setw(10)
            << format_g9(b.delta_min) << ' ' << std::setw(10) << format_g9(b.theta_min) << "  "
            << (s.check.all_ok() ? "yes" : "NO") << '\n';
        if (!s.check.level_ok) out << "  subsystem " << i + 1 << ": LevelTooSmall (v2 <= v1)\n";
        if (!s.check.l_ok) out << "  subsystem " << i + 1 << ": slope l exceeds 2/gamma\n";
        if (!s.check.delta_ok) out << "  subsystem " << i + 1 << ": delta does not exceed its lower bound\n";
        if (!s.check.theta_ok) out << "  subsystem " << i + 1 << ": theta does not exceed its lower bound\n";
        if (!s.check.k_consistent) out << "  subsystem " << i + 1 << ": k != (1 + theta sigma2) v2\n";
        subs.push_back(json{{"index", i + 1}, {"clbf", to_json(w)}, {"bounds", to_json(s.check)}});
    }
    write_json(dir / "parameters.json",
               json{{"scenario", config.scenario},
                    {"mode", config.clbf.automatic ? "auto" : "explicit"},
                    {"feasible", ok},
                    {"subsystems", subs}});
    out << "wrote " << (dir / "parameters.json").string() << '\n';
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream&) {
    const Scenario sc = resolve_scenario(config);
    const fs::path dir = prepare_output_dir(config);

    json subs = json::array();
    bool all = true;
    for (std::size_t i = 0; i < sc.subsystems.size(); ++i) {
        const SubsystemSetup& s = sc.subsystems[i];
        const double kp = s.gains.kp, kd = s.gains.kd;
        const DriftSign sign = config.drift_sign;
        VerificationReport rep = verify_weak_clbf(
            s.clbf, [kp, kd, sign](const Vec2& x) { return decoupled_drift(kp, kd, x, sign); }, s.region, s.unsafe,
            config.grid, config.eps_origin_scale * s.region.diameter());
        try {
            rep.c_omega_subset = check_c_omega_subset(s.clbf, s.region, config.c_omega_grid);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyCOmega) throw;
            rep.c_omega_subset = ConditionResult{"c_omega_subset", false, 0.0, std::nullopt, 0};
            out << "subsystem " << i + 1 << ": " << e.what() << '\n';
        }
        all = all && rep.all_pass();
        for (const ConditionResult* c : {&rep.positive_on_unsafe, &rep.decrease_on_lgw_zero, &rep.nonempty_sublevel,
                                         &rep.unique_stationary, &*rep.c_omega_subset}) {
            out << "subsystem " << i + 1 << "  " << std::left << std::setw(22) << c->id << std::right
                << (c->pass ? "pass" : "FAIL") << "  worst=" << format_g9(c->worst_margin);
            if (!c->pass) out << "  witness=" << witness_text(*c);
            out << '\n';
        }
        subs.push_back(json{{"index", i + 1}, {"clbf", to_json(s.clbf)}, {"report", to_json(rep)}});
    }
    write_json(dir / "verification.json", json{{"scenario", config.scenario}, {"pass", all}, {"subsystems", subs}});
    out << "verify: " << (all ? "PASS" : "FAIL") << " (" << sc.subsystems.size() << " subsystems, grid "
        << config.grid << "x" << config.grid << ")\n";
    return all ? kExitOk : kExitCheckFailed;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Scenario sc = resolve_scenario(config);
    const fs::path dir = prepare_output_dir(config);

    std::vector<double> gains{0.0};
    for (double k : config.k_safe)
        if (std::find(gains.begin(), gains.end(), k) == gains.end()) gains.push_back(k);

    std::vector<std::function<SimResult()>> jobs;
    const VecX x0 = ManipulatorLoop::pack(sc.joint0);
    for (double k : gains)
        jobs.emplace_back([&sc, &config, x0, k] { return simulate_closed_loop(sc.loop(k), x0, config.sim); });
    const std::vector<SimResult> results = run_batch(jobs);

    const MembershipResult member = initial_set_membership(sc.controller(0.0).transform, sc.clbfs(), sc.xbar0);
    out << "initial W:";
    for (double w : member.w_values) out << ' ' << format_g9(w);
    if (!config.reference_initial_w.empty()) {
        out << "   (reference:";
        for (double w : config.reference_initial_w) out << ' ' << format_g9(w);
        out << ')';
    }
    out << "   initial-set member: " << (member.member ? "yes" : "no") << '\n';

    json runs = json::array();
    std::vector<LabeledRun> labeled;
    int code = kExitOk;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        const SimResult& r = results[i];
        const std::string label = "ksafe_" + format_g9(gains[i]);
        const fs::path csv = dir / ("trajectory_" + label + ".csv");
        {
            std::ofstream f(csv);
            if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + csv.string() + "'");
            write_trajectory_csv(f, r.trajectory);
        }
        labeled.push_back({gains[i] == 0.0 ? "baseline" : "k_safe = " + format_g9(gains[i]), &r.trajectory});

        json entry{{"k_safe", gains[i]}, {"csv", csv.filename().string()}};
        if (!r.trajectory.points.empty()) {
            const MonitorReport mon = safety_monitor(r.trajectory);
            const TrajectoryPoint& last = r.trajectory.points.back();
            entry["violation"] = mon.first_violation_time.has_value();
            entry["first_violation_time"] = mon.first_violation_time ? json(*mon.first_violation_time) : json(nullptr);
            entry["min_margin"] = mon.min_margin;
            entry["final_time"] = last.t;
            entry["final_position_error"] = (last.p - config.goal).norm();
            entry["peak_force_safe"] = *std::max_element(mon.force_safe_norm.begin(), mon.force_safe_norm.end());
            out << std::left << std::setw(16) << label << std::right << " min margin " << std::setw(12)
                << format_g9(mon.min_margin) << "  violation "
                << (mon.first_violation_time ? "at t=" + format_g9(*mon.first_violation_time) : std::string("none"))
                << "  |p(T)-p_d| " << format_g9((last.p - config.goal).norm()) << '\n';
        }
        if (r.failure) {
            entry["failure"] = json{{"code", std::string(to_string(r.failure->code))},
                                    {"t", r.failure->t},
                                    {"message", r.failure->message}};
            err << label << ": aborted at t=" << format_g9(r.failure->t) << ": " << r.failure->message << '\n';
            code = kExitNumerical;
        } else {
            entry["failure"] = nullptr;
        }
        runs.push_back(entry);
    }

    {
        std::ofstream f(dir / "trajectories.svg");
        write_trajectory_svg(f, labeled, TaskConstraints{config.d_hat}, config.goal);
    }
    {
        std::ofstream f(dir / "input_norms.svg");
        write_input_norm_svg(f, labeled);
    }
    json summary{{"scenario", config.scenario},
                 {"dt", config.sim.dt},
                 {"horizon", config.sim.horizon},
                 {"initial_w", member.w_values},
                 {"initial_set_member", member.member},
                 {"runs", runs}};
    if (!config.reference_initial_w.empty()) summary["reference_initial_w"] = config.reference_initial_w;
    write_json(dir / "summary.json", summary);
    out << "wrote " << gains.size() << " trajectories to " << dir.string() << '\n';
    return code;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sigmoid-scaled CLBF construction, verification and safe task-space control"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;
    std::string out_dir;
    double dt = 0.0, horizon = 0.0;
    int grid = 0;
    std::vector<double> k_safe;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration (default: shipped two-link config)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--dt", dt, "integration step [s]");
        sub->add_option("--horizon", horizon, "simulation horizon [s]");
        sub->add_option("--grid", grid, "verification grid points per axis");
        sub->add_option("--k-safe", k_safe, "safety gain (repeatable)")->allow_extra_args(false);
    };
    CLI::App* select = app.add_subcommand("select-params", "choose and check CLBF parameters");
    CLI::App* verify = app.add_subcommand("verify", "grid-verify the weak CLBF conditions");
    CLI::App* simulate = app.add_subcommand("simulate", "simulate baseline and safe runs, write CSV/SVG");
    CLI::App* reproduce = app.add_subcommand("reproduce-paper", "simulate the shipped two-link scenario sweep");
    for (CLI::App* s : {select, verify, simulate, reproduce}) add_common(s);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    CLI::App* active = app.get_subcommands().front();
    auto given = [active](const char* name) { return active->count(name) > 0; };
    if (given("--out")) o.out_dir = out_dir;
    if (given("--dt")) o.dt = dt;
    if (given("--horizon")) o.horizon = horizon;
    if (given("--grid")) o.grid = grid;
    if (given("--k-safe")) o.k_safe = k_safe;

    try {
        RunConfig base = given("--config") ? load_config(config_path) : parse_config(default_config_text());
        const RunConfig config = apply_overrides(std::move(base), o);
        if (active == select) return cmd_select_params(config, out, err);
        if (active == verify) return cmd_verify(config, out, err);
        return cmd_simulate(config, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

}  // namespace sclbf::cli
