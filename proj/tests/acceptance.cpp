// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sclbf/cli/commands.hpp"
#include "sclbf/cli/config.hpp"
#include "sclbf/cli/output.hpp"
#include "sclbf/cli/scenario.hpp"
#include "sclbf/sim.hpp"

using namespace sclbf;
using namespace sclbf::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = SCLBF_TEST_TMP;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_ms;
    std::function<Outcome()> check;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Mat2 mat(double a, double b, double c, double d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

const Mat2 kQ = mat(1.0, -0.9, -0.9, 1.0);
const Mat2 kPExpected = mat(2.483333333333333, 1.0 / 3.0, 1.0 / 3.0, 0.8333333333333334);

// Reproduction runs shared by criteria 7-10.
const std::vector<double> kSafeGains{0.2, 0.5, 1.5};
const double kHorizon = 10.0;

fs::path run_dir(const std::string& name) { return kTmp / name; }

int reproduce_into(const fs::path& dir) {
    fs::remove_all(dir);
    std::ostringstream out, err;
    return run_cli({"reproduce-paper", "--out", dir.string()}, out, err);
}

CsvTable load_run(const fs::path& dir, double k) {
    return read_csv((dir / ("trajectory_ksafe_" + format_g9(k) + ".csv")).string());
}

Outcome lyapunov() {
    const SpdMat2 p = solve_lyapunov_2x2(pd_companion(1.5, 1.0), SpdMat2(kQ));
    const double err = (p.matrix() - kPExpected).cwiseAbs().maxCoeff();
    return {err <= 1e-9 && p(0, 1) > 0.0, "max|P - P_ref| = " + fmt("%.2e", err) + ", p12 = " + fmt("%.6f", p(0, 1))};
}

Outcome bounds() {
    const SpdMat2 p = solve_lyapunov_2x2(pd_companion(1.5, 1.0), SpdMat2(kQ));
    const RegionBox x(-1.2, 0.5, -2.5, 2.5);
    const ParameterBounds b = compute_bounds(p, x, -1.0, 2.0, 4.0, 0.28);
    const bool ok = std::abs(b.l_max - 4.0) < 1e-12 && std::abs(b.delta_min - 0.266) <= 1e-3 &&
                    std::abs(b.theta_min - 39.8) <= 0.1 && 4.0 <= b.l_max && 0.28 > b.delta_min && 50.0 > b.theta_min;
    return {ok, "l_max = " + fmt("%.4f", b.l_max) + ", delta_min = " + fmt("%.4f", b.delta_min) +
                    ", theta_min = " + fmt("%.3f", b.theta_min) + " (v2 = 2.0)"};
}

Outcome verification() {
    const Scenario sc = resolve_scenario(parse_config(default_config_text()));
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < sc.subsystems.size(); ++i) {
        const SubsystemSetup& s = sc.subsystems[i];
        const double kp = s.gains.kp, kd = s.gains.kd;
        const DriftField drift = [kp, kd](const Vec2& x) { return decoupled_drift(kp, kd, x); };
        const double eps = 1e-3 * s.region.diameter();
        const VerificationReport r = verify_weak_clbf(s.clbf, drift, s.region, s.unsafe, 400, eps);
        ok = ok && r.positive_on_unsafe.pass && r.decrease_on_lgw_zero.pass && r.nonempty_sublevel.pass &&
             r.unique_stationary.pass;

        WeakClbf flat = s.clbf;
        flat.theta = 0.0;
        flat.k = flat.levels.v2;
        const VerificationReport rf = verify_weak_clbf(flat, drift, s.region, s.unsafe, 400, eps);
        const Vec2 expected = v1_minimizer(s.p, s.unsafe.d);
        const double spacing = s.region.diameter() / 399.0;
        const bool flat_ok = !rf.positive_on_unsafe.pass && rf.positive_on_unsafe.witness &&
                             (*rf.positive_on_unsafe.witness - expected).norm() <= 2.0 * spacing;

        WeakClbf neg = s.clbf;
        neg.k = -1.0;
        const VerificationReport rn = verify_weak_clbf(neg, drift, s.region, s.unsafe, 400, eps);
        const bool neg_ok = !rn.nonempty_sublevel.pass && rn.nonempty_sublevel.witness &&
                            rn.nonempty_sublevel.witness->norm() == 0.0;
        ok = ok && flat_ok && neg_ok;
        detail += "S" + std::to_string(i + 1) + ": conditions " + (r.all_pass() ? "pass" : "FAIL") +
                  ", theta=0 witness " + (flat_ok ? "ok" : "WRONG") + ", k<0 witness " + (neg_ok ? "ok" : "WRONG") +
                  (i + 1 < sc.subsystems.size() ? "; " : "");
    }
    return {ok, detail};
}

Outcome c_omega() {
    const Scenario sc = resolve_scenario(parse_config(default_config_text()));
    bool ok = true;
    double worst = -1e300, corner = 0.0;
    for (const SubsystemSetup& s : sc.subsystems) {
        const ConditionResult r = check_c_omega_subset(s.clbf, s.region, 200);
        ok = ok && r.pass && r.worst_margin <= 1e-9;
        worst = std::max(worst, r.worst_margin);
        for (const Vec2& c : c_omega_corners(s.clbf)) corner = std::max(corner, std::abs(clbf_eval(s.clbf, c)));
    }
    ok = ok && corner <= 1e-9;
    return {ok, "max W on C_Omega = " + fmt("%.2e", worst) + ", max |W(corner)| = " + fmt("%.2e", corner)};
}

Outcome sontag() {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> val(-10.0, 10.0), expo(-6.0, 1.0);
    std::bernoulli_distribution sign;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double a = val(rng);
        const double b = (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, expo(rng));
        const double rhs = -std::sqrt(a * a + std::pow(b, 4));
        worst = std::max(worst, std::abs(a + b * sontag_universal(a, b) - rhs) / std::abs(rhs));
    }
    const bool zero = sontag_universal(2.0, 0.0) == 0.0 && sontag_universal(-2.0, 0.0) == 0.0;
    return {worst <= 1e-9 && zero, "max relative error = " + fmt("%.2e", worst) + ", kappa(a, 0) = 0"};
}

Outcome manipulator_model() {
    const ManipulatorParams arm{};
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
    double jac_err = 0.0, reassembly = 0.0;
    int n = 0;
    while (n < 1000) {
        const Vec2 q(ang(rng), ang(rng));
        if (std::abs(std::sin(q[1])) < 0.05) continue;
        ++n;
        Mat2 fd;
        for (int c = 0; c < 2; ++c) {
            Vec2 dq = Vec2::Zero();
            dq[c] = 1e-6;
            fd.col(c) = (forward_kinematics(arm, q + dq) - forward_kinematics(arm, q - dq)) / 2e-6;
        }
        jac_err = std::max(jac_err, (jacobian(arm, q) - fd).cwiseAbs().maxCoeff());
        const TaskSpaceTerms t = task_space_terms(arm, q, Vec2::Zero());
        const Mat2 j = jacobian(arm, q);
        const Mat2 m = mass_matrix(arm, q);
        reassembly = std::max(reassembly, (j.transpose() * t.mass * j - m).cwiseAbs().maxCoeff() / m.norm());
    }

    const ManipulatorParams free{0.8, 0.8, 1.0, 1.0, 0.0};
    const StateField field = [&](double, const VecX& x) {
        VecX dx(4);
        dx << x.tail<2>(), joint_acceleration(free, {x.head<2>(), x.tail<2>()}, Vec2::Zero());
        return dx;
    };
    auto energy = [&](const VecX& x) { return 0.5 * x.tail<2>().dot(mass_matrix(free, x.head<2>()) * x.tail<2>()); };
    VecX x(4);
    x << 0.3, 1.1, 1.2, -0.8;
    const double e0 = energy(x);
    double drift = 0.0;
    for (int k = 0; k < 10000; ++k) {
        x = rk4_step(field, k * 1e-3, x, 1e-3);
        drift = std::max(drift, std::abs(energy(x) - e0) / e0);
    }
    return {jac_err <= 1e-6 && reassembly <= 1e-9 && drift < 1e-6,
            "J vs FD " + fmt("%.1e", jac_err) + ", J^T M_p J - M " + fmt("%.1e", reassembly) + ", energy drift " +
                fmt("%.1e", drift)};
}

Outcome reproduction() {
    const fs::path dir = run_dir("reproduce_a");
    const int code = reproduce_into(dir);
    if (code != 0) return {false, "reproduce-paper exited with " + std::to_string(code)};
    std::string detail;
    bool ok = true;
    for (double k : kSafeGains) {
        const CsvTable t = load_run(dir, k);
        double max_p1 = -1e300, min_p2 = 1e300;
        for (const auto& row : t.rows) {
            max_p1 = std::max(max_p1, row[t.column("p1")]);
            min_p2 = std::min(min_p2, row[t.column("p2")]);
        }
        const auto& last = t.rows.back();
        const double err = std::hypot(last[t.column("p1")] - 0.3, last[t.column("p2")] - 1.0);
        const bool run_ok = max_p1 < 1.3 && min_p2 > -0.3 && err < 0.01 &&
                            std::abs(last[t.column("t")] - kHorizon) < 1e-9;
        ok = ok && run_ok;
        detail += "k=" + format_g9(k) + ": max p1 " + fmt("%.3f", max_p1) + ", min p2 " + fmt("%.3f", min_p2) +
                  ", |p(10)-p_d| " + fmt("%.1e", err) + "; ";
    }
    const CsvTable base = load_run(dir, 0.0);
    bool violated = false;
    double max_p1 = -1e300, min_p2 = 1e300;
    for (const auto& row : base.rows) {
        max_p1 = std::max(max_p1, row[base.column("p1")]);
        min_p2 = std::min(min_p2, row[base.column("p2")]);
        violated = violated || row[base.column("p1")] >= 1.3 || row[base.column("p2")] <= -0.3;
    }
    ok = ok && violated;
    detail += "baseline: max p1 " + fmt("%.3f", max_p1) + ", min p2 " + fmt("%.3f", min_p2) +
              (violated ? " (violates)" : " (NO violation)");
    return {ok, detail};
}

Outcome invariance() {
    const fs::path dir = run_dir("reproduce_a");
    if (!fs::exists(dir)) return {false, "reproduction output missing"};
    bool ok = true;
    double worst = -1e300;
    for (double k : kSafeGains) {
        const CsvTable t = load_run(dir, k);
        for (const char* col : {"W1", "W2"}) {
            const std::size_t c = t.column(col);
            if (t.rows.front()[c] > 0.0) continue;
            for (const auto& row : t.rows) {
                worst = std::max(worst, row[c]);
                ok = ok && row[c] <= 0.0;
            }
        }
    }
    return {ok, "max W along safe runs = " + fmt("%.3e", worst)};
}

Outcome input_shape() {
    const fs::path dir = run_dir("reproduce_a");
    if (!fs::exists(dir)) return {false, "reproduction output missing"};
    bool ok = true;
    std::string detail;
    for (double k : kSafeGains) {
        const CsvTable t = load_run(dir, k);
        const std::size_t ct = t.column("t"), f1 = t.column("F1"), f2 = t.column("F2"), s1 = t.column("Fsafe1"),
                          s2 = t.column("Fsafe2");
        double peak = 0.0, last_significant = 0.0, late_max = 0.0;
        for (const auto& row : t.rows) {
            const double fs_norm = std::hypot(row[s1], row[s2]);
            const double phi_norm = std::hypot(row[f1] - row[s1], row[f2] - row[s2]);
            peak = std::max(peak, fs_norm);
            if (fs_norm > 0.1 * phi_norm) last_significant = row[ct];
        }
        for (const auto& row : t.rows)
            if (row[ct] > kHorizon / 2) late_max = std::max(late_max, std::hypot(row[s1], row[s2]));
        const bool run_ok = last_significant <= kHorizon / 2 && late_max < 0.01 * peak;
        ok = ok && run_ok;
        detail += "k=" + format_g9(k) + ": >10% until t=" + fmt("%.2f", last_significant) + ", late/peak " +
                  fmt("%.1e", late_max / peak) + "; ";
    }
    return {ok, detail};
}

Outcome determinism() {
    const fs::path a = run_dir("reproduce_a"), b = run_dir("reproduce_b");
    if (!fs::exists(a)) return {false, "reproduction output missing"};
    const int code = reproduce_into(b);
    if (code != 0) return {false, "second reproduce-paper exited with " + std::to_string(code)};
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    int compared = 0;
    bool ok = true;
    for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        ok = ok && slurp(entry.path()) == slurp(b / entry.path().filename());
    }
    return {ok && compared == 4, std::to_string(compared) + " CSVs compared, " + (ok ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
    fs::create_directories(kTmp);
    const std::vector<Criterion> criteria{
        {1, "Lyapunov solver", 1.0, lyapunov},
        {2, "parameter bounds", 1.0, bounds},
        {3, "weak CLBF verification", 10000.0, verification},
        {4, "sublevel margin set inside U", 2000.0, c_omega},
        {5, "Sontag decrease identity", 100.0, sontag},
        {6, "manipulator model", 10000.0, manipulator_model},
        {7, "scenario reproduction", 10000.0, reproduction},
        {8, "forward invariance", 1000.0, invariance},
        {9, "safety input shape", 1000.0, input_shape},
        {10, "determinism", 20000.0, determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = ms <= c.budget_ms;
        const bool pass = o.pass && in_budget;
        failures += pass ? 0 : 1;
        std::printf("%s  %2d  %-30s %9.2f ms (budget %.0f ms%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    ms, c.budget_ms, in_budget ? "" : ", EXCEEDED", o.detail.c_str());
    }

    // Reported only: the published initial W readouts depend on an unstated normalisation.
    const Scenario sc = resolve_scenario(parse_config(default_config_text()));
    const MembershipResult m = initial_set_membership(sc.controller(0.0).transform, sc.clbfs(), sc.xbar0);
    std::printf("INFO      initial W = (%.4f, %.4f); published readout (-0.43, -2.33), not asserted\n",
                m.w_values[0], m.w_values[1]);

    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
